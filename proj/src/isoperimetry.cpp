#include "hcmeta/isoperimetry.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "hcmeta/parallel.hpp"

namespace hcmeta {

namespace {

void require_v_set(const BipartiteGraph& g, const VSet& a, const char* who) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!g.in_v(a[i])) throw InvalidArgument(std::string(who) + ": site " + std::to_string(a[i]) + " is not in V");
        if (i > 0 && a[i] <= a[i - 1]) throw InvalidArgument(std::string(who) + ": sites must be sorted and distinct");
    }
}

VSet sorted_unique(VSet a) {
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end()) throw InvalidArgument("repeated site in set");
    return a;
}

}  // namespace

int set_cost(const BipartiteGraph& g, const VSet& raw) {
    VSet a = sorted_unique(raw);
    require_v_set(g, a, "set_cost");
    std::vector<char> mark(g.num_u(), 0);
    int covered = 0;
    for (int s : a)
        for (int t : g.neighbors(s))
            if (!mark[t]) {
                mark[t] = 1;
                ++covered;
            }
    return covered - static_cast<int>(a.size());
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    return static_cast<std::uint64_t>(r);
}

std::uint64_t brute_force_evaluations(int nv, int s_max) {
    std::uint64_t total = 0;
    for (int s = 1; s <= s_max; ++s) total += binomial(nv, s);
    return total;
}

namespace {

struct BruteContext {
    int nu = 0;
    int nv = 0;
    std::vector<std::vector<int>> vnbr;  // U neighbours of V index i
    std::size_t cap = 0;
    bool keep = true;
};

struct SizeResult {
    int best = INT_MAX;
    std::uint64_t count = 0;
    std::vector<VSet> witnesses;
    bool truncated = false;
};

BruteContext make_context(const BipartiteGraph& g, int s_max, const BruteForceOptions& opts) {
    if (s_max < 0) throw InvalidArgument("s_max must be non-negative");
    if (s_max > g.num_v())
        throw InvalidArgument("s_max " + std::to_string(s_max) + " exceeds |V| = " + std::to_string(g.num_v()));
    if (g.num_v() > 64) throw Refusal("brute force supports at most 64 V-sites");
    std::uint64_t evals = brute_force_evaluations(g.num_v(), s_max);
    if (evals > opts.budget)
        throw Refusal("brute force needs " + std::to_string(evals) + " subset evaluations, budget is " +
                      std::to_string(opts.budget));
    BruteContext c;
    c.nu = g.num_u();
    c.nv = g.num_v();
    c.cap = opts.witness_cap;
    c.keep = opts.keep_witnesses;
    c.vnbr.resize(c.nv);
    for (int i = 0; i < c.nv; ++i) c.vnbr[i] = g.neighbors(c.nu + i);
    return c;
}

inline std::uint64_t next_combination(std::uint64_t x) {
    std::uint64_t c = x & (~x + 1);
    std::uint64_t r = x + c;
    return (((r ^ x) >> 2) / c) | r;
}

class Coverage {
public:
    explicit Coverage(const BruteContext& c) : c_(c), count_(c.nu, 0) {}
    void add(int i) {
        for (int u : c_.vnbr[i])
            if (count_[u]++ == 0) ++covered_;
    }
    void remove(int i) {
        for (int u : c_.vnbr[i])
            if (--count_[u] == 0) --covered_;
    }
    void add_bits(std::uint64_t x) {
        for (; x; x &= x - 1) add(__builtin_ctzll(x));
    }
    void remove_bits(std::uint64_t x) {
        for (; x; x &= x - 1) remove(__builtin_ctzll(x));
    }
    void move(std::uint64_t from, std::uint64_t to) {
        std::uint64_t diff = from ^ to;
        remove_bits(from & diff);
        add_bits(to & diff);
    }
    int covered() const { return covered_; }

private:
    const BruteContext& c_;
    std::vector<int> count_;
    int covered_ = 0;
};

void record(const BruteContext& c, SizeResult& r, int cost, std::uint64_t mask) {
    if (cost < r.best) {
        r.best = cost;
        r.count = 0;
        r.witnesses.clear();
        r.truncated = false;
    }
    if (cost != r.best) return;
    ++r.count;
    if (!c.keep) return;
    if (r.witnesses.size() < c.cap) {
        VSet w;
        for (std::uint64_t x = mask; x; x &= x - 1) w.push_back(c.nu + __builtin_ctzll(x));
        r.witnesses.push_back(std::move(w));
    } else {
        r.truncated = true;
    }
}

// All s-subsets whose largest V index is e.
SizeResult scan_shard(const BruteContext& c, int s, int e) {
    SizeResult r;
    Coverage cov(c);
    std::uint64_t top = std::uint64_t{1} << e;
    cov.add(e);
    int t = s - 1;
    if (t == 0) {
        record(c, r, cov.covered() - s, top);
        return r;
    }
    std::uint64_t x = (std::uint64_t{1} << t) - 1;
    cov.add_bits(x);
    while (true) {
        record(c, r, cov.covered() - s, x | top);
        std::uint64_t next = next_combination(x);
        if (next >= top) break;
        cov.move(x, next);
        x = next;
    }
    return r;
}

void merge_into(const BruteContext& c, SizeResult& total, SizeResult&& part) {
    if (part.count == 0) return;
    if (part.best < total.best) {
        total.best = part.best;
        total.count = 0;
        total.witnesses.clear();
        total.truncated = false;
    }
    if (part.best != total.best) return;
    total.count += part.count;
    total.truncated = total.truncated || part.truncated;
    for (auto& w : part.witnesses) {
        if (total.witnesses.size() < c.cap)
            total.witnesses.push_back(std::move(w));
        else
            total.truncated = true;
    }
}

IsoperimetricProfile assemble(int s_max, std::vector<SizeResult>& per_size) {
    IsoperimetricProfile p;
    p.delta.assign(s_max + 1, 0);
    p.provenance.assign(s_max + 1, "brute-force");
    p.witnesses.assign(s_max + 1, {});
    p.optimal_count.assign(s_max + 1, 0);
    p.truncated.assign(s_max + 1, 0);
    p.witnesses[0] = {VSet{}};
    p.optimal_count[0] = 1;
    for (int s = 1; s <= s_max; ++s) {
        p.delta[s] = per_size[s].best;
        p.optimal_count[s] = per_size[s].count;
        p.witnesses[s] = std::move(per_size[s].witnesses);
        p.truncated[s] = per_size[s].truncated;
    }
    return p;
}

}  // namespace

IsoperimetricProfile brute_force_profile(const BipartiteGraph& g, int s_max, const BruteForceOptions& opts) {
    BruteContext c = make_context(g, s_max, opts);
    std::vector<SizeResult> per_size(s_max + 1);
    for (int s = 1; s <= s_max; ++s) {
        int shards = c.nv - (s - 1);
        std::vector<SizeResult> parts(shards);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(opts.threads))
        for (int k = 0; k < shards; ++k) parts[k] = scan_shard(c, s, s - 1 + k);
        for (auto& part : parts) merge_into(c, per_size[s], std::move(part));
    }
    return assemble(s_max, per_size);
}

IsoperimetricProfile brute_force_profile_serial(const BipartiteGraph& g, int s_max, const BruteForceOptions& opts) {
    BruteContext c = make_context(g, s_max, opts);
    std::vector<SizeResult> per_size(s_max + 1);
    for (int s = 1; s <= s_max; ++s) {
        Coverage cov(c);
        std::uint64_t x = s == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << s) - 1;
        std::uint64_t end = c.nv == 64 ? 0 : std::uint64_t{1} << c.nv;
        cov.add_bits(x);
        while (true) {
            record(c, per_size[s], cov.covered() - s, x);
            if (s == c.nv) break;
            std::uint64_t next = next_combination(x);
            if ((end && next >= end) || next < x) break;
            cov.move(x, next);
            x = next;
        }
    }
    return assemble(s_max, per_size);
}

// ---------------------------------------------------------------- closed forms

int torus_lattice_delta(std::int64_t s) {
    if (s < 0) throw InvalidArgument("size must be non-negative");
    if (s == 0) return 0;
    std::int64_t c = static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(static_cast<double>(s))));
    while (c * c < 4 * s) ++c;
    while (c > 0 && (c - 1) * (c - 1) >= 4 * s) --c;
    return static_cast<int>(c + 1);
}

int doubled_lattice_ell(std::int64_t s) {
    if (s < 1) throw InvalidArgument("size must be positive");
    std::int64_t l = 1;
    while ((l + 1) * (l + 1) + l * l <= s) ++l;
    return static_cast<int>(l);
}

int doubled_lattice_delta(std::int64_t s) {
    if (s < 0) throw InvalidArgument("size must be non-negative");
    if (s == 0) return 0;
    std::int64_t l = doubled_lattice_ell(s);
    std::int64_t i = s - (l * l + (l - 1) * (l - 1));
    std::int64_t base = 4 * l;
    if (i == 0) return static_cast<int>(base);
    if (i < l) return static_cast<int>(base + 1);
    if (i < 2 * l) return static_cast<int>(base + 2);
    if (i < 3 * l) return static_cast<int>(base + 3);
    return static_cast<int>(base + 4);
}

std::uint64_t psi_hypercube(int d, int r, std::uint64_t k) {
    if (d < 0 || r < 0) throw InvalidArgument("psi: negative argument");
    if (k > binomial(d, r)) throw InvalidArgument("psi: k exceeds the size of level r");
    if (k == 0 || r >= d) return 0;
    if (r == 0) return static_cast<std::uint64_t>(d);
    std::uint64_t head = binomial(d - 1, r - 1);
    if (k <= head) return psi_hypercube(d - 1, r - 1, k);
    return binomial(d - 1, r) + psi_hypercube(d - 1, r, k - head);
}

std::uint64_t hypercube_delta(int d, std::uint64_t s) {
    if (d < 0 || d > 40) throw InvalidArgument("hypercube dimension out of range");
    if (s > (std::uint64_t{1} << d)) throw InvalidArgument("size exceeds 2^d");
    if (s == 0) return 0;
    std::uint64_t below = 0;
    int r = 0;
    while (below + binomial(d, r) < s) below += binomial(d, r++);
    std::uint64_t k = s - below;
    return binomial(d, r) + psi_hypercube(d, r, k) - k;
}

std::vector<std::uint32_t> harper_numbering(int d, std::size_t length) {
    if (d < 0 || d > 24) throw InvalidArgument("harper_numbering: dimension out of range");
    std::size_t n = std::size_t{1} << d;
    if (length > n) throw InvalidArgument("harper_numbering: length exceeds 2^d");
    std::vector<std::uint32_t> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<std::uint32_t>(i);
    std::sort(w.begin(), w.end(), [](std::uint32_t a, std::uint32_t b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return a > b;
    });
    w.resize(length);
    return w;
}

std::string ClosedFormFamily::name() const {
    switch (kind) {
        case Kind::torus: return lattice ? "torus-lattice" : "torus";
        case Kind::doubled_torus: return lattice ? "doubled-torus-lattice" : "doubled-torus";
        case Kind::tree_like: return "tree-like";
        case Kind::doubled_tree_like: return "doubled-tree-like";
        case Kind::hypercube: return "hypercube";
    }
    return {};
}

std::optional<int> ClosedFormFamily::window() const {
    switch (kind) {
        case Kind::torus:
            if (lattice) return m * n / 2;
            return (std::min(m, n) - 1) / 4;
        case Kind::doubled_torus:
            if (lattice) return m * n;
            return (std::min(m, n) - 1) / 4;
        case Kind::tree_like: return (girth - 1) / 2;
        case Kind::doubled_tree_like: return girth - 2;
        case Kind::hypercube: return 1 << dim;
    }
    return std::nullopt;
}

int closed_form_profile(const ClosedFormFamily& f, int s) {
    auto w = f.window();
    if (s < 0 || (w && s > *w))
        throw InvalidArgument("closed form " + f.name() + ": size " + std::to_string(s) +
                              " outside the validity window [0, " + std::to_string(w.value_or(0)) + "]");
    switch (f.kind) {
        case ClosedFormFamily::Kind::torus: return torus_lattice_delta(s);
        case ClosedFormFamily::Kind::doubled_torus: return doubled_lattice_delta(s);
        case ClosedFormFamily::Kind::tree_like: return s == 0 ? 0 : (f.degree - 2) * s + 1;
        case ClosedFormFamily::Kind::doubled_tree_like: return s == 0 ? 0 : (f.degree - 2) * s + 2;
        case ClosedFormFamily::Kind::hypercube: return static_cast<int>(hypercube_delta(f.dim, s));
    }
    return 0;
}

namespace {

std::optional<int> regular_degree(const SimpleGraph& g) {
    if (g.n == 0) return std::nullopt;
    int d = static_cast<int>(g.adj[0].size());
    for (const auto& a : g.adj)
        if (static_cast<int>(a.size()) != d) return std::nullopt;
    return d;
}

}  // namespace

std::optional<ClosedFormFamily> tree_like_family(const BipartiteGraph& g) {
    auto rep = validate(g, g.num_sites());
    if (!rep.ok() || !rep.regular_degree || !rep.girth) return std::nullopt;
    ClosedFormFamily f;
    f.kind = ClosedFormFamily::Kind::tree_like;
    f.degree = *rep.regular_degree;
    f.girth = *rep.girth;
    return f;
}

std::optional<ClosedFormFamily> closed_form_family(const GraphFamilySpec& spec, bool lattice) {
    using K = GraphFamilySpec::Kind;
    ClosedFormFamily f;
    f.lattice = lattice;
    if (spec.kind == K::even_torus) {
        f.kind = ClosedFormFamily::Kind::torus;
        f.m = spec.a;
        f.n = spec.b;
        return f;
    }
    if (spec.kind == K::hypercube) {
        if (spec.a < 2) return std::nullopt;
        f.kind = ClosedFormFamily::Kind::hypercube;
        f.dim = spec.a - 1;
        return f;
    }
    if (spec.kind == K::doubled && spec.base) {
        const auto& b = *spec.base;
        if (b.kind == K::even_torus) {
            f.kind = ClosedFormFamily::Kind::doubled_torus;
            f.m = b.a;
            f.n = b.b;
            return f;
        }
        if (b.kind == K::hypercube) {
            f.kind = ClosedFormFamily::Kind::hypercube;
            f.dim = b.a;
            return f;
        }
        auto base = simple_from_spec(b);
        auto d = regular_degree(base);
        auto l = girth(base, base.n);
        if (!d || !l) return std::nullopt;
        f.kind = ClosedFormFamily::Kind::doubled_tree_like;
        f.degree = *d;
        f.girth = *l;
        return f;
    }
    return tree_like_family(build_family(spec));
}

// ---------------------------------------------------------------- torus geometry

std::pair<int, int> torus_dims(const BipartiteGraph& torus) {
    int m = 0, n = 0;
    for (const auto& l : torus.labels()) {
        if (l.size() != 2) throw InvalidArgument("graph is not a torus (labels are not (i,j))");
        m = std::max(m, l[0] + 1);
        n = std::max(n, l[1] + 1);
    }
    if (m * n != torus.num_sites()) throw InvalidArgument("graph is not a torus");
    return {m, n};
}

namespace {

int wrap_delta(int d, int m) {
    d = ((d % m) + m) % m;
    return d > m / 2 ? d - m : d;
}

std::vector<int> closed_set(const BipartiteGraph& g, const VSet& a) {
    std::vector<int> s = a;
    auto nb = neighborhood(g, a);
    s.insert(s.end(), nb.begin(), nb.end());
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

bool lifts_to_plane(const BipartiteGraph& torus, const VSet& a) {
    auto [m, n] = torus_dims(torus);
    auto s = closed_set(torus, a);
    std::map<int, std::pair<long, long>> pos;
    std::set<int> members(s.begin(), s.end());
    for (int root : s) {
        if (pos.count(root)) continue;
        pos[root] = {torus.label(root)[0], torus.label(root)[1]};
        std::deque<int> q{root};
        while (!q.empty()) {
            int p = q.front();
            q.pop_front();
            for (int r : torus.neighbors(p)) {
                if (!members.count(r)) continue;
                long di = wrap_delta(torus.label(r)[0] - torus.label(p)[0], m);
                long dj = wrap_delta(torus.label(r)[1] - torus.label(p)[1], n);
                std::pair<long, long> want{pos[p].first + di, pos[p].second + dj};
                auto it = pos.find(r);
                if (it == pos.end()) {
                    pos[r] = want;
                    q.push_back(r);
                } else if (it->second != want) {
                    return false;
                }
            }
        }
    }
    return true;
}

LatticeOptimality lattice_optimality(const BipartiteGraph& torus, const VSet& a) {
    auto [m, n] = torus_dims(torus);
    LatticeOptimality r;
    std::set<int> in_a(a.begin(), a.end());
    auto nb = neighborhood(torus, a);
    std::set<int> closed(a.begin(), a.end());
    closed.insert(nb.begin(), nb.end());
    for (int p : nb) {
        std::vector<int> hits;
        for (int q : torus.neighbors(p))
            if (in_a.count(q)) hits.push_back(q);
        switch (hits.size()) {
            case 1: ++r.n1; break;
            case 3: ++r.n3; break;
            case 4: ++r.n4; break;
            case 2: {
                int di = wrap_delta(torus.label(hits[1])[0] - torus.label(hits[0])[0], m);
                int dj = wrap_delta(torus.label(hits[1])[1] - torus.label(hits[0])[1], n);
                if (std::abs(di) == 1 && std::abs(dj) == 1)
                    ++r.n1100;
                else
                    ++r.n1010;
                break;
            }
            default: break;
        }
    }
    for (int p : closed)
        for (int q : torus.neighbors(p))
            if (!closed.count(q)) ++r.boundary_edges;
    r.wraps = !lifts_to_plane(torus, a);
    return r;
}

std::optional<Rational> regular_boundary_cost(const BipartiteGraph& g, const VSet& a) {
    if (g.num_sites() == 0) return std::nullopt;
    int d = g.degree(0);
    for (int i = 1; i < g.num_sites(); ++i)
        if (g.degree(i) != d) return std::nullopt;
    auto c = closed_set(g, a);
    std::vector<char> in(g.num_sites(), 0);
    for (int p : c) in[p] = 1;
    std::int64_t boundary = 0;
    for (int p : c)
        for (int q : g.neighbors(p))
            if (!in[q]) ++boundary;
    return Rational(boundary, d);
}

VSet spiral_numbering(const BipartiteGraph& torus, int start, int length) {
    auto [m, n] = torus_dims(torus);
    if (!torus.in_v(start)) throw InvalidArgument("spiral_numbering: start must be a V-site");
    if (length < 0 || length > torus.num_v()) throw InvalidArgument("spiral_numbering: bad length");
    std::vector<int> at(m * n, -1);
    for (int s = 0; s < torus.num_sites(); ++s) at[torus.label(s)[0] * n + torus.label(s)[1]] = s;
    int i0 = torus.label(start)[0], j0 = torus.label(start)[1];
    std::vector<std::pair<int, int>> tilted{{0, 0}};
    int rows = 1, cols = 1;
    while (static_cast<int>(tilted.size()) < length) {
        if (rows == cols) {
            for (int a = 0; a < rows; ++a) tilted.emplace_back(a, cols);
            ++cols;
        } else {
            for (int b = 0; b < cols; ++b) tilted.emplace_back(rows, b);
            ++rows;
        }
    }
    VSet order;
    VSet prefix;
    for (int k = 0; k < length; ++k) {
        auto [a, b] = tilted[k];
        int i = ((i0 + a + b) % m + m) % m;
        int j = ((j0 + a - b) % n + n) % n;
        int site = at[i * n + j];
        if (std::find(order.begin(), order.end(), site) != order.end())
            throw InvalidArgument("spiral_numbering: length " + std::to_string(length) +
                                  " exceeds the validity window (the spiral wraps)");
        order.push_back(site);
        prefix.insert(std::upper_bound(prefix.begin(), prefix.end(), site), site);
        if (set_cost(torus, prefix) != torus_lattice_delta(k + 1) || !lifts_to_plane(torus, prefix))
            throw InvalidArgument("spiral_numbering: length " + std::to_string(length) +
                                  " exceeds the validity window (prefix " + std::to_string(k + 1) +
                                  " is not lattice-optimal)");
    }
    return order;
}

// ---------------------------------------------------------------- progressions

ProfileSource profile_source(const IsoperimetricProfile& p) {
    return [p](int s) {
        if (s < 0 || s > p.s_max())
            throw InvalidArgument("profile has no entry for size " + std::to_string(s));
        return p.delta[s];
    };
}

ProfileSource profile_source(const ClosedFormFamily& f) {
    return [f](int s) { return closed_form_profile(f, s); };
}

Progression prefix_progression(const VSet& numbering, bool include_empty) {
    Progression p;
    VSet cur;
    if (include_empty) p.sets.push_back(cur);
    for (int s : numbering) {
        cur.insert(std::upper_bound(cur.begin(), cur.end(), s), s);
        p.sets.push_back(cur);
    }
    return p;
}

ProgressionFlags progression_check(const BipartiteGraph& g, const Progression& p, const Rational& alpha,
                                   int s_star, const ProfileSource& delta) {
    ProgressionFlags f;
    for (const auto& a : p.sets) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!g.in_v(a[i]) || (i > 0 && a[i] <= a[i - 1])) {
                f.problem = "member is not a sorted set of V-sites";
                return f;
            }
    }
    f.nested = true;
    for (std::size_t i = 0; i + 1 < p.sets.size(); ++i) {
        VSet sym;
        std::set_symmetric_difference(p.sets[i].begin(), p.sets[i].end(), p.sets[i + 1].begin(),
                                      p.sets[i + 1].end(), std::back_inserter(sym));
        if (sym.size() != 1) {
            f.problem = "step " + std::to_string(i) + " changes " + std::to_string(sym.size()) + " elements";
            f.nested = false;
            return f;
        }
        if (p.sets[i + 1].size() != p.sets[i].size() + 1) f.nested = false;
    }
    f.valid = true;
    try {
        Rational bound = Rational(delta(s_star)) - alpha * Rational(s_star);
        f.isoperimetric = true;
        f.alpha_bounded = true;
        for (const auto& a : p.sets) {
            int c = set_cost(g, a);
            int s = static_cast<int>(a.size());
            if (c != delta(s)) f.isoperimetric = false;
            if (Rational(c) - alpha * Rational(s) > bound) f.alpha_bounded = false;
        }
    } catch (const InvalidArgument& e) {
        f.isoperimetric = false;
        f.alpha_bounded = false;
        f.problem = e.what();
    }
    return f;
}

// ---------------------------------------------------------------- doubled torus seeds

std::string to_string(SeedType t) {
    switch (t) {
        case SeedType::I: return "I";
        case SeedType::II: return "II";
        case SeedType::IIIa: return "IIIa";
        case SeedType::IIIb: return "IIIb";
        case SeedType::IV: return "IV";
    }
    return {};
}

SeedType parse_seed_type(const std::string& text) {
    for (SeedType t : {SeedType::I, SeedType::II, SeedType::IIIa, SeedType::IIIb, SeedType::IV})
        if (to_string(t) == text) return t;
    if (text == "III") return SeedType::IIIa;
    throw InvalidArgument("unknown seed type '" + text + "'");
}

std::vector<Cell> seed_cells(SeedType t) {
    switch (t) {
        case SeedType::I: return {{0, 0}};
        case SeedType::II: return {{-1, 0}, {0, -1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}};
        case SeedType::IIIa: return {{0, 0}, {0, 1}};
        case SeedType::IIIb: return {{0, 0}, {1, 1}};
        case SeedType::IV: return {{0, 0}, {0, 1}, {1, 0}};
    }
    return {};
}

std::vector<Cell> inflate(const std::vector<Cell>& cells, int k) {
    std::set<Cell> cur(cells.begin(), cells.end());
    for (int step = 0; step < k; ++step) {
        std::set<Cell> next = cur;
        for (auto [i, j] : cur)
            for (auto [di, dj] : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) next.insert({i + di, j + dj});
        cur = std::move(next);
    }
    return {cur.begin(), cur.end()};
}

int seed_ell(SeedType t, int k) { return t == SeedType::II ? k + 2 : k + 1; }

namespace {

int lattice_vertex_cost(const std::set<Cell>& a) {
    std::set<Cell> closed = a;
    for (auto [i, j] : a)
        for (auto [di, dj] : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) closed.insert({i + di, j + dj});
    return static_cast<int>(closed.size() - a.size());
}

void require_fits(const std::vector<Cell>& cells, int m, int n) {
    auto closed = inflate(cells, 1);
    int imin = INT_MAX, imax = INT_MIN, jmin = INT_MAX, jmax = INT_MIN;
    for (auto [i, j] : closed) {
        imin = std::min(imin, i);
        imax = std::max(imax, i);
        jmin = std::min(jmin, j);
        jmax = std::max(jmax, j);
    }
    if (imax - imin + 1 > m || jmax - jmin + 1 > n)
        throw InvalidArgument("wrap-around: the set and its neighbourhood span " + std::to_string(imax - imin + 1) +
                              "x" + std::to_string(jmax - jmin + 1) + " cells on a " + std::to_string(m) + "x" +
                              std::to_string(n) + " torus");
}

VSet cells_to_sites(const std::vector<Cell>& cells, int m, int n) {
    VSet s;
    for (auto [i, j] : cells) s.push_back(m * n + (((i % m) + m) % m) * n + (((j % n) + n) % n));
    std::sort(s.begin(), s.end());
    return s;
}

BipartiteGraph doubled_torus(int m, int n) {
    auto base = torus_graph(m, n);
    return double_graph(base);
}

bool extend_progression(const std::set<Cell>& cur, const std::vector<Cell>& pending, std::uint64_t used,
                        std::unordered_set<std::uint64_t>& dead, std::vector<Cell>& order) {
    if (order.size() == pending.size()) return true;
    if (dead.count(used)) return false;
    int target = doubled_lattice_delta(static_cast<std::int64_t>(cur.size()) + 1);
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (used & (std::uint64_t{1} << i)) continue;
        std::set<Cell> next = cur;
        next.insert(pending[i]);
        if (lattice_vertex_cost(next) != target) continue;
        order.push_back(pending[i]);
        if (extend_progression(next, pending, used | (std::uint64_t{1} << i), dead, order)) return true;
        order.pop_back();
    }
    dead.insert(used);
    return false;
}

}  // namespace

SeedSet seed_set_doubled_torus(SeedType t, int k, int m, int n) {
    if (k < 0) throw InvalidArgument("inflation radius must be non-negative");
    SeedSet s;
    s.type = t;
    s.k = k;
    s.ell = seed_ell(t, k);
    s.cells = inflate(seed_cells(t), k);
    require_fits(s.cells, m, n);
    s.sites = cells_to_sites(s.cells, m, n);
    s.cost = set_cost(doubled_torus(m, n), s.sites);
    s.closed_form = doubled_lattice_delta(static_cast<std::int64_t>(s.cells.size()));
    return s;
}

ConnectingProgression connecting_progression(char which, int ell, int m, int n) {
    ConnectingProgression c;
    c.which = which;
    c.ell = ell;
    std::vector<Cell> from, to;
    switch (which) {
        case 'a':
            if (ell < 2) throw InvalidArgument("progression (a) needs l >= 2");
            c.from = SeedType::I;
            c.to = SeedType::II;
            from = inflate(seed_cells(SeedType::I), ell - 1);
            to = inflate(seed_cells(SeedType::II), ell - 2);
            break;
        case 'b':
            if (ell < 2) throw InvalidArgument("progression (b) needs l >= 2");
            c.from = SeedType::II;
            c.to = SeedType::IIIa;
            from = inflate(seed_cells(SeedType::II), ell - 2);
            to = inflate(seed_cells(SeedType::IIIa), ell - 1);
            break;
        case 'c':
            if (ell < 1) throw InvalidArgument("progression (c) needs l >= 1");
            c.from = SeedType::IIIa;
            c.to = SeedType::IV;
            from = inflate(seed_cells(SeedType::IIIa), ell - 1);
            to = inflate(seed_cells(SeedType::IV), ell - 1);
            break;
        case 'd':
            if (ell < 1) throw InvalidArgument("progression (d) needs l >= 1");
            c.from = SeedType::IV;
            c.to = SeedType::I;
            from = inflate(seed_cells(SeedType::IV), ell - 1);
            to = inflate(seed_cells(SeedType::I), ell);
            break;
        default: throw InvalidArgument(std::string("unknown progression kind '") + which + "'");
    }
    require_fits(to, m, n);
    std::set<Cell> start(from.begin(), from.end());
    std::vector<Cell> pending;
    for (const auto& x : to)
        if (!start.count(x)) pending.push_back(x);
    if (start.size() + pending.size() != to.size()) throw InvalidArgument("connecting progression: sets are not nested");
    if (pending.size() > 63) throw Refusal("connecting progression: too many cells to add");
    std::unordered_set<std::uint64_t> dead;
    std::vector<Cell> order;
    c.found = extend_progression(start, pending, 0, dead, order);
    if (!c.found) return c;
    auto g = doubled_torus(m, n);
    std::vector<Cell> cur = from;
    c.progression.sets.push_back(cells_to_sites(cur, m, n));
    for (const auto& x : order) {
        cur.push_back(x);
        c.progression.sets.push_back(cells_to_sites(cur, m, n));
    }
    c.isoperimetric = true;
    for (const auto& a : c.progression.sets)
        if (set_cost(g, a) != doubled_lattice_delta(static_cast<std::int64_t>(a.size()))) c.isoperimetric = false;
    return c;
}

SeedNumbering seed_numbering_doubled_torus(SeedType t, int k, int m, int n) {
    SeedNumbering out;
    out.set = seed_set_doubled_torus(t, k, m, n);
    for (char which : {'a', 'b', 'c', 'd'}) {
        if ((which == 'a' || which == 'b') && out.set.ell < 2) continue;
        try {
            out.progressions.push_back(connecting_progression(which, out.set.ell, m, n));
        } catch (const InvalidArgument&) {
            // the connecting sets do not fit on this torus
        }
    }
    return out;
}

std::string profile_csv(const IsoperimetricProfile& p) {
    std::ostringstream o;
    o << "s,delta,provenance,witness_count\n";
    for (int s = 0; s <= p.s_max(); ++s)
        o << s << ',' << p.delta[s] << ',' << p.provenance[s] << ',' << p.optimal_count[s] << '\n';
    return o.str();
}

}  // namespace hcmeta

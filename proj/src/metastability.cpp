#include "hcmeta/metastability.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <boost/math/distributions/chi_squared.hpp>

#include "hcmeta/parallel.hpp"

namespace hcmeta {

// ---------------------------------------------------------------- sources

bool IsoperimetricSource::has(int s) const {
    if (s < 0) return false;
    if (brute && s <= brute->s_max()) return true;
    if (!family) return false;
    auto w = family->window();
    return !w || s <= *w;
}

int IsoperimetricSource::delta(int s) const {
    if (brute && s >= 0 && s <= brute->s_max()) return brute->delta[s];
    if (family) return closed_form_profile(*family, s);
    throw InvalidArgument("no isoperimetric data for size " + std::to_string(s));
}

std::string IsoperimetricSource::provenance(int s) const {
    if (brute && s >= 0 && s <= brute->s_max()) return "brute-force";
    if (family) return "closed-form:" + family->name();
    return "none";
}

ProfileSource IsoperimetricSource::as_function() const {
    return [src = *this](int s) { return src.delta(s); };
}

IsoperimetricSource make_source(const BipartiteGraph& g, const std::optional<GraphFamilySpec>& spec,
                                const SourceOptions& opts) {
    IsoperimetricSource src;
    if (g.num_v() <= 64) {
        int s_max = 0;
        while (s_max < g.num_v() && brute_force_evaluations(g.num_v(), s_max + 1) <= opts.budget) ++s_max;
        if (s_max > 0) {
            BruteForceOptions bo;
            bo.budget = opts.budget;
            bo.threads = opts.threads;
            src.brute = brute_force_profile(g, s_max, bo);
        }
    }
    if (spec)
        src.family = closed_form_family(*spec, opts.lattice_closed_form);
    else
        src.family = tree_like_family(g);
    return src;
}

// ---------------------------------------------------------------- critical size

Rational g_value(int delta, int s, const Rational& alpha) { return Rational(delta) - alpha * Rational(s - 1); }

CriticalAnalysis critical_analysis(const ProfileSource& delta, const Rational& alpha, int search_bound,
                                   std::optional<int> num_u) {
    if (alpha <= Rational(0) || alpha >= Rational(1)) throw InvalidArgument("alpha must lie in (0,1)");
    CriticalAnalysis ca;
    ca.alpha = alpha;
    ca.delta.push_back(0);
    int best_s = 0;
    Rational best;
    bool found = false;
    for (int s = 1; s <= search_bound; ++s) {
        int d;
        try {
            d = delta(s);
        } catch (const InvalidArgument& e) {
            throw Refusal("critical_analysis: no s with Delta(s) <= alpha s found up to s = " + std::to_string(s - 1) +
                          " (" + e.what() + ")");
        }
        ca.delta.push_back(d);
        Rational gv = g_value(d, s, alpha);
        if (best_s == 0 || gv > best) {
            best = gv;
            best_s = s;
        }
        if (s > best_s && Rational(d) <= alpha * Rational(s)) {
            ca.s_tilde = s;
            found = true;
            break;
        }
    }
    if (!found)
        throw Refusal("critical_analysis: no s with Delta(s) <= alpha s within the search bound " +
                      std::to_string(search_bound));
    ca.s_star = best_s;
    ca.g_star = best;
    for (int s = 0; s <= ca.s_tilde; ++s)
        if (g_value(ca.delta[s], s, alpha) == best) ca.maximizers.push_back(s);
    ca.unique_max = ca.maximizers.size() == 1;
    if (num_u) ca.t_star = *num_u - ca.s_star - ca.delta[ca.s_star];
    return ca;
}

CriticalAnalysis critical_analysis(const IsoperimetricSource& src, const Rational& alpha, int search_bound,
                                   std::optional<int> num_u) {
    return critical_analysis(src.as_function(), alpha, search_bound, num_u);
}

namespace {

std::int64_t ceil_rational(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r > Rational(0)) ++q;
    return q;
}

std::int64_t floor_rational(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r < Rational(0)) --q;
    return q;
}

bool is_integer(const Rational& r) { return r.denominator() == 1; }

}  // namespace

int default_search_bound(const Rational& alpha, const std::optional<ClosedFormFamily>& family) {
    Rational eight = Rational(8) / (alpha * alpha);
    std::int64_t bound = ceil_rational(eight) + 1;
    if (family && family->kind == ClosedFormFamily::Kind::doubled_torus) {
        Rational t = Rational(2) / alpha;
        bound = std::max<std::int64_t>(bound, ceil_rational((t + 1) * (t + 1) + t * t) + 1);
    }
    return static_cast<int>(bound);
}

int default_kappa(const Rational& alpha) { return static_cast<int>(ceil_rational(Rational(1) / alpha)) - 1; }

LemmaCriticalSize torus_critical_size(const Rational& alpha) {
    LemmaCriticalSize l;
    int ell = static_cast<int>(ceil_rational(Rational(1) / alpha));
    l.ell_star = {ell};
    l.s_star = {ell * (ell - 1) + 1};
    l.generic = !is_integer(Rational(2) / alpha);
    return l;
}

LemmaCriticalSize doubled_torus_critical_size(const Rational& alpha) {
    LemmaCriticalSize l;
    Rational inv = Rational(1) / alpha;
    std::int64_t fl = floor_rational(inv);
    Rational frac = inv - Rational(fl);
    std::vector<int> ells;
    if (frac < Rational(1, 2)) ells = {static_cast<int>(fl)};
    if (frac > Rational(1, 2)) ells = {static_cast<int>(fl + 1)};
    if (frac == Rational(1, 2)) ells = {static_cast<int>(fl), static_cast<int>(fl + 1)};
    l.generic = !is_integer(Rational(4) / alpha);
    for (int e : ells) {
        int base = e * e + (e - 1) * (e - 1);
        if (Rational(e) >= inv) {
            l.ell_star.push_back(e);
            l.s_star.push_back(base + e);
            if (l.regime == 0) l.regime = 1;
        }
        if (Rational(e) <= inv) {
            l.ell_star.push_back(e);
            l.s_star.push_back(base + 3 * e);
            if (l.regime == 0) l.regime = 2;
        }
    }
    return l;
}

// ---------------------------------------------------------------- dominance

DominanceSets dominance_sets(const ConfigurationSpace& space, std::size_t a, const Rational& alpha) {
    const auto& g = space.graph();
    Rational ha = height(g, space.state(a), alpha);
    DominanceSets d;
    for (std::size_t x = 0; x < space.size(); ++x) {
        if (x == a) continue;
        Rational hx = height(g, space.state(x), alpha);
        if (hx <= ha) d.j.push_back(x);
        if (hx < ha) d.j_minus.push_back(x);
    }
    return d;
}

// ---------------------------------------------------------------- gate

namespace {

Mask to_mask(const VSet& a) {
    Mask m = 0;
    for (int s : a) m |= bit(s);
    return m;
}

VSet to_vset(Mask m) { return occupied_sites(m); }

Mask neighbours_of(const BipartiteGraph& g, Mask a) {
    Mask n = 0;
    for (Mask r = a; r; r &= r - 1) n |= g.neighbor_mask(__builtin_ctzll(r));
    return n;
}

int mask_cost(const BipartiteGraph& g, Mask a) { return popcount(neighbours_of(g, a)) - popcount(a); }

struct Optimality {
    const BipartiteGraph& g;
    const IsoperimetricSource& src;
    bool operator()(Mask a) const { return mask_cost(g, a) == src.delta(popcount(a)); }
};

void require_complete(const IsoperimetricSource& src, int s, const char* what) {
    if (!src.brute || s > src.brute->s_max())
        throw Refusal(std::string("build_gate: no exhaustive enumeration of ") + what + " (size " +
                      std::to_string(s) + ")");
    if (src.brute->truncated[s])
        throw Refusal(std::string("build_gate: witness list for ") + what + " (size " + std::to_string(s) +
                      ") was truncated; completeness is required");
}

}  // namespace

std::vector<Mask> CriticalGate::q() const {
    std::vector<Mask> out;
    for (const auto& t : transitions) out.push_back(t.first);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Mask> CriticalGate::q_star() const {
    std::vector<Mask> out;
    for (const auto& t : transitions) out.push_back(t.second);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<std::uint64_t> closed_form_gate_count(const GraphFamilySpec& spec, const Rational& alpha,
                                                    std::string* name, bool* conditional) {
    using K = GraphFamilySpec::Kind;
    auto set = [&](const std::string& n, bool c) {
        if (name) *name = n;
        if (conditional) *conditional = c;
    };
    std::uint64_t m = spec.a, n = spec.b;
    switch (spec.kind) {
        case K::even_torus: {
            auto l = torus_critical_size(alpha);
            set("4mn l*", false);
            return 4 * m * n * static_cast<std::uint64_t>(l.ell_star[0]);
        }
        case K::even_cycle: set("2|V|", false); return static_cast<std::uint64_t>(spec.a);
        case K::cyclic_ladder: set("3|V|", false); return 3 * static_cast<std::uint64_t>(spec.a);
        case K::doubled: {
            if (!spec.base) return std::nullopt;
            const auto& b = *spec.base;
            if (b.kind == K::even_cycle) {
                set("3|V|", false);
                return 3 * static_cast<std::uint64_t>(b.a);
            }
            if (b.kind == K::even_torus) {
                auto l = doubled_torus_critical_size(alpha);
                if (l.s_star.size() != 1) return std::nullopt;
                std::uint64_t bm = b.a, bn = b.b, e = l.ell_star[0];
                if (l.regime == 1) {
                    set("24mn l*", true);
                    return 24 * bm * bn * e;
                }
                set("8mn(l*+1)", true);
                return 8 * bm * bn * (e + 1);
            }
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

std::pair<std::vector<VSet>, std::vector<VSet>> torus_gate_characterization(const BipartiteGraph& torus, int ell) {
    if (ell < 2) throw InvalidArgument("torus characterisation needs l* >= 2");
    auto [m, n] = torus_dims(torus);
    std::vector<int> at(m * n);
    for (int s = 0; s < torus.num_sites(); ++s) at[torus.label(s)[0] * n + torus.label(s)[1]] = s;
    auto site = [&](int i0, int j0, int a, int b) {
        int i = ((i0 + a + b) % m + m) % m;
        int j = ((j0 + a - b) % n + n) % n;
        return at[i * n + j];
    };
    std::set<VSet> fa, fb;
    for (int origin : torus.v_sites()) {
        int i0 = torus.label(origin)[0], j0 = torus.label(origin)[1];
        for (int orient = 0; orient < 2; ++orient) {
            int rows = orient == 0 ? ell - 1 : ell;
            int cols = orient == 0 ? ell : ell - 1;
            VSet rect;
            for (int a = 0; a < rows; ++a)
                for (int b = 0; b < cols; ++b) rect.push_back(site(i0, j0, a, b));
            std::sort(rect.begin(), rect.end());
            fa.insert(rect);
            std::vector<std::pair<int, int>> extras;
            if (orient == 0)
                for (int b = 0; b < cols; ++b) extras.insert(extras.end(), {{-1, b}, {rows, b}});
            else
                for (int a = 0; a < rows; ++a) extras.insert(extras.end(), {{a, -1}, {a, cols}});
            for (auto [a, b] : extras) {
                VSet with = rect;
                with.push_back(site(i0, j0, a, b));
                std::sort(with.begin(), with.end());
                fb.insert(with);
            }
        }
    }
    return {{fa.begin(), fa.end()}, {fb.begin(), fb.end()}};
}

CriticalGate build_gate(const BipartiteGraph& g, const CriticalAnalysis& ca, const IsoperimetricSource& src,
                        int kappa, const std::optional<GraphFamilySpec>& spec) {
    if (!g.fits_mask()) throw Refusal("build_gate: configurations need at most 64 sites");
    if (kappa < 0) throw InvalidArgument("kappa must be non-negative");
    CriticalGate gate;
    gate.s_star = ca.s_star;
    gate.kappa = kappa;
    int s = ca.s_star;
    require_complete(src, s - 1, "family A");
    require_complete(src, s + kappa, "family C");
    Optimality optimal{g, src};
    gate.family_a = src.brute->witnesses[s - 1];
    gate.family_c = src.brute->witnesses[s + kappa];

    // Optimal sets with sizes in [s*, s*+kappa-1] from which a progression staying in that
    // band reaches C.
    std::unordered_set<Mask> band;
    std::unordered_set<Mask> c_set;
    std::deque<Mask> queue;
    for (const auto& c : gate.family_c) {
        c_set.insert(to_mask(c));
        queue.push_back(to_mask(c));
    }
    Mask vmask = g.v_mask();
    while (!queue.empty()) {
        Mask x = queue.front();
        queue.pop_front();
        for (Mask r = vmask; r; r &= r - 1) {
            Mask y = x ^ (r & (~r + 1));
            int size = popcount(y);
            if (size < s || size > s + kappa - 1) continue;
            if (band.count(y) || !optimal(y)) continue;
            band.insert(y);
            queue.push_back(y);
        }
    }
    std::unordered_set<Mask> a_set;
    for (const auto& a : gate.family_a) a_set.insert(to_mask(a));
    std::set<Mask> b_masks;
    for (Mask a : a_set)
        for (Mask r = vmask & ~a; r; r &= r - 1) {
            Mask b = a | (r & (~r + 1));
            bool reaches = kappa == 0 ? c_set.count(b) > 0 : band.count(b) > 0;
            if (reaches && optimal(b)) b_masks.insert(b);
        }
    Mask umask = g.u_mask();
    for (Mask b : b_masks) {
        gate.family_b.push_back(to_vset(b));
        Mask nb = neighbours_of(g, b);
        for (Mask r = b; r; r &= r - 1) {
            Mask a = b & ~(r & (~r + 1));
            if (!a_set.count(a)) continue;
            Mask fresh = nb & ~neighbours_of(g, a);
            gate.count += static_cast<std::uint64_t>(popcount(fresh));
            Mask y = a | (umask & ~nb);
            for (Mask w = fresh; w; w &= w - 1) gate.transitions.emplace_back(y | (w & (~w + 1)), y);
        }
    }
    std::sort(gate.transitions.begin(), gate.transitions.end());
    gate.transitions.erase(std::unique(gate.transitions.begin(), gate.transitions.end()), gate.transitions.end());
    if (spec) {
        gate.closed_form_count =
            closed_form_gate_count(*spec, ca.alpha, &gate.closed_form_name, &gate.conditional_on_conjecture);
        if (spec->kind == GraphFamilySpec::Kind::even_torus) {
            int ell = torus_critical_size(ca.alpha).ell_star[0];
            if (ell >= 2 && ell * (ell - 1) + 1 == ca.s_star) {
                auto [fa, fb] = torus_gate_characterization(g, ell);
                auto sorted = [](std::vector<VSet> v) {
                    std::sort(v.begin(), v.end());
                    return v;
                };
                gate.characterization_ok = sorted(gate.family_a) == fa && sorted(gate.family_b) == fb;
            }
        }
    }
    return gate;
}

// ---------------------------------------------------------------- predictions

CrossoverPrediction crossover_prediction(const CriticalAnalysis& ca, const CriticalGate* gate,
                                         const ModelParams& params) {
    CrossoverPrediction p;
    int d = ca.delta.at(ca.s_star);
    p.exponent = {d, -(ca.s_star - 1)};
    p.value = p.exponent.value(ca.alpha);
    if (gate && gate->count > 0) {
        p.log_sharp = (d + ca.s_star - 1) * params.log_lambda - (ca.s_star - 1) * params.log_lambda_bar -
                      std::log(static_cast<double>(gate->count));
        p.sharp = std::exp(*p.log_sharp);
    }
    return p;
}

// ---------------------------------------------------------------- hypotheses

std::string to_string(Status s) {
    switch (s) {
        case Status::verified: return "verified";
        case Status::refuted: return "refuted";
        case Status::exhausted_budget: return "exhausted-budget";
        case Status::closed_form: return "closed-form";
        case Status::not_applicable: return "not-applicable";
        case Status::inconclusive: return "inconclusive";
    }
    return {};
}

namespace {

enum class Search { found, impossible, budget };

// Depth-first search for a nested isoperimetric extension of `start` up to `target` elements.
class NumberingSearch {
public:
    NumberingSearch(const BipartiteGraph& g, const IsoperimetricSource& src, std::uint64_t budget)
        : g_(g), src_(src), budget_(budget) {}

    Search extend(Mask start, int target) {
        dead_.clear();
        nodes_ = 0;
        exhausted_ = false;
        bool ok = dfs(start, target);
        if (ok) return Search::found;
        return exhausted_ ? Search::budget : Search::impossible;
    }

private:
    bool dfs(Mask a, int target) {
        int size = popcount(a);
        if (size >= target) return true;
        if (dead_.count(a)) return false;
        if (++nodes_ > budget_) {
            exhausted_ = true;
            return false;
        }
        int want = src_.delta(size + 1);
        for (Mask r = g_.v_mask() & ~a; r; r &= r - 1) {
            Mask b = a | (r & (~r + 1));
            if (mask_cost(g_, b) != want) continue;
            if (dfs(b, target)) return true;
            if (exhausted_) return false;
        }
        dead_.insert(a);
        return false;
    }

    const BipartiteGraph& g_;
    const IsoperimetricSource& src_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    bool exhausted_ = false;
    std::unordered_set<Mask> dead_;
};

// Breadth-first search over optimal sets with sizes in [lo, hi] for a member satisfying `goal`.
template <class Goal>
Search band_search(const BipartiteGraph& g, const IsoperimetricSource& src, Mask start, int lo, int hi, Goal goal,
                   std::uint64_t budget) {
    std::unordered_set<Mask> seen{start};
    std::deque<Mask> queue{start};
    while (!queue.empty()) {
        Mask x = queue.front();
        queue.pop_front();
        if (goal(x)) return Search::found;
        for (Mask r = g.v_mask(); r; r &= r - 1) {
            Mask y = x ^ (r & (~r + 1));
            int size = popcount(y);
            if (size < lo || size > hi || seen.count(y)) continue;
            if (mask_cost(g, y) != src.delta(size)) continue;
            if (seen.size() >= budget) return Search::budget;
            seen.insert(y);
            queue.push_back(y);
        }
    }
    return Search::impossible;
}

std::string family_numbering_note(const ClosedFormFamily& f) {
    switch (f.kind) {
        case ClosedFormFamily::Kind::torus: return "spiral numberings and translation symmetry";
        case ClosedFormFamily::Kind::doubled_torus: return "seed-generated numberings and translation symmetry";
        case ClosedFormFamily::Kind::hypercube: return "Harper numbering and cube symmetry";
        default: return {};
    }
}

std::string hex_list(const std::vector<std::size_t>& idx, const ConfigurationSpace& space, std::size_t limit = 5) {
    std::ostringstream o;
    for (std::size_t i = 0; i < idx.size() && i < limit; ++i) o << (i ? ", " : "") << to_hex(space.state(idx[i]));
    if (idx.size() > limit) o << ", ...";
    return o.str();
}

}  // namespace

HypothesisReport check_hypotheses(const BipartiteGraph& g, const Rational& alpha, const IsoperimetricSource& src,
                                  const CriticalAnalysis& ca, const HypothesisOptions& opts) {
    HypothesisReport rep;
    {
        Rational lhs(g.num_u()), rhs = (Rational(1) + alpha) * Rational(g.num_v());
        rep["H0"] = {lhs < rhs ? Status::verified : Status::refuted,
                     "|U| = " + std::to_string(g.num_u()) + ", (1+alpha)|V| = " + to_string(rhs)};
    }
    int s_tilde = ca.s_tilde;
    bool exhaustive_to_tilde = src.brute && src.brute->s_max() >= s_tilde && g.fits_mask();
    std::string family_note = src.family ? family_numbering_note(*src.family) : std::string{};

    if (exhaustive_to_tilde) {
        NumberingSearch search(g, src, opts.search_budget);
        std::size_t found = 0, failed = 0, budget = 0;
        int first_fail = -1;
        for (int a : g.v_sites()) {
            if (mask_cost(g, bit(a)) != src.delta(1)) {
                ++failed;
                if (first_fail < 0) first_fail = a;
                continue;
            }
            switch (search.extend(bit(a), s_tilde)) {
                case Search::found: ++found; break;
                case Search::impossible:
                    ++failed;
                    if (first_fail < 0) first_fail = a;
                    break;
                case Search::budget: ++budget; break;
            }
        }
        std::string counts = std::to_string(found) + " of " + std::to_string(g.num_v()) +
                             " start sites extend to length " + std::to_string(s_tilde);
        rep["H1"] = {found > 0 ? Status::verified : (budget ? Status::exhausted_budget : Status::refuted), counts};
        if (failed > 0)
            rep["H2"] = {Status::refuted, counts + "; no numbering starts at site " + std::to_string(first_fail)};
        else
            rep["H2"] = {budget ? Status::exhausted_budget : Status::verified, counts};
    } else if (!family_note.empty()) {
        rep["H1"] = {Status::closed_form, family_note};
        rep["H2"] = {Status::closed_form, family_note};
    } else {
        rep["H1"] = {Status::exhausted_budget, "no exhaustive profile up to the resettling size"};
        rep["H2"] = rep["H1"];
    }

    {
        std::ostringstream o;
        o << "maximisers of g on {0.." << s_tilde << "}:";
        for (int s : ca.maximizers) o << ' ' << s;
        rep["H3"] = {ca.unique_max ? Status::verified : Status::refuted, o.str()};
    }

    int kappa = opts.kappa >= 0 ? opts.kappa : default_kappa(alpha);
    int s = ca.s_star;
    try {
        bool closed = false;
        for (int k = s - 1; k <= s + kappa; ++k) closed = closed || src.provenance(k) != "brute-force";
        bool a = kappa == 0 || src.delta(s + kappa) >= src.delta(s + kappa - 1);
        bool b = true;
        for (int i = 0; i < kappa; ++i) b = b && src.delta(s + i) >= src.delta(s);
        bool c = src.delta(s) == src.delta(s - 1) + 1;
        std::ostringstream o;
        o << "kappa = " << kappa << "; (a) " << (a ? "holds" : "fails") << ", (b) " << (b ? "holds" : "fails")
          << ", (c) " << (c ? "holds" : "fails");
        Status st = a && b && c ? (closed ? Status::closed_form : Status::verified) : Status::refuted;
        rep["H4'"] = {st, o.str()};
    } catch (const InvalidArgument& e) {
        rep["H4'"] = {Status::exhausted_budget, e.what()};
    }

    bool families_complete = src.brute && g.fits_mask() && src.brute->complete(std::max(0, s - 1)) &&
                             src.brute->complete(s + kappa) && src.brute->s_max() >= s_tilde;
    if (families_complete) {
        std::size_t ok_a = 0, ok_c = 0, budget = 0;
        std::string problem;
        for (const auto& a : src.brute->witnesses[s - 1]) {
            auto r = band_search(
                g, src, to_mask(a), 0, s - 1, [](Mask x) { return x == 0; }, opts.search_budget);
            if (r == Search::found)
                ++ok_a;
            else if (r == Search::budget)
                ++budget;
            else if (problem.empty())
                problem = "no progression from the empty set to a member of A";
        }
        NumberingSearch nested(g, src, opts.search_budget);
        for (const auto& c : src.brute->witnesses[s + kappa]) {
            Mask cm = to_mask(c);
            auto r = nested.extend(cm, s_tilde);
            if (r != Search::found)
                r = band_search(
                    g, src, cm, s, s_tilde, [&](Mask x) { return popcount(x) == s_tilde; }, opts.search_budget);
            if (r == Search::found)
                ++ok_c;
            else if (r == Search::budget)
                ++budget;
            else if (problem.empty())
                problem = "a member of C does not extend to size " + std::to_string(s_tilde);
        }
        std::size_t na = src.brute->witnesses[s - 1].size(), nc = src.brute->witnesses[s + kappa].size();
        std::string counts = std::to_string(ok_a) + "/" + std::to_string(na) + " members of A reached from the empty set, " +
                             std::to_string(ok_c) + "/" + std::to_string(nc) + " members of C extended to size " +
                             std::to_string(s_tilde);
        Status st = !problem.empty() ? Status::refuted : (budget ? Status::exhausted_budget : Status::verified);
        rep["H5'"] = {st, problem.empty() ? counts : problem + "; " + counts};
    } else if (!family_note.empty()) {
        rep["H5'"] = {Status::closed_form, family_note};
    } else {
        rep["H5'"] = {Status::exhausted_budget, "optimal families are not exhaustively enumerated"};
    }

    if (g.fits_mask() && g.num_u() > 0 && g.num_v() > 0) {
        std::size_t states = count_configurations(g, opts.no_trap_state_cap + 1);
        if (states <= opts.no_trap_state_cap) {
            auto space = ConfigurationSpace::enumerate(g, opts.no_trap_state_cap);
            auto nt = no_trap_certificate(space, alpha, opts.threads);
            if (nt.verdict == NoTrapReport::Verdict::certified) {
                rep["no-trap"] = {Status::verified, "all " + std::to_string(nt.checked) + " states below pi(u) Psi(u,J(u))"};
            } else if (nt.verdict == NoTrapReport::Verdict::refuted) {
                std::vector<std::size_t> idx;
                for (const auto& v : nt.violations) idx.push_back(v.state);
                rep["no-trap"] = {Status::refuted,
                                  "absence of traps is not satisfied: " + hex_list(idx, space)};
            } else {
                std::vector<std::size_t> idx;
                for (const auto& v : nt.ties) idx.push_back(v.state);
                rep["no-trap"] = {Status::inconclusive, "exponent-order ties at " + hex_list(idx, space)};
            }
        } else {
            rep["no-trap"] = {Status::exhausted_budget, "state space exceeds the cap"};
        }
    }
    return rep;
}

// ---------------------------------------------------------------- no-trap

std::string to_string(NoTrapReport::Verdict v) {
    switch (v) {
        case NoTrapReport::Verdict::certified: return "certified";
        case NoTrapReport::Verdict::refuted: return "refuted";
        case NoTrapReport::Verdict::inconclusive: return "inconclusive";
    }
    return {};
}

namespace {

struct NoTrapSetup {
    ElectricNetwork net;
    std::vector<Rational> heights;
    std::vector<std::size_t> by_height;  // state indices by increasing height
};

NoTrapSetup no_trap_setup(const ConfigurationSpace& space, const Rational& alpha) {
    NoTrapSetup s;
    auto params = ModelParams::from_alpha(space.graph(), 2.0, alpha);
    s.net = build_network(space, params);
    s.heights.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) s.heights[i] = height(space.graph(), space.state(i), alpha);
    s.by_height.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) s.by_height[i] = i;
    std::stable_sort(s.by_height.begin(), s.by_height.end(),
                     [&](std::size_t a, std::size_t b) { return s.heights[a] < s.heights[b]; });
    return s;
}

NodeSet strictly_lower(const NoTrapSetup& s, std::size_t x) {
    NodeSet out;
    for (std::size_t y : s.by_height) {
        if (!(s.heights[y] < s.heights[x])) break;
        out.push_back(y);
    }
    std::sort(out.begin(), out.end());
    return out;
}

TrapEntry trap_entry(const NoTrapSetup& s, const ConfigurationSpace& space, std::size_t x, const Rational& alpha,
                     const AsymptoticExponent& u_exp) {
    TrapEntry e;
    e.state = x;
    NodeSet lower = strictly_lower(s, x);
    if (lower.empty()) {
        e.stable = true;
        e.order = Order::greater;
        return e;
    }
    auto psi = critical_resistance_symbolic(s.net, {x}, lower, alpha);
    e.exponent = pi_exponent(space.graph(), space.state(x)) + psi.exponent;
    e.value = e.exponent.value(alpha);
    e.order = compare(e.exponent, u_exp, alpha);
    return e;
}

NoTrapReport finish(std::vector<TrapEntry>&& entries, const AsymptoticExponent& u_exp, const Rational& alpha) {
    NoTrapReport r;
    r.u_exponent = u_exp;
    r.u_value = u_exp.value(alpha);
    r.checked = entries.size();
    for (auto& e : entries) {
        if (e.order == Order::tie)
            r.ties.push_back(e);
        else if (e.order != Order::less)
            r.violations.push_back(e);
    }
    if (!r.violations.empty())
        r.verdict = NoTrapReport::Verdict::refuted;
    else if (!r.ties.empty())
        r.verdict = NoTrapReport::Verdict::inconclusive;
    return r;
}

AsymptoticExponent u_quantity(const NoTrapSetup& s, const ConfigurationSpace& space, const Rational& alpha) {
    std::size_t u = space.u_index();
    auto j = dominance_sets(space, u, alpha).j;
    if (j.empty()) throw InvalidArgument("no_trap_certificate: J(u) is empty");
    auto psi = critical_resistance_symbolic(s.net, {u}, j, alpha);
    return pi_exponent(space.graph(), space.u()) + psi.exponent;
}

std::vector<std::size_t> intermediate_states(const ConfigurationSpace& space) {
    std::vector<std::size_t> xs;
    for (std::size_t x = 0; x < space.size(); ++x)
        if (x != space.u_index() && x != space.v_index()) xs.push_back(x);
    return xs;
}

}  // namespace

NoTrapReport no_trap_certificate(const ConfigurationSpace& space, const Rational& alpha, int threads) {
    auto setup = no_trap_setup(space, alpha);
    auto u_exp = u_quantity(setup, space, alpha);
    auto xs = intermediate_states(space);
    std::vector<TrapEntry> entries(xs.size());
    std::string error;
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_threads(threads))
    for (std::size_t k = 0; k < xs.size(); ++k) {
        try {
            entries[k] = trap_entry(setup, space, xs[k], alpha, u_exp);
        } catch (const std::exception& e) {
#pragma omp critical
            error = e.what();
        }
    }
    if (!error.empty()) throw SolveError("no_trap_certificate: " + error);
    return finish(std::move(entries), u_exp, alpha);
}

NoTrapReport no_trap_certificate_serial(const ConfigurationSpace& space, const Rational& alpha) {
    auto setup = no_trap_setup(space, alpha);
    auto u_exp = u_quantity(setup, space, alpha);
    std::vector<TrapEntry> entries;
    for (std::size_t x : intermediate_states(space)) entries.push_back(trap_entry(setup, space, x, alpha, u_exp));
    return finish(std::move(entries), u_exp, alpha);
}

// ---------------------------------------------------------------- standard path

namespace {

AsymptoticExponent edge_resistance(const BipartiteGraph& g, Mask x, Mask y, const Rational& alpha) {
    auto ex = pi_exponent(g, x), ey = pi_exponent(g, y);
    auto vx = ex.value(alpha), vy = ey.value(alpha);
    const auto& heavy = (vx > vy || (vx == vy && ex.q >= ey.q)) ? ex : ey;
    return gamma_exponent() - heavy;
}

}  // namespace

StandardPath standard_path(const BipartiteGraph& g, const VSet& numbering, const Rational& alpha) {
    if (!g.fits_mask()) throw InvalidArgument("standard_path: at most 64 sites");
    if (numbering.empty()) throw InvalidArgument("standard_path: empty numbering");
    StandardPath p;
    Mask cur = g.u_mask();
    Mask placed = 0;
    p.path.push_back(cur);
    p.backbone.push_back(0);
    int best_s = 0;
    Rational best;
    int best_cost = 0;
    for (std::size_t i = 0; i < numbering.size(); ++i) {
        int a = numbering[i];
        if (!g.in_v(a)) throw InvalidArgument("standard_path: site " + std::to_string(a) + " is not in V");
        if (placed & bit(a)) throw InvalidArgument("standard_path: repeated site " + std::to_string(a));
        for (int t : g.neighbors(a))
            if (cur & bit(t)) {
                cur ^= bit(t);
                p.path.push_back(cur);
            }
        cur |= bit(a);
        placed |= bit(a);
        p.path.push_back(cur);
        p.backbone.push_back(p.path.size() - 1);
        int size = static_cast<int>(i + 1);
        int cost = mask_cost(g, placed);
        Rational gv = g_value(cost, size, alpha);
        if (best_s == 0 || gv > best) {
            best = gv;
            best_s = size;
            best_cost = cost;
        }
    }
    bool first = true;
    for (std::size_t k = 0; k + 1 < p.path.size(); ++k) {
        auto r = edge_resistance(g, p.path[k], p.path[k + 1], alpha);
        Rational v = r.value(alpha);
        if (first || v > p.psi_value) {
            p.psi_value = v;
            p.psi_exponent = r;
            first = false;
        }
    }
    p.s_dagger = best_s;
    p.predicted = AsymptoticExponent{1 - g.num_u() + best_cost, 1 - (best_s - 1)};
    return p;
}

// ---------------------------------------------------------------- critical pair

CriticalPairReport critical_pair_check(const ElectricNetwork& net, const CriticalGate& gate, const Rational& alpha) {
    if (!net.space) throw InvalidArgument("critical_pair_check needs a configuration network");
    const auto& space = *net.space;
    const auto& g = space.graph();
    CriticalPairReport rep;
    std::size_t u = space.u_index();
    auto j = dominance_sets(space, u, alpha).j;
    auto psi_u = critical_resistance_symbolic(net, {u}, j, alpha);
    rep.psi_u = psi_u.exponent;
    Rational bound = psi_u.value;
    std::vector<char> in_j(space.size(), 0);
    for (auto x : j) in_j[x] = 1;
    for (const auto& [x, y] : gate.transitions) {
        auto r = edge_resistance(g, x, y, alpha);
        if (r.value(alpha) != bound) {
            rep.resistance_order = false;
            rep.problems.push_back("r(" + to_hex(x) + "," + to_hex(y) + ") has order " + to_string(r));
        }
    }
    for (Mask x : gate.q()) {
        long ix = space.index_of(x);
        if (ix < 0) throw InvalidArgument("gate configuration outside the space");
        if (static_cast<std::size_t>(ix) == u) continue;
        auto psi = critical_resistance_symbolic(net, {u}, {static_cast<std::size_t>(ix)}, alpha);
        if (!(psi.value < bound)) {
            rep.before_gate = false;
            rep.problems.push_back("Psi(u," + to_hex(x) + ") is not below Psi(u,J(u))");
        }
    }
    for (Mask y : gate.q_star()) {
        long iy = space.index_of(y);
        if (iy < 0) throw InvalidArgument("gate configuration outside the space");
        if (in_j[static_cast<std::size_t>(iy)]) continue;
        auto psi = critical_resistance_symbolic(net, {static_cast<std::size_t>(iy)}, j, alpha);
        if (!(psi.value < bound)) {
            rep.after_gate = false;
            rep.problems.push_back("Psi(" + to_hex(y) + ",J(u)) is not below Psi(u,J(u))");
        }
    }
    return rep;
}

// ---------------------------------------------------------------- gate statistics

GateStatistics gate_statistics(const std::vector<HittingSample>& samples, const CriticalGate& gate) {
    GateStatistics st;
    std::size_t k = gate.transitions.size();
    st.first_counts.assign(k, 0);
    st.all_counts.assign(k, 0);
    auto index = [&](const Transition& t) {
        auto it = std::lower_bound(gate.transitions.begin(), gate.transitions.end(), t);
        if (it == gate.transitions.end() || *it != t) return -1L;
        return static_cast<long>(it - gate.transitions.begin());
    };
    for (const auto& s : samples) {
        if (s.timed_out) continue;
        ++st.samples;
        std::size_t events = 0;
        for (const auto& e : s.gate_events) {
            long i = index(e);
            if (i < 0) continue;
            if (events == 0) ++st.first_counts[i];
            ++st.all_counts[i];
            ++events;
        }
        if (events == 1) ++st.single_crossing;
        if (events == 0) ++st.no_crossing;
    }
    if (st.samples) st.single_fraction = static_cast<double>(st.single_crossing) / static_cast<double>(st.samples);
    std::uint64_t total = 0;
    for (auto c : st.first_counts) total += c;
    st.frequencies.assign(k, 0.0);
    for (std::size_t i = 0; i < k && total; ++i)
        st.frequencies[i] = static_cast<double>(st.first_counts[i]) / static_cast<double>(total);
    st.dof = k > 0 ? static_cast<int>(k) - 1 : 0;
    if (st.dof > 0 && total > 0) {
        double expected = static_cast<double>(total) / static_cast<double>(k);
        for (auto c : st.first_counts) st.chi_square += (static_cast<double>(c) - expected) * (c - expected) / expected;
        boost::math::chi_squared dist(st.dof);
        st.p_value = boost::math::cdf(boost::math::complement(dist, st.chi_square));
    }
    return st;
}

// ---------------------------------------------------------------- export

nlohmann::json analysis_json(const CriticalAnalysis& ca, const CriticalGate* gate, const CrossoverPrediction* pred,
                             const HypothesisReport* hyp) {
    nlohmann::json j;
    j["alpha"] = to_string(ca.alpha);
    j["s_star"] = ca.s_star;
    j["s_tilde"] = ca.s_tilde;
    j["g_star"] = to_string(ca.g_star);
    j["unique_max"] = ca.unique_max;
    j["maximizers"] = ca.maximizers;
    if (ca.ell_star) j["ell_star"] = *ca.ell_star;
    if (ca.t_star) j["t_star"] = *ca.t_star;
    j["delta"] = ca.delta;
    if (gate) {
        j["gate_count"] = gate->count;
        j["gate_transitions"] = gate->transitions.size();
        j["kappa"] = gate->kappa;
        j["family_sizes"] = {{"A", gate->family_a.size()}, {"B", gate->family_b.size()}, {"C", gate->family_c.size()}};
        if (gate->closed_form_count) {
            j["closed_form_count"] = *gate->closed_form_count;
            j["closed_form"] = gate->closed_form_name;
        }
        if (gate->conditional_on_conjecture) j["label"] = "conditional-on-conjecture";
        if (gate->characterization_ok) j["characterization_ok"] = *gate->characterization_ok;
        if (gate->count > 0) j["sharp_prefactor"] = 1.0 / static_cast<double>(gate->count);
    }
    if (pred) {
        j["exponent"] = {pred->exponent.p, pred->exponent.q};
        j["exponent_value"] = to_string(pred->value);
        if (pred->sharp) j["sharp_mean"] = *pred->sharp;
        if (pred->log_sharp) j["log_sharp_mean"] = *pred->log_sharp;
    }
    if (hyp) {
        nlohmann::json h;
        for (const auto& [name, r] : *hyp) h[name] = {{"status", to_string(r.status)}, {"evidence", r.evidence}};
        j["hypotheses"] = h;
    }
    return j;
}

}  // namespace hcmeta

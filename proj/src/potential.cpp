#include "hcmeta/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

namespace hcmeta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<char> membership(std::size_t n, const NodeSet& s, const char* what) {
    std::vector<char> m(n, 0);
    for (auto x : s) {
        if (x >= n) throw InvalidArgument(std::string(what) + ": node out of range");
        m[x] = 1;
    }
    return m;
}

void require_disjoint_nonempty(std::size_t n, const NodeSet& a, const NodeSet& b) {
    if (a.empty() || b.empty()) throw InvalidArgument("node sets must be non-empty");
    auto ma = membership(n, a, "A");
    for (auto x : b) {
        if (x >= n) throw InvalidArgument("B: node out of range");
        if (ma[x]) throw InvalidArgument("A and B must be disjoint");
    }
}

void require_pi(const ElectricNetwork& net) {
    if (net.log_pi.empty()) throw InvalidArgument("operation needs a network built from a configuration space");
}

long double scaled(const ElectricNetwork& net, std::size_t k) {
    return std::exp(static_cast<long double>(net.log_c[k]) - static_cast<long double>(net.log_c_max));
}

}  // namespace

double ElectricNetwork::pi(std::size_t x) const { return std::exp(log_pi[x]); }

std::optional<double> ElectricNetwork::log_conductance(std::size_t x, std::size_t y) const {
    for (std::size_t k = start[x]; k < start[x + 1]; ++k)
        if (nbr[k] == y) return log_c[k];
    return std::nullopt;
}

ElectricNetwork ElectricNetwork::from_edges(std::size_t n,
                                            const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(n);
    for (auto [a, b, c] : edges) {
        if (a >= n || b >= n || a == b) throw InvalidArgument("bad edge in network");
        if (!(c > 0.0)) throw InvalidArgument("conductances must be positive");
        adj[a].emplace_back(static_cast<std::uint32_t>(b), std::log(c));
        adj[b].emplace_back(static_cast<std::uint32_t>(a), std::log(c));
    }
    ElectricNetwork net;
    net.n = n;
    net.start.push_back(0);
    net.log_c_max = -kInf;
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        for (auto [y, lc] : row) {
            net.nbr.push_back(y);
            net.log_c.push_back(lc);
            net.log_c_max = std::max(net.log_c_max, lc);
        }
        net.start.push_back(net.nbr.size());
    }
    if (net.nbr.empty()) net.log_c_max = 0.0;
    return net;
}

ElectricNetwork build_network(const ConfigurationSpace& space, const ModelParams& params) {
    const auto& g = space.graph();
    auto dist = normalize(space, params);
    ElectricNetwork net;
    net.n = space.size();
    net.space = &space;
    net.params = params;
    net.log_pi = dist.log_pi;
    net.log_z = dist.log_z;
    net.pi_exponent.resize(net.n);
    for (std::size_t i = 0; i < net.n; ++i) net.pi_exponent[i] = hcmeta::pi_exponent(g, space.state(i));
    net.start.push_back(0);
    net.log_c_max = -kInf;
    const Rational alpha = params.alpha.value_or(Rational(1, 2));
    for (std::size_t i = 0; i < net.n; ++i) {
        Mask x = space.state(i);
        std::vector<std::uint32_t> row;
        for (int s = 0; s < g.num_sites(); ++s) {
            Mask y = x ^ bit(s);
            if ((x & bit(s)) || !(g.neighbor_mask(s) & x)) row.push_back(static_cast<std::uint32_t>(space.index_of(y)));
        }
        std::sort(row.begin(), row.end());
        for (auto j : row) {
            double lc = std::max(net.log_pi[i], net.log_pi[j]) - params.log_gamma;
            net.nbr.push_back(j);
            net.log_c.push_back(lc);
            net.log_c_max = std::max(net.log_c_max, lc);
            // Heavier endpoint by exponent value; equal values prefer the larger V count.
            const auto& ei = net.pi_exponent[i];
            const auto& ej = net.pi_exponent[j];
            auto vi = ei.value(alpha), vj = ej.value(alpha);
            const auto& heavy = (vi > vj || (vi == vj && ei.q >= ej.q)) ? ei : ej;
            net.r_exponent.push_back(gamma_exponent() - heavy);
        }
        net.start.push_back(net.nbr.size());
    }
    return net;
}

// ---------------------------------------------------------------------------
// Dirichlet solver

struct DirichletSolver::Impl {
    std::size_t n = 0;
    std::vector<int> local;  // node -> interior index or -1
    std::vector<std::size_t> interior;
    // Elimination record in order: pivot value and the couplings to later nodes.
    std::vector<int> order;
    std::vector<long double> pivot;
    std::vector<std::vector<std::pair<int, long double>>> couplings;
    bool iterative = false;
    Eigen::SparseMatrix<double> matrix;
};

DirichletSolver::DirichletSolver(const ElectricNetwork& net, const std::vector<char>& fixed,
                                 std::size_t force_iterative_above)
    : impl_(std::make_unique<Impl>()) {
    auto& im = *impl_;
    im.n = net.n;
    im.local.assign(net.n, -1);
    for (std::size_t x = 0; x < net.n; ++x)
        if (!fixed[x]) {
            im.local[x] = static_cast<int>(im.interior.size());
            im.interior.push_back(x);
        }
    const std::size_t m = im.interior.size();
    if (m > force_iterative_above) {
        im.iterative = true;
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t li = 0; li < m; ++li) {
            std::size_t x = im.interior[li];
            double diag = 0.0;
            for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k) {
                double c = static_cast<double>(scaled(net, k));
                diag += c;
                int lj = im.local[net.nbr[k]];
                if (lj >= 0) trip.emplace_back(static_cast<int>(li), lj, -c);
            }
            trip.emplace_back(static_cast<int>(li), static_cast<int>(li), diag);
        }
        im.matrix.resize(static_cast<int>(m), static_cast<int>(m));
        im.matrix.setFromTriplets(trip.begin(), trip.end());
        return;
    }

    std::vector<std::unordered_map<int, long double>> adj(m);
    std::vector<long double> ground(m, 0.0L);
    for (std::size_t li = 0; li < m; ++li) {
        std::size_t x = im.interior[li];
        for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k) {
            long double c = scaled(net, k);
            int lj = im.local[net.nbr[k]];
            if (lj >= 0)
                adj[li][lj] += c;
            else
                ground[li] += c;
        }
    }
    using Entry = std::pair<std::size_t, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (std::size_t li = 0; li < m; ++li) heap.emplace(adj[li].size(), static_cast<int>(li));
    std::vector<char> done(m, 0);
    im.order.reserve(m);
    while (!heap.empty()) {
        auto [deg, k] = heap.top();
        heap.pop();
        if (done[k] || deg != adj[k].size()) continue;
        done[k] = 1;
        std::vector<std::pair<int, long double>> row(adj[k].begin(), adj[k].end());
        std::sort(row.begin(), row.end());
        long double d = ground[k];
        for (auto& [j, c] : row) d += c;
        if (!(d > 0.0L)) throw SolveError("singular Laplacian: a component has no boundary node");
        for (std::size_t a = 0; a < row.size(); ++a) {
            auto [i, ci] = row[a];
            adj[i].erase(k);
            ground[i] += ci * ground[k] / d;
            for (std::size_t b = a + 1; b < row.size(); ++b) {
                auto [j, cj] = row[b];
                long double fill = ci * cj / d;
                adj[i][j] += fill;
                adj[j][i] += fill;
            }
        }
        for (auto& [i, ci] : row) heap.emplace(adj[i].size(), i);
        adj[k].clear();
        im.order.push_back(k);
        im.pivot.push_back(d);
        im.couplings.push_back(std::move(row));
    }
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;

bool DirichletSolver::iterative() const { return impl_->iterative; }

std::vector<long double> DirichletSolver::solve(const std::vector<long double>& rhs) const {
    const auto& im = *impl_;
    const std::size_t m = im.interior.size();
    std::vector<long double> out(im.n, 0.0L);
    if (im.iterative) {
        Eigen::VectorXd b(static_cast<int>(m));
        for (std::size_t li = 0; li < m; ++li) b[static_cast<int>(li)] = static_cast<double>(rhs[im.interior[li]]);
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        cg.setTolerance(1e-12);
        cg.setMaxIterations(static_cast<int>(std::max<std::size_t>(1000, 20 * m)));
        cg.compute(im.matrix);
        Eigen::VectorXd sol = cg.solve(b);
        if (cg.info() != Eigen::Success) throw SolveError("conjugate gradients did not reach the residual target");
        for (std::size_t li = 0; li < m; ++li) out[im.interior[li]] = sol[static_cast<int>(li)];
        return out;
    }
    std::vector<long double> b(m);
    for (std::size_t li = 0; li < m; ++li) b[li] = rhs[im.interior[li]];
    for (std::size_t t = 0; t < im.order.size(); ++t) {
        long double bk = b[im.order[t]] / im.pivot[t];
        if (bk != 0.0L)
            for (auto [j, c] : im.couplings[t]) b[j] += c * bk;
    }
    std::vector<long double> phi(m, 0.0L);
    for (std::size_t t = im.order.size(); t-- > 0;) {
        int k = im.order[t];
        long double acc = b[k];
        for (auto [j, c] : im.couplings[t]) acc += c * phi[j];
        phi[k] = acc / im.pivot[t];
    }
    for (std::size_t li = 0; li < m; ++li) out[im.interior[li]] = phi[li];
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Voltage with source set `hi` at 1 and `lo` at 0, in long double.
std::vector<long double> raw_voltage(const ElectricNetwork& net, const NodeSet& hi, const NodeSet& lo) {
    auto mh = membership(net.n, hi, "A");
    auto ml = membership(net.n, lo, "B");
    std::vector<char> fixed(net.n, 0);
    for (std::size_t x = 0; x < net.n; ++x) fixed[x] = mh[x] || ml[x];
    DirichletSolver solver(net, fixed);
    std::vector<long double> rhs(net.n, 0.0L);
    for (std::size_t x = 0; x < net.n; ++x) {
        if (fixed[x]) continue;
        for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k)
            if (mh[net.nbr[k]]) rhs[x] += scaled(net, k);
    }
    auto w = solver.solve(rhs);
    for (auto h : hi) w[h] = 1.0L;
    return w;
}

// Scaled current out of `from` when it is held at 0 and `to` at 1 is written as
// sum_{a in from} sum_y c(a,y) V(y) with V the voltage of `to` over `from`.
long double scaled_conductance(const ElectricNetwork& net, const NodeSet& from, const NodeSet& to) {
    auto v = raw_voltage(net, to, from);
    auto mf = membership(net.n, from, "A");
    long double c = 0.0L;
    for (auto a : from)
        for (std::size_t k = net.start[a]; k < net.start[a + 1]; ++k)
            if (!mf[net.nbr[k]]) c += scaled(net, k) * v[net.nbr[k]];
    return c;
}

Resistance from_scaled_conductance(const ElectricNetwork& net, long double c_scaled) {
    if (!(c_scaled > 0.0L)) throw SolveError("no current flows: A and B lie in different components");
    Resistance r;
    r.log_r = -net.log_c_max - static_cast<double>(std::log(c_scaled));
    r.r = std::exp(r.log_r);
    r.c = std::exp(-r.log_r);
    return r;
}

}  // namespace

VoltageField voltage(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b) {
    require_disjoint_nonempty(net.n, a, b);
    auto w = raw_voltage(net, a, b);
    VoltageField f;
    f.a = a;
    f.b = b;
    f.w.assign(w.begin(), w.end());
    auto ma = membership(net.n, a, "A");
    auto mb = membership(net.n, b, "B");
    for (std::size_t x = 0; x < net.n; ++x) {
        if (ma[x] || mb[x]) continue;
        long double num = 0.0L, den = 0.0L;
        for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k) {
            long double c = scaled(net, k);
            num += c * (w[net.nbr[k]] - w[x]);
            den += c;
        }
        if (den > 0.0L) f.harmonic_residual = std::max(f.harmonic_residual, static_cast<double>(std::fabs(num / den)));
    }
    return f;
}

Resistance effective_resistance(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b) {
    require_disjoint_nonempty(net.n, a, b);
    return from_scaled_conductance(net, scaled_conductance(net, a, b));
}

Resistance effective_resistance_current(const ElectricNetwork& net, std::size_t a, const NodeSet& b) {
    require_disjoint_nonempty(net.n, {a}, b);
    DirichletSolver solver(net, membership(net.n, b, "B"));
    std::vector<long double> rhs(net.n, 0.0L);
    rhs[a] = 1.0L;
    auto phi = solver.solve(rhs);
    Resistance r;
    r.log_r = static_cast<double>(std::log(phi[a])) - net.log_c_max;
    r.r = std::exp(r.log_r);
    r.c = std::exp(-r.log_r);
    return r;
}

double escape_probability(const ElectricNetwork& net, std::size_t a, const NodeSet& b) {
    require_pi(net);
    auto r = effective_resistance_current(net, a, b);
    return std::exp(-net.log_pi[a] - r.log_r);
}

double escape_probability_first_step(const ElectricNetwork& net, std::size_t a, const NodeSet& b) {
    require_pi(net);
    require_disjoint_nonempty(net.n, {a}, b);
    auto v = raw_voltage(net, b, {a});
    long double acc = 0.0L;
    for (std::size_t k = net.start[a]; k < net.start[a + 1]; ++k)
        acc += std::exp(static_cast<long double>(net.log_c[k]) - net.log_pi[a]) * v[net.nbr[k]];
    return static_cast<double>(acc);
}

std::vector<double> green_function(const ElectricNetwork& net, std::size_t a, const NodeSet& b) {
    require_pi(net);
    require_disjoint_nonempty(net.n, {a}, b);
    auto r = effective_resistance(net, {a}, b);
    auto w = raw_voltage(net, {a}, b);
    std::vector<double> g(net.n);
    for (std::size_t x = 0; x < net.n; ++x)
        g[x] = static_cast<double>(std::exp(static_cast<long double>(r.log_r) + net.log_pi[x]) * w[x]);
    return g;
}

std::vector<double> green_function_direct(const ElectricNetwork& net, std::size_t a, const NodeSet& b) {
    require_pi(net);
    require_disjoint_nonempty(net.n, {a}, b);
    DirichletSolver solver(net, membership(net.n, b, "B"));
    std::vector<long double> rhs(net.n, 0.0L);
    rhs[a] = 1.0L;
    auto phi = solver.solve(rhs);
    std::vector<double> g(net.n);
    for (std::size_t x = 0; x < net.n; ++x)
        g[x] = static_cast<double>(std::exp(static_cast<long double>(net.log_pi[x]) - net.log_c_max) * phi[x]);
    return g;
}

double expected_hitting_time(const ElectricNetwork& net, std::size_t a, const NodeSet& b) {
    require_pi(net);
    auto mb = membership(net.n, b, "B");
    if (mb.at(a)) return 0.0;
    auto r = effective_resistance(net, {a}, b);
    auto w = raw_voltage(net, {a}, b);
    long double acc = 0.0L;
    for (std::size_t x = 0; x < net.n; ++x) acc += std::exp(static_cast<long double>(net.log_pi[x])) * w[x];
    return static_cast<double>(std::exp(static_cast<long double>(r.log_r)) * acc);
}

std::vector<double> hitting_times_first_step(const ElectricNetwork& net, const NodeSet& b) {
    require_pi(net);
    if (b.empty()) throw InvalidArgument("target set must be non-empty");
    DirichletSolver solver(net, membership(net.n, b, "B"));
    std::vector<long double> rhs(net.n);
    for (std::size_t x = 0; x < net.n; ++x) rhs[x] = std::exp(static_cast<long double>(net.log_pi[x]));
    auto h = solver.solve(rhs);
    std::vector<double> out(net.n);
    for (std::size_t x = 0; x < net.n; ++x)
        out[x] = static_cast<double>(h[x] * std::exp(-static_cast<long double>(net.log_c_max)));
    for (auto y : b) out[y] = 0.0;
    return out;
}

double expected_hitting_time_first_step(const ElectricNetwork& net, std::size_t a, const NodeSet& b) {
    auto mb = membership(net.n, b, "B");
    if (mb.at(a)) return 0.0;
    return hitting_times_first_step(net, b)[a];
}

// ---------------------------------------------------------------------------
// Critical resistance

namespace {

// best[x] = largest achievable minimum log-conductance over paths from the sources.
std::vector<double> widest_from(const ElectricNetwork& net, const NodeSet& sources, const std::vector<char>* stop,
                                std::vector<long>* parent, long* reached) {
    std::vector<double> best(net.n, -kInf);
    if (parent) parent->assign(net.n, -1);
    std::vector<char> done(net.n, 0);
    using Entry = std::pair<double, std::size_t>;
    auto cmp = [](const Entry& l, const Entry& r) { return l.first < r.first || (l.first == r.first && l.second > r.second); };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    for (auto s : sources) {
        best[s] = kInf;
        heap.emplace(kInf, s);
    }
    while (!heap.empty()) {
        auto [val, x] = heap.top();
        heap.pop();
        if (done[x]) continue;
        done[x] = 1;
        if (stop && (*stop)[x]) {
            if (reached) *reached = static_cast<long>(x);
            return best;
        }
        for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k) {
            std::size_t y = net.nbr[k];
            double cand = std::min(val, net.log_c[k]);
            if (!done[y] && cand > best[y]) {
                best[y] = cand;
                if (parent) (*parent)[y] = static_cast<long>(x);
                heap.emplace(cand, y);
            }
        }
    }
    return best;
}

NodeSet trace(const std::vector<long>& parent, std::size_t end) {
    NodeSet path{end};
    while (parent[path.back()] >= 0) path.push_back(static_cast<std::size_t>(parent[path.back()]));
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

CriticalResistance critical_resistance(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b) {
    if (a.empty() || b.empty()) throw InvalidArgument("critical_resistance: empty node set");
    auto mb = membership(net.n, b, "B");
    std::vector<long> parent;
    long reached = -1;
    auto best = widest_from(net, a, &mb, &parent, &reached);
    if (reached < 0) throw SolveError("critical_resistance: B is not reachable from A");
    CriticalResistance out;
    out.witness_path = trace(parent, static_cast<std::size_t>(reached));
    double v = best[static_cast<std::size_t>(reached)];
    out.log_psi = v == kInf ? -kInf : -v;
    out.psi = std::exp(out.log_psi);
    return out;
}

std::vector<double> critical_resistance_all(const ElectricNetwork& net, std::size_t x) {
    auto best = widest_from(net, {x}, nullptr, nullptr, nullptr);
    for (auto& v : best) v = -v;
    return best;
}

namespace {

struct Key {
    Rational value;
    AsymptoticExponent e;
    bool bottom = false;  // below every edge (path of length zero)
    bool top = false;     // unreached
};

bool key_less(const Key& l, const Key& r) {
    if (l.top != r.top) return r.top;
    if (l.bottom != r.bottom) return l.bottom;
    if (l.top || l.bottom) return false;
    if (l.value != r.value) return l.value < r.value;
    return std::tie(l.e.p, l.e.q) < std::tie(r.e.p, r.e.q);
}

}  // namespace

SymbolicCriticalResistance critical_resistance_symbolic(const ElectricNetwork& net, const NodeSet& a,
                                                        const NodeSet& b, const Rational& alpha) {
    if (net.r_exponent.empty()) throw InvalidArgument("symbolic critical resistance needs a configuration network");
    if (a.empty() || b.empty()) throw InvalidArgument("critical_resistance: empty node set");
    auto mb = membership(net.n, b, "B");
    std::vector<Key> best(net.n, Key{Rational(0), {}, false, true});
    std::vector<long> parent(net.n, -1);
    std::vector<char> done(net.n, 0);
    std::vector<Rational> edge_value(net.r_exponent.size());
    for (std::size_t k = 0; k < edge_value.size(); ++k) edge_value[k] = net.r_exponent[k].value(alpha);
    auto cmp = [](const std::pair<Key, std::size_t>& l, const std::pair<Key, std::size_t>& r) {
        if (key_less(l.first, r.first)) return false;
        if (key_less(r.first, l.first)) return true;
        return l.second > r.second;
    };
    std::priority_queue<std::pair<Key, std::size_t>, std::vector<std::pair<Key, std::size_t>>, decltype(cmp)> heap(cmp);
    for (auto s : a) {
        best[s] = Key{Rational(0), {}, true, false};
        heap.emplace(best[s], s);
    }
    SymbolicCriticalResistance out;
    long reached = -1;
    while (!heap.empty()) {
        auto [key, x] = heap.top();
        heap.pop();
        if (done[x]) continue;
        done[x] = 1;
        if (mb[x]) {
            reached = static_cast<long>(x);
            break;
        }
        for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k) {
            std::size_t y = net.nbr[k];
            if (done[y]) continue;
            Key ek{edge_value[k], net.r_exponent[k], false, false};
            Key cand = key_less(key, ek) ? ek : key;
            if (key_less(cand, best[y])) {
                best[y] = cand;
                parent[y] = static_cast<long>(x);
                heap.emplace(cand, y);
            }
        }
    }
    if (reached < 0) return out;
    out.reachable = true;
    out.witness_path = trace(parent, static_cast<std::size_t>(reached));
    const Key& k = best[static_cast<std::size_t>(reached)];
    if (k.bottom) {
        out.exponent = {};
        out.value = Rational(0);
        return out;
    }
    out.exponent = k.e;
    out.value = k.value;
    // An edge of the same value but different (p,q) that lies between the A-side and
    // the B-side of the threshold graph could equally carry the bottleneck.
    auto reach = [&](const NodeSet& from) {
        std::vector<char> seen(net.n, 0);
        std::vector<std::size_t> stack(from.begin(), from.end());
        for (auto s : from) seen[s] = 1;
        while (!stack.empty()) {
            auto x = stack.back();
            stack.pop_back();
            for (std::size_t e = net.start[x]; e < net.start[x + 1]; ++e)
                if (edge_value[e] <= out.value && !seen[net.nbr[e]]) {
                    seen[net.nbr[e]] = 1;
                    stack.push_back(net.nbr[e]);
                }
        }
        return seen;
    };
    auto from_a = reach(a);
    auto from_b = reach(b);
    for (std::size_t x = 0; x < net.n && !out.order_tie; ++x) {
        if (!from_a[x]) continue;
        for (std::size_t e = net.start[x]; e < net.start[x + 1]; ++e)
            if (edge_value[e] == out.value && from_b[net.nbr[e]] && !(net.r_exponent[e] == out.exponent)) {
                out.order_tie = true;
                break;
            }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Nash-Williams

NashWilliamsBounds nash_williams_bounds(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b,
                                        const NodeSet& cut, const std::vector<NodeSet>& paths) {
    require_disjoint_nonempty(net.n, a, b);
    auto ma = membership(net.n, a, "A");
    auto mb = membership(net.n, b, "B");
    auto mc = membership(net.n, cut, "cut");
    for (auto x : a)
        if (!mc[x]) throw InvalidArgument("cut does not contain A (node " + std::to_string(x) + ")");
    for (auto x : b)
        if (mc[x]) throw InvalidArgument("cut intersects B (node " + std::to_string(x) + ")");
    if (paths.empty()) throw InvalidArgument("path family is empty");

    std::map<std::pair<std::size_t, std::size_t>, int> uses;
    std::set<std::pair<std::size_t, std::size_t>> directed;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& w = paths[p];
        if (w.size() < 2 || !ma.at(w.front()) || !mb.at(w.back()))
            throw InvalidArgument("path " + std::to_string(p) + " does not run from A to B");
        std::set<std::size_t> seen(w.begin(), w.end());
        if (seen.size() != w.size()) throw InvalidArgument("path " + std::to_string(p) + " is not simple");
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            if (!net.log_conductance(w[i], w[i + 1]))
                throw InvalidArgument("path " + std::to_string(p) + " uses a non-edge");
            directed.emplace(w[i], w[i + 1]);
        }
    }
    for (const auto& [x, y] : directed)
        if (directed.count({y, x}))
            throw InvalidArgument("two paths traverse edge {" + std::to_string(x) + "," + std::to_string(y) +
                                  "} in opposite directions");
    for (const auto& w : paths)
        for (std::size_t i = 0; i + 1 < w.size(); ++i) ++uses[{std::min(w[i], w[i + 1]), std::max(w[i], w[i + 1])}];

    long double upper = 0.0L;
    for (std::size_t x = 0; x < net.n; ++x) {
        if (!mc[x]) continue;
        for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k)
            if (!mc[net.nbr[k]]) upper += scaled(net, k);
    }
    long double lower = 0.0L;
    for (const auto& w : paths) {
        long double len = 0.0L;
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            long double c = std::exp(static_cast<long double>(*net.log_conductance(w[i], w[i + 1])) - net.log_c_max);
            len += uses[{std::min(w[i], w[i + 1]), std::max(w[i], w[i + 1])}] / c;
        }
        lower += 1.0L / len;
    }
    long double scale = std::exp(static_cast<long double>(net.log_c_max));
    NashWilliamsBounds nw;
    nw.upper = static_cast<double>(upper * scale);
    nw.lower = static_cast<double>(lower * scale);
    nw.exact = static_cast<double>(scaled_conductance(net, a, b) * scale);
    return nw;
}

std::vector<NodeSet> greedy_path_family(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b,
                                        std::size_t count) {
    require_disjoint_nonempty(net.n, a, b);
    auto mb = membership(net.n, b, "B");
    std::map<std::pair<std::size_t, std::size_t>, int> uses;
    std::set<std::pair<std::size_t, std::size_t>> directed;
    std::vector<NodeSet> family;
    for (std::size_t it = 0; it < count; ++it) {
        std::vector<long double> dist(net.n, std::numeric_limits<long double>::infinity());
        std::vector<long> parent(net.n, -1);
        std::vector<char> done(net.n, 0);
        using Entry = std::pair<long double, std::size_t>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        for (auto s : a) {
            dist[s] = 0.0L;
            heap.emplace(0.0L, s);
        }
        long reached = -1;
        while (!heap.empty()) {
            auto [d, x] = heap.top();
            heap.pop();
            if (done[x]) continue;
            done[x] = 1;
            if (mb[x]) {
                reached = static_cast<long>(x);
                break;
            }
            for (std::size_t k = net.start[x]; k < net.start[x + 1]; ++k) {
                std::size_t y = net.nbr[k];
                if (done[y] || directed.count({y, x})) continue;
                auto key = std::make_pair(std::min(x, y), std::max(x, y));
                long double r = 1.0L / scaled(net, k);
                long double cand = d + (uses[key] + 1) * r;
                if (cand < dist[y]) {
                    dist[y] = cand;
                    parent[y] = static_cast<long>(x);
                    heap.emplace(cand, y);
                }
            }
        }
        if (reached < 0) break;
        auto p = trace(parent, static_cast<std::size_t>(reached));
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            directed.emplace(p[i], p[i + 1]);
            ++uses[{std::min(p[i], p[i + 1]), std::max(p[i], p[i + 1])}];
        }
        family.push_back(std::move(p));
    }
    return family;
}

NodeSet critical_cut(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b) {
    auto psi_ab = critical_resistance(net, a, b);
    auto best = widest_from(net, a, nullptr, nullptr, nullptr);
    NodeSet cut;
    for (std::size_t x = 0; x < net.n; ++x)
        if (-best[x] < psi_ab.log_psi) cut.push_back(x);
    return cut;
}

VoltageBoundReport voltage_bound_check(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b,
                                       std::size_t x) {
    require_disjoint_nonempty(net.n, a, b);
    for (auto s : a)
        if (s == x) throw InvalidArgument("voltage_bound_check: x lies in A");
    for (auto s : b)
        if (s == x) throw InvalidArgument("voltage_bound_check: x lies in B");
    const double slack = 1e-12;
    VoltageBoundReport rep;
    auto w = voltage(net, a, b).w;
    rep.w = w[x];
    auto rab = effective_resistance(net, a, b);
    auto rxa = effective_resistance(net, {x}, a);
    auto rxb = effective_resistance(net, {x}, b);
    rep.lower_r = 1.0 - std::exp(rxa.log_r - rab.log_r);
    rep.upper_r = std::exp(rxb.log_r - rab.log_r);
    rep.resistance_ok = rep.lower_r <= rep.w + slack && rep.w <= rep.upper_r + slack;

    const double log_k = 4.0 * std::log(static_cast<double>(net.n));
    auto pab = critical_resistance(net, a, b).log_psi;
    auto pxa = critical_resistance(net, {x}, a).log_psi;
    auto pxb = critical_resistance(net, {x}, b).log_psi;
    rep.lower_psi = 1.0 - std::exp(log_k + pxa - pab);
    rep.upper_psi = std::exp(log_k + pxb - pab);
    rep.psi_ok = rep.lower_psi <= rep.w + slack && rep.w <= rep.upper_psi + slack;

    auto pxy = critical_resistance_all(net, x);
    rep.valley_ok = true;
    for (std::size_t y = 0; y < net.n; ++y) {
        double bound = y == x ? 0.0 : std::exp(log_k + pxy[y] - pab);
        if (std::fabs(w[x] - w[y]) > bound + slack) rep.valley_ok = false;
    }
    return rep;
}

nlohmann::json potential_json(const Resistance& r, const CriticalResistance& psi,
                              const SymbolicCriticalResistance* symbolic) {
    nlohmann::json j{{"R", r.r}, {"log_R", r.log_r}, {"psi", psi.psi}, {"log_psi", psi.log_psi},
                     {"witness_path", psi.witness_path}};
    if (symbolic) {
        j["psi_exponent"] = {symbolic->exponent.p, symbolic->exponent.q};
        j["psi_exponent_value"] = to_string(symbolic->value);
        j["order_tie"] = symbolic->order_tie;
    }
    return j;
}

}  // namespace hcmeta

#include "hcmeta/configspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hcmeta {

ModelParams ModelParams::from_alpha(const BipartiteGraph& g, double lambda, const Rational& alpha) {
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (alpha <= Rational(0) || alpha >= Rational(1)) throw InvalidArgument("alpha must lie in (0,1)");
    double log_bar = (1.0 + to_double(alpha)) * std::log(lambda);
    auto p = with_activities(g, lambda, std::exp(log_bar), alpha);
    p.log_lambda_bar = log_bar;
    return p;
}

ModelParams ModelParams::with_activities(const BipartiteGraph& g, double lambda, double lambda_bar,
                                         std::optional<Rational> alpha) {
    if (!(lambda > 0.0) || !(lambda_bar > 0.0)) throw InvalidArgument("activities must be positive");
    ModelParams p;
    p.lambda = lambda;
    p.lambda_bar = lambda_bar;
    p.log_lambda = std::log(lambda);
    p.log_lambda_bar = std::log(lambda_bar);
    p.alpha = alpha;
    p.nu = g.num_u();
    p.nv = g.num_v();
    p.gamma = (1.0 + lambda) * p.nu + (1.0 + lambda_bar) * p.nv;
    p.log_gamma = std::log(p.gamma);
    return p;
}

const Rational& ModelParams::require_alpha() const {
    if (!alpha) throw InvalidArgument("this operation needs alpha");
    return *alpha;
}

bool is_independent(const BipartiteGraph& g, Mask x) {
    for (Mask rest = x; rest; rest &= rest - 1) {
        int s = __builtin_ctzll(rest);
        if (g.neighbor_mask(s) & x) return false;
    }
    return true;
}

Mask make_configuration(const BipartiteGraph& g, const std::vector<int>& sites) {
    if (!g.fits_mask()) throw InvalidArgument("configurations need at most 64 sites");
    Mask x = 0;
    for (int s : sites) {
        if (s < 0 || s >= g.num_sites()) throw InvalidArgument("site out of range");
        x |= bit(s);
    }
    if (!is_independent(g, x)) throw InvalidArgument("configuration violates the hard-core constraint");
    return x;
}

std::vector<int> occupied_sites(Mask x) {
    std::vector<int> out;
    for (; x; x &= x - 1) out.push_back(__builtin_ctzll(x));
    return out;
}

namespace {

// Visits independent sets in increasing numeric order by deciding the highest site first.
template <class Visit>
bool enumerate_rec(const BipartiteGraph& g, int site, Mask x, Mask blocked, Visit& visit) {
    if (site < 0) return visit(x);
    if (!enumerate_rec(g, site - 1, x, blocked, visit)) return false;
    if (!(blocked & bit(site)))
        return enumerate_rec(g, site - 1, x | bit(site), blocked | g.neighbor_mask(site), visit);
    return true;
}

}  // namespace

std::size_t count_configurations(const BipartiteGraph& g, std::size_t limit) {
    if (!g.fits_mask()) throw Refusal("configuration spaces need at most 64 sites");
    std::size_t count = 0;
    auto visit = [&](Mask) { return ++count <= limit; };
    enumerate_rec(g, g.num_sites() - 1, 0, 0, visit);
    return count;
}

ConfigurationSpace ConfigurationSpace::enumerate(std::shared_ptr<const BipartiteGraph> g, std::size_t cap) {
    if (g->num_v() == 0 || g->num_u() == 0) throw InvalidArgument("enumerate: both parts must be non-empty");
    if (!g->fits_mask())
        throw Refusal("enumerate: graph has " + std::to_string(g->num_sites()) +
                      " sites, configuration masks hold at most 64");
    std::size_t estimate = count_configurations(*g, 64 * cap);
    if (estimate > cap) {
        std::string what = estimate > 64 * cap ? "more than " + std::to_string(64 * cap)
                                               : std::to_string(estimate);
        throw Refusal("enumerate: " + what + " configurations exceed the cap of " + std::to_string(cap));
    }
    ConfigurationSpace s;
    s.graph_ = std::move(g);
    s.states_.reserve(estimate);
    auto visit = [&](Mask x) {
        s.states_.push_back(x);
        return true;
    };
    enumerate_rec(*s.graph_, s.graph_->num_sites() - 1, 0, 0, visit);
    // The recursion already yields ascending masks; keep the guarantee explicit.
    if (!std::is_sorted(s.states_.begin(), s.states_.end())) std::sort(s.states_.begin(), s.states_.end());
    s.u_index_ = static_cast<std::size_t>(s.index_of(s.u()));
    s.v_index_ = static_cast<std::size_t>(s.index_of(s.v()));
    return s;
}

ConfigurationSpace ConfigurationSpace::enumerate(const BipartiteGraph& g, std::size_t cap) {
    return enumerate(std::make_shared<const BipartiteGraph>(g), cap);
}

long ConfigurationSpace::index_of(Mask x) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), x);
    if (it == states_.end() || *it != x) return -1;
    return static_cast<long>(it - states_.begin());
}

Weight weight(const BipartiteGraph& g, const ModelParams& params, Mask x) {
    Weight w;
    w.log = popcount(u_part(g, x)) * params.log_lambda + popcount(v_part(g, x)) * params.log_lambda_bar;
    if (std::abs(w.log) < 600.0) w.linear = std::exp(w.log);
    return w;
}

double StationaryDistribution::pi(std::size_t i) const { return std::exp(log_pi[i]); }

StationaryDistribution normalize(const ConfigurationSpace& space, const ModelParams& params) {
    StationaryDistribution d;
    d.log_pi.resize(space.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < space.size(); ++i) {
        d.log_pi[i] = weight(space.graph(), params, space.state(i)).log;
        mx = std::max(mx, d.log_pi[i]);
    }
    double acc = 0.0;
    for (double l : d.log_pi) acc += std::exp(l - mx);
    d.log_z = mx + std::log(acc);
    for (double& l : d.log_pi) l -= d.log_z;
    return d;
}

Rational height(const BipartiteGraph& g, Mask x, const Rational& alpha) {
    return -Rational(popcount(u_part(g, x))) - (Rational(1) + alpha) * Rational(popcount(v_part(g, x)));
}

AsymptoticExponent pi_exponent(const BipartiteGraph& g, Mask x) {
    return weight_exponent(popcount(u_part(g, x)), popcount(v_part(g, x)));
}

bool leq(const BipartiteGraph& g, Mask x, Mask y) {
    Mask xu = u_part(g, x), yu = u_part(g, y), xv = v_part(g, x), yv = v_part(g, y);
    return (yu & ~xu) == 0 && (xv & ~yv) == 0;
}

Mask join(const BipartiteGraph& g, Mask x, Mask y) {
    return (v_part(g, x) | v_part(g, y)) | (u_part(g, x) & u_part(g, y));
}

Mask meet(const BipartiteGraph& g, Mask x, Mask y) {
    return (u_part(g, x) | u_part(g, y)) | (v_part(g, x) & v_part(g, y));
}

int config_cost(const BipartiteGraph& g, Mask x) { return g.num_u() - popcount(x); }

std::string to_hex(Mask x) {
    std::ostringstream o;
    o << "0x" << std::hex << x;
    return o.str();
}

Mask from_hex(const std::string& text) {
    try {
        return std::stoull(text, nullptr, 16);
    } catch (const std::exception&) {
        throw InvalidArgument("bad hex configuration '" + text + "'");
    }
}

nlohmann::json config_json(Mask x) {
    return nlohmann::json{{"hex", to_hex(x)}, {"sites", occupied_sites(x)}};
}

}  // namespace hcmeta

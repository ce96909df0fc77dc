#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hcmeta/exponent.hpp"
#include "hcmeta/graph.hpp"

namespace hcmeta {

// Occupied-site bitmask; configuration spaces are limited to graphs with <= 64 sites.
using Mask = std::uint64_t;

inline Mask bit(int site) { return Mask{1} << site; }
inline int popcount(Mask x) { return __builtin_popcountll(x); }

struct ModelParams {
    double lambda = 1.0;
    double lambda_bar = 1.0;
    double log_lambda = 0.0;
    double log_lambda_bar = 0.0;
    std::optional<Rational> alpha;
    int nu = 0;
    int nv = 0;
    double gamma = 0.0;
    double log_gamma = 0.0;

    // lambda_bar = lambda^(1+alpha).
    static ModelParams from_alpha(const BipartiteGraph& g, double lambda, const Rational& alpha);
    static ModelParams with_activities(const BipartiteGraph& g, double lambda, double lambda_bar,
                                       std::optional<Rational> alpha = std::nullopt);

    double activity(bool u_site) const { return u_site ? lambda : lambda_bar; }
    const Rational& require_alpha() const;
};

bool is_independent(const BipartiteGraph& g, Mask x);
Mask make_configuration(const BipartiteGraph& g, const std::vector<int>& sites);
std::vector<int> occupied_sites(Mask x);
inline Mask u_part(const BipartiteGraph& g, Mask x) { return x & g.u_mask(); }
inline Mask v_part(const BipartiteGraph& g, Mask x) { return x & g.v_mask(); }

class ConfigurationSpace {
public:
    static constexpr std::size_t default_cap = 5'000'000;

    // Depth-first enumeration over sites in id order, skipping neighbours of occupied
    // sites.  Throws Refusal when more than `cap` configurations exist.
    static ConfigurationSpace enumerate(std::shared_ptr<const BipartiteGraph> g,
                                        std::size_t cap = default_cap);
    static ConfigurationSpace enumerate(const BipartiteGraph& g, std::size_t cap = default_cap);

    const BipartiteGraph& graph() const { return *graph_; }
    std::shared_ptr<const BipartiteGraph> graph_ptr() const { return graph_; }
    std::size_t size() const { return states_.size(); }
    Mask state(std::size_t i) const { return states_[i]; }
    const std::vector<Mask>& states() const { return states_; }
    // Ordinal of a configuration, or -1 if it is not a valid configuration.
    long index_of(Mask x) const;
    std::size_t u_index() const { return u_index_; }
    std::size_t v_index() const { return v_index_; }
    std::size_t empty_index() const { return 0; }
    Mask u() const { return graph_->u_mask(); }
    Mask v() const { return graph_->v_mask(); }

private:
    std::shared_ptr<const BipartiteGraph> graph_;
    std::vector<Mask> states_;
    std::size_t u_index_ = 0;
    std::size_t v_index_ = 0;
};

// Number of independent sets, counted without storing them; stops once `limit` is passed.
std::size_t count_configurations(const BipartiteGraph& g, std::size_t limit);

struct Weight {
    double log = 0.0;
    std::optional<double> linear;  // present only when |log| < 600
};

// Unnormalised stationary weight lambda^|x_U| lambda_bar^|x_V|.
Weight weight(const BipartiteGraph& g, const ModelParams& params, Mask x);

struct StationaryDistribution {
    std::vector<double> log_pi;  // normalised
    double log_z = 0.0;
    double pi(std::size_t i) const;
};

StationaryDistribution normalize(const ConfigurationSpace& space, const ModelParams& params);

// H(x) = -|x_U| - (1+alpha)|x_V|.
Rational height(const BipartiteGraph& g, Mask x, const Rational& alpha);
AsymptoticExponent pi_exponent(const BipartiteGraph& g, Mask x);

// x <= y iff x_U contains y_U and x_V is contained in y_V.
bool leq(const BipartiteGraph& g, Mask x, Mask y);
Mask join(const BipartiteGraph& g, Mask x, Mask y);
Mask meet(const BipartiteGraph& g, Mask x, Mask y);

// |U| - |x|.
int config_cost(const BipartiteGraph& g, Mask x);

std::string to_hex(Mask x);
Mask from_hex(const std::string& text);
nlohmann::json config_json(Mask x);

}  // namespace hcmeta

#include "doctest.h"

#include <cmath>
#include <random>

#include "hcmeta/configspace.hpp"
#include "hcmeta/isoperimetry.hpp"

using namespace hcmeta;

namespace {

// Counts independent sets by scanning every subset of sites.
std::size_t brute_count(const BipartiteGraph& g) {
    std::size_t count = 0;
    int n = g.num_sites();
    for (Mask x = 0; x < (Mask{1} << n); ++x) {
        bool ok = true;
        for (auto [a, b] : g.edges())
            if ((x >> a & 1) && (x >> b & 1)) ok = false;
        count += ok;
    }
    return count;
}

}  // namespace

TEST_CASE("configuration counts") {
    CHECK(ConfigurationSpace::enumerate(even_cycle(6)).size() == 18);
    CHECK(ConfigurationSpace::enumerate(complete_bipartite(2, 3)).size() == 4 + 8 - 1);
    auto k11 = ConfigurationSpace::enumerate(complete_bipartite(1, 1));
    CHECK(k11.size() == 3);
    CHECK(k11.states() == std::vector<Mask>{0, 1, 2});
}

TEST_CASE("enumeration matches a subset scan on small graphs") {
    for (auto spec : {"cycle:8", "ladder:4", "complete:3x4", "path:7", "hypercube:3", "random:6x6,0.35,3",
                      "random:7x5,0.5,11", "torus:4x4", "doubled(cycle:5)"}) {
        auto g = build_family(spec);
        auto space = ConfigurationSpace::enumerate(g);
        CHECK(space.size() == brute_count(g));
        CHECK(count_configurations(g, 1'000'000) == space.size());
        for (std::size_t i = 0; i < space.size(); ++i) {
            CHECK(is_independent(g, space.state(i)));
            CHECK(space.index_of(space.state(i)) == static_cast<long>(i));
            if (i) CHECK(space.state(i - 1) < space.state(i));
        }
        CHECK(space.state(space.u_index()) == g.u_mask());
        CHECK(space.state(space.v_index()) == g.v_mask());
    }
}

TEST_CASE("enumeration refuses above the cap") {
    auto g = even_torus(6, 6);
    CHECK_THROWS_AS(ConfigurationSpace::enumerate(g, 1000), Refusal);
    try {
        ConfigurationSpace::enumerate(g, 1000);
    } catch (const Refusal& e) {
        CHECK(std::string(e.what()).find("1000") != std::string::npos);
    }
}

TEST_CASE("graphs without V sites are rejected") {
    BipartiteGraph g(1, 0, {});
    CHECK_THROWS_AS(ConfigurationSpace::enumerate(g), InvalidArgument);
}

TEST_CASE("invalid configurations are rejected") {
    auto g = even_cycle(6);
    CHECK_THROWS_AS(make_configuration(g, {0, g.neighbors(0)[0]}), InvalidArgument);
    CHECK(ConfigurationSpace::enumerate(g).index_of(bit(0) | bit(g.neighbors(0)[0])) == -1);
}

TEST_CASE("weights") {
    auto g = complete_bipartite(2, 3);
    auto p = ModelParams::with_activities(g, 10.0, std::pow(10.0, 1.5));
    CHECK(weight(g, p, g.u_mask()).linear.value() == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(weight(g, p, 0).linear.value() == 1.0);
    CHECK(weight(g, p, g.v_mask()).linear.value() == doctest::Approx(std::pow(10.0, 4.5)).epsilon(1e-13));
    CHECK(p.gamma == doctest::Approx(11.0 * 2 + (1 + std::pow(10.0, 1.5)) * 3).epsilon(1e-15));
}

TEST_CASE("alpha-derived lambda bar") {
    auto g = even_cycle(6);
    auto p = ModelParams::from_alpha(g, 1e3, Rational(1, 2));
    CHECK(p.lambda_bar == doctest::Approx(std::pow(1e3, 1.5)).epsilon(1e-15));
    CHECK_THROWS_AS(ModelParams::from_alpha(g, 1e3, Rational(1)), InvalidArgument);
    CHECK_THROWS_AS(ModelParams::from_alpha(g, -1.0, Rational(1, 2)), InvalidArgument);
}

TEST_CASE("huge weights fall back to log form") {
    auto g = even_torus(6, 6);
    auto p = ModelParams::from_alpha(g, 1e20, Rational(7, 10));
    auto w = weight(g, p, g.v_mask());
    CHECK_FALSE(w.linear.has_value());
    CHECK(w.log == doctest::Approx(18 * 1.7 * std::log(1e20)));
}

TEST_CASE("stationary distribution normalises") {
    for (double lambda : {2.0, 1e3, 1e6}) {
        auto g = build_family("random:6x6,0.4,9");
        auto space = ConfigurationSpace::enumerate(g);
        auto d = normalize(space, ModelParams::from_alpha(g, lambda, Rational(1, 3)));
        double sum = 0.0;
        for (std::size_t i = 0; i < space.size(); ++i) sum += d.pi(i);
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("heights") {
    auto g = even_torus(6, 6);
    Rational a(7, 10);
    CHECK(height(g, g.u_mask(), a) == Rational(-18));
    CHECK(height(g, g.v_mask(), a) == Rational(-153, 5));
    CHECK(height(g, 0, a) == Rational(0));
}

TEST_CASE("height orders asymptotic stationary mass") {
    auto g = build_family("random:5x5,0.45,21");
    auto space = ConfigurationSpace::enumerate(g);
    Rational alpha(3001, 10000);
    auto lo = normalize(space, ModelParams::from_alpha(g, 1e4, alpha));
    auto hi = normalize(space, ModelParams::from_alpha(g, 1e8, alpha));
    for (std::size_t x = 0; x < space.size(); ++x)
        for (std::size_t y = 0; y < space.size(); ++y) {
            Rational hx = height(g, space.state(x), alpha), hy = height(g, space.state(y), alpha);
            if (!(hx < hy)) continue;
            double r_lo = lo.log_pi[x] - lo.log_pi[y], r_hi = hi.log_pi[x] - hi.log_pi[y];
            CHECK(r_hi > r_lo);
            CHECK(r_hi > 0.0);
        }
}

TEST_CASE("lattice order, join and meet") {
    auto g = even_torus(4, 4);
    auto space = ConfigurationSpace::enumerate(g);
    auto p = ModelParams::from_alpha(g, 7.0, Rational(1, 2));
    std::mt19937_64 rng(5);
    for (std::size_t i = 0; i < space.size(); ++i) CHECK(leq(g, g.u_mask(), space.state(i)));
    for (int t = 0; t < 1000; ++t) {
        Mask x = space.state(rng() % space.size()), y = space.state(rng() % space.size());
        CHECK(join(g, x, x) == x);
        CHECK(meet(g, x, x) == x);
        Mask j = join(g, x, y), m = meet(g, x, y);
        CHECK(is_independent(g, j));
        CHECK(is_independent(g, m));
        CHECK(v_part(g, j) == (v_part(g, x) | v_part(g, y)));
        CHECK(u_part(g, j) == (u_part(g, x) & u_part(g, y)));
        CHECK(leq(g, x, j));
        CHECK(leq(g, m, x));
        double lhs = weight(g, p, j).log + weight(g, p, m).log;
        double rhs = weight(g, p, x).log + weight(g, p, y).log;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("configuration cost") {
    auto g = even_torus(6, 6);
    CHECK(config_cost(g, g.u_mask()) == 0);
    CHECK(config_cost(g, 0) == 18);
    int b = g.v_sites()[0];
    Mask x = bit(b);
    for (int s : g.u_sites())
        if (!(g.neighbor_mask(b) & bit(s))) x |= bit(s);
    CHECK(is_independent(g, x));
    CHECK(config_cost(g, x) == 3);
}

TEST_CASE("configuration cost is bounded below by the profile") {
    auto g = cyclic_ladder(6);
    auto space = ConfigurationSpace::enumerate(g);
    auto profile = brute_force_profile(g, g.num_v());
    std::vector<bool> attained(g.num_v() + 1, false);
    for (Mask x : space.states()) {
        int s = popcount(v_part(g, x));
        CHECK(config_cost(g, x) >= profile.delta[s]);
        if (config_cost(g, x) == profile.delta[s]) attained[s] = true;
    }
    for (int s = 0; s <= g.num_v(); ++s) CHECK(attained[s]);
}

TEST_CASE("hex round trip") {
    CHECK(to_hex(0x2aULL) == "0x2a");
    CHECK(from_hex("0x2a") == 0x2aULL);
    CHECK_THROWS_AS(from_hex("zz"), InvalidArgument);
    auto j = config_json(0x5);
    CHECK(j["sites"] == nlohmann::json{0, 2});
}

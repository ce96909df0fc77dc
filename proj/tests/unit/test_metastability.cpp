#include "doctest.h"

#include <cmath>
#include <set>

#include "exact_chain.hpp"
#include "hcmeta/metastability.hpp"

using namespace hcmeta;

namespace {

int lattice_delta(int s) { return s == 0 ? 0 : static_cast<int>(std::ceil(2 * std::sqrt(static_cast<double>(s)) - 1e-12)) + 1; }

// Smallest maximiser of Delta(s) - alpha (s-1) before the resettling size, in plain fractions.
std::pair<int, std::vector<int>> argmax_g(const std::function<int(int)>& delta, const Rational& alpha) {
    Rational best;
    int best_s = 0;
    int s = 1;
    for (;; ++s) {
        Rational g = Rational(delta(s)) - alpha * Rational(s - 1);
        if (best_s == 0 || g > best) {
            best = g;
            best_s = s;
        }
        if (s > best_s && Rational(delta(s)) <= alpha * Rational(s)) break;
    }
    std::vector<int> all;
    for (int k = 1; k <= s; ++k)
        if (Rational(delta(k)) - alpha * Rational(k - 1) == best) all.push_back(k);
    return {best_s, all};
}

std::set<int> nbhd(const BipartiteGraph& g, const VSet& a) {
    std::set<int> out;
    for (int v : a)
        for (int u : g.neighbors(v)) out.insert(u);
    return out;
}

struct Setup {
    BipartiteGraph g;
    GraphFamilySpec spec;
    IsoperimetricSource src;
    CriticalAnalysis ca;
};

Setup analyse(const std::string& text, const Rational& alpha) {
    Setup s;
    s.spec = GraphFamilySpec::parse(text);
    s.g = build_family(s.spec);
    s.src = make_source(s.g, s.spec);
    s.ca = critical_analysis(s.src, alpha, default_search_bound(alpha, s.src.family), s.g.num_u());
    return s;
}

CriticalGate gate_for(const Setup& s) { return build_gate(s.g, s.ca, s.src, default_kappa(s.ca.alpha), s.spec); }

}  // namespace

TEST_CASE("critical size on the torus lattice") {
    Rational a(7, 10);
    auto ca = critical_analysis([](int s) { return torus_lattice_delta(s); }, a, 400);
    CHECK(ca.s_star == 3);
    CHECK(g_value(3, 1, a) == Rational(3));
    CHECK(g_value(4, 2, a) == Rational(33, 10));
    CHECK(g_value(5, 3, a) == Rational(36, 10));
    CHECK(g_value(5, 4, a) == Rational(29, 10));
    CHECK(ca.g_star == Rational(36, 10));
    CHECK(ca.unique_max);
    CHECK(Rational(ca.delta[ca.s_tilde]) <= a * Rational(ca.s_tilde));
    for (int s = ca.s_star + 1; s < ca.s_tilde; ++s) CHECK(Rational(ca.delta[s]) > a * Rational(s));
}

TEST_CASE("critical size of the doubled torus and the even cycle") {
    auto d = critical_analysis([](int s) { return doubled_lattice_delta(s); }, Rational(7, 10), 400);
    CHECK(d.s_star == 4);
    auto c = analyse("cycle:6", Rational(1, 2));
    CHECK(c.ca.s_star == 1);
    CHECK(c.ca.s_tilde == 2);
    CHECK(c.ca.t_star == 3 - 1 - 1);
}

TEST_CASE("critical analysis refuses without a resettling size") {
    CHECK_THROWS_AS(critical_analysis([](int s) { return 10 * s; }, Rational(1, 2), 20), Refusal);
    CHECK_THROWS_AS(critical_analysis([](int s) { return s; }, Rational(3, 2), 20), InvalidArgument);
}

TEST_CASE("lemma critical sizes equal the direct argmax") {
    for (auto a : {Rational(7, 10), Rational(11, 20), Rational(2, 5), Rational(3, 10), Rational(9, 20)}) {
        CAPTURE(to_string(a));
        auto t = torus_critical_size(a);
        auto [ts, tall] = argmax_g(lattice_delta, a);
        CHECK(t.s_star[0] == ts);
        CHECK(t.ell_star[0] == static_cast<int>(std::ceil(1.0 / to_double(a) - 1e-12)));

        auto d = doubled_torus_critical_size(a);
        auto [dstar, dall] = argmax_g([](int s) { return doubled_lattice_delta(s); }, a);
        if (d.s_star.size() == 1) {
            CHECK(d.s_star[0] == dstar);
        } else {
            CHECK_FALSE(d.generic);
            CHECK(std::set<int>(d.s_star.begin(), d.s_star.end()) == std::set<int>(dall.begin(), dall.end()));
        }
    }
    CHECK(doubled_torus_critical_size(Rational(11, 20)).regime == 1);
    CHECK(doubled_torus_critical_size(Rational(7, 10)).regime == 2);
    CHECK_FALSE(torus_critical_size(Rational(2, 5)).generic);
}

TEST_CASE("dominance sets") {
    auto g = even_cycle(6);
    auto space = ConfigurationSpace::enumerate(g);
    Rational a(1, 2);
    CHECK(dominance_sets(space, space.v_index(), a).j_minus.empty());
    auto e = dominance_sets(space, space.empty_index(), a).j_minus;
    CHECK(std::count(e.begin(), e.end(), space.u_index()) == 1);
    CHECK(std::count(e.begin(), e.end(), space.v_index()) == 1);

    auto k = complete_bipartite(2, 3);
    auto ks = ConfigurationSpace::enumerate(k);
    auto j = dominance_sets(ks, ks.u_index(), a).j;
    auto pi = normalize(ks, ModelParams::from_alpha(k, 1e6, a));
    std::vector<std::size_t> numeric;
    for (std::size_t x = 0; x < ks.size(); ++x)
        if (x != ks.u_index() && std::exp(pi.log_pi[x] - pi.log_pi[ks.u_index()]) > 0.5) numeric.push_back(x);
    CHECK(j == numeric);
}

TEST_CASE("hypotheses on the torus") {
    auto s = analyse("torus:6x6", Rational(7, 10));
    CHECK(s.ca.s_star == 3);
    auto rep = check_hypotheses(s.g, s.ca.alpha, s.src, s.ca);
    for (auto h : {"H0", "H1", "H2", "H3", "H4'", "H5'"}) {
        CAPTURE(h);
        auto st = rep.at(h).status;
        CHECK((st == Status::verified || st == Status::closed_form));
    }
}

TEST_CASE("hypotheses flag the odd path trap") {
    auto s = analyse("path:6", Rational(1, 2));
    auto rep = check_hypotheses(s.g, s.ca.alpha, s.src, s.ca);
    CHECK(rep.at("no-trap").status == Status::refuted);
    CHECK(rep.at("no-trap").evidence.find("absence of traps is not satisfied") != std::string::npos);
}

TEST_CASE("hypotheses report tied maximisers") {
    // 2/alpha = 4 is an integer, so g has two maximisers on the lattice profile.
    auto spec = GraphFamilySpec::parse("torus:20x20");
    auto g = build_family(spec);
    IsoperimetricSource src;
    src.family = closed_form_family(spec, true);
    Rational a(1, 2);
    auto ca = critical_analysis(src, a, default_search_bound(a));
    auto [s, all] = argmax_g(lattice_delta, a);
    CHECK(ca.maximizers == all);
    CHECK(all.size() > 1);
    auto rep = check_hypotheses(g, a, src, ca);
    CHECK(rep.at("H3").status == Status::refuted);
    CHECK(rep.at("H3").evidence.find("3 5") != std::string::npos);
}

TEST_CASE("torus gate") {
    auto s = analyse("torus:6x6", Rational(7, 10));
    auto gate = gate_for(s);
    CHECK(gate.count == 288);
    CHECK(gate.closed_form_count == 288u);
    CHECK(gate.transitions.size() == 288);
    CHECK(gate.characterization_ok == true);

    // A is every pair of V-sites with cost 4, built here by a direct scan.
    std::set<VSet> pairs;
    auto v = s.g.v_sites();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            if (static_cast<int>(nbhd(s.g, {v[i], v[j]}).size()) - 2 == 4) pairs.insert({v[i], v[j]});
    CHECK(pairs.size() == 36);
    CHECK(std::set<VSet>(gate.family_a.begin(), gate.family_a.end()) == pairs);

    std::uint64_t count = 0;
    for (const auto& b : gate.family_b) {
        CHECK(static_cast<int>(nbhd(s.g, b).size() - b.size()) == 5);
        for (const auto& a : gate.family_a) {
            VSet diff;
            std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(diff));
            if (diff.size() != 1 || !std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
            auto nb = nbhd(s.g, b), na = nbhd(s.g, a);
            for (int x : nb) count += !na.count(x);
        }
    }
    CHECK(count == 288);
}

TEST_CASE("gate transitions have the documented shape") {
    for (auto text : {"torus:6x6", "cycle:6", "ladder:4", "complete:2x3"}) {
        auto s = analyse(text, text[0] == 't' ? Rational(7, 10) : Rational(1, 2));
        auto gate = gate_for(s);
        std::set<Mask> a_masks, b_masks;
        for (const auto& a : gate.family_a) a_masks.insert(make_configuration(s.g, a));
        for (const auto& b : gate.family_b) b_masks.insert(make_configuration(s.g, b));
        for (const auto& [x, y] : gate.transitions) {
            CHECK(is_independent(s.g, x));
            CHECK(is_independent(s.g, y));
            Mask diff = x ^ y;
            CHECK(popcount(diff) == 1);
            CHECK((diff & x & s.g.u_mask()) == diff);
            CHECK(a_masks.count(v_part(s.g, y)) == 1);
            // y_U is U minus the neighbourhood of some B that extends y_V by one site
            bool matched = false;
            for (Mask b : b_masks) {
                if ((b & v_part(s.g, y)) != v_part(s.g, y) || popcount(b) != popcount(v_part(s.g, y)) + 1) continue;
                auto nb = nbhd(s.g, occupied_sites(b));
                Mask expect = s.g.u_mask();
                for (int u : nb) expect &= ~bit(u);
                matched = matched || expect == u_part(s.g, y);
            }
            CHECK(matched);
        }
    }
}

TEST_CASE("gate counts of cycles, doubled cycles and K23") {
    for (int n : {6, 8, 10}) {
        auto s = analyse("cycle:" + std::to_string(n), Rational(1, 2));
        auto gate = gate_for(s);
        CHECK(gate.family_a == std::vector<VSet>{VSet{}});
        CHECK(gate.family_b.size() == static_cast<std::size_t>(n / 2));
        CHECK(gate.count == static_cast<std::uint64_t>(n));
        CHECK(gate.closed_form_count == static_cast<std::uint64_t>(n));
    }
    for (int n : {4, 5, 6}) {
        auto s = analyse("doubled(cycle:" + std::to_string(n) + ")", Rational(1, 2));
        auto gate = gate_for(s);
        CHECK(gate.count == static_cast<std::uint64_t>(3 * n));
        CHECK(gate.closed_form_count == static_cast<std::uint64_t>(3 * n));
    }
    auto l = gate_for(analyse("ladder:4", Rational(1, 2)));
    CHECK(l.count == 12);
    auto k = gate_for(analyse("complete:2x3", Rational(1, 2)));
    CHECK(k.count == 6);
    CHECK(k.transitions.size() == 2);
}

TEST_CASE("doubled torus gate count") {
    auto s = analyse("doubled(torus:5x5)", Rational(7, 10));
    CHECK(s.ca.s_star == 4);
    auto gate = gate_for(s);
    CHECK(gate.count == 400);
    CHECK(gate.closed_form_count == 400u);
    CHECK(gate.conditional_on_conjecture);
}

TEST_CASE("gate construction refuses truncated witness lists") {
    auto spec = GraphFamilySpec::parse("torus:6x6");
    auto g = build_family(spec);
    IsoperimetricSource src;
    BruteForceOptions o;
    o.witness_cap = 5;
    src.brute = brute_force_profile(g, 9, o);
    auto ca = critical_analysis(src, Rational(7, 10), 30);
    CHECK_THROWS_AS(build_gate(g, ca, src, default_kappa(ca.alpha)), Refusal);
}

TEST_CASE("crossover predictions") {
    auto c = analyse("cycle:6", Rational(1, 2));
    auto cg = gate_for(c);
    auto pc = crossover_prediction(c.ca, &cg, ModelParams::from_alpha(c.g, 1e3, Rational(1, 2)));
    CHECK(pc.exponent == AsymptoticExponent{1, 0});
    CHECK(*pc.sharp == doctest::Approx(1e3 / 6).epsilon(1e-12));

    auto l = analyse("ladder:4", Rational(1, 2));
    auto lg = gate_for(l);
    auto pl = crossover_prediction(l.ca, &lg, ModelParams::from_alpha(l.g, 1e3, Rational(1, 2)));
    CHECK(*pl.sharp == doctest::Approx(1e6 / 12).epsilon(1e-12));

    auto t = analyse("torus:6x6", Rational(7, 10));
    auto tg = gate_for(t);
    auto params = ModelParams::from_alpha(t.g, 1e2, Rational(7, 10));
    auto pt = crossover_prediction(t.ca, &tg, params);
    CHECK(pt.exponent == AsymptoticExponent{5, -2});
    CHECK(*pt.log_sharp == doctest::Approx(7 * params.log_lambda - 2 * params.log_lambda_bar - std::log(288.0)));
    CHECK_FALSE(crossover_prediction(t.ca, nullptr, params).sharp);
}

TEST_CASE("predicted order equals pi(u) Psi(u, J(u)) in continuous time") {
    for (auto text : {"cycle:6", "ladder:4", "complete:2x3", "hypercube:3"}) {
        CAPTURE(text);
        Rational a(1, 2);
        auto s = analyse(text, a);
        auto space = ConfigurationSpace::enumerate(s.g);
        auto net = build_network(space, ModelParams::from_alpha(s.g, 2.0, a));
        auto j = dominance_sets(space, space.u_index(), a).j;
        auto psi = critical_resistance_symbolic(net, {space.u_index()}, j, a);
        auto order = pi_exponent(s.g, space.u()) + psi.exponent - gamma_exponent();
        auto pred = crossover_prediction(s.ca, nullptr, ModelParams::from_alpha(s.g, 2.0, a));
        CHECK(order.value(a) == pred.value);
    }
}

TEST_CASE("girth lower bound on regular instances") {
    for (auto text : {"ladder:4", "ladder:6", "hypercube:3", "hypercube:4"}) {
        CAPTURE(text);
        Rational a(1, 2);
        auto s = analyse(text, a);
        auto girth_value = validate(s.g).girth;
        REQUIRE(girth_value);
        int sl = *girth_value / 2;
        auto space = ConfigurationSpace::enumerate(s.g);
        auto net = build_network(space, ModelParams::from_alpha(s.g, 2.0, a));
        auto j = dominance_sets(space, space.u_index(), a).j;
        auto psi = critical_resistance_symbolic(net, {space.u_index()}, j, a);
        auto order = pi_exponent(s.g, space.u()) + psi.exponent - gamma_exponent();
        CHECK(order.value(a) >= Rational(s.src.delta(sl)) - a * Rational(sl - 1));
    }
}

TEST_CASE("critical pair conditions") {
    for (auto text : {"cycle:6", "complete:2x3", "ladder:4"}) {
        CAPTURE(text);
        auto s = analyse(text, Rational(1, 2));
        auto gate = gate_for(s);
        auto space = ConfigurationSpace::enumerate(s.g);
        auto net = build_network(space, ModelParams::from_alpha(s.g, 2.0, Rational(1, 2)));
        auto rep = critical_pair_check(net, gate, Rational(1, 2));
        CHECK(rep.ok());
        CHECK(rep.problems.empty());
    }
}

TEST_CASE("no-trap certificates") {
    Rational a(1, 2);
    for (auto text : {"complete:2x3", "cycle:6", "ladder:4"}) {
        CAPTURE(text);
        auto g = build_family(text);
        auto space = ConfigurationSpace::enumerate(g);
        auto rep = no_trap_certificate(space, a);
        CHECK(rep.verdict == NoTrapReport::Verdict::certified);
        CHECK(rep.checked == space.size() - 2);
        auto serial = no_trap_certificate_serial(space, a);
        CHECK(serial.verdict == rep.verdict);
        CHECK(serial.u_exponent == rep.u_exponent);
    }
    auto cyc = ConfigurationSpace::enumerate(even_cycle(6));
    CHECK(no_trap_certificate(cyc, a).checked == 16);

    auto p = build_family("path:6");
    auto ps = ConfigurationSpace::enumerate(p);
    auto rep = no_trap_certificate(ps, a);
    CHECK(rep.verdict == NoTrapReport::Verdict::refuted);
    REQUIRE_FALSE(rep.violations.empty());
    for (const auto& v : rep.violations) CHECK((v.order == Order::greater || v.order == Order::equal || v.stable));
}

TEST_CASE("standard path") {
    auto g = even_cycle(6);
    Rational a(1, 2);
    int b = g.v_sites()[0];
    auto one = standard_path(g, {b}, a);
    CHECK(one.path.size() == 4);
    CHECK(one.backbone == std::vector<std::size_t>{0, 3});
    CHECK(one.path.front() == g.u_mask());
    CHECK(one.path.back() == ((g.u_mask() & ~g.neighbor_mask(b)) | bit(b)));

    // A numbering reaching the resettling size realises Psi(u, J(u)).
    auto space = ConfigurationSpace::enumerate(g);
    auto net = build_network(space, ModelParams::from_alpha(g, 2.0, a));
    auto j = dominance_sets(space, space.u_index(), a).j;
    auto psi = critical_resistance_symbolic(net, {space.u_index()}, j, a);
    int b2 = -1;
    for (int v : g.v_sites())
        if (v != b && nbhd(g, {b, v}).size() == 3) b2 = v;
    REQUIRE(b2 >= 0);
    auto two = standard_path(g, {b, b2}, a);
    CHECK(two.psi_value == psi.value);
    CHECK(two.psi_exponent.value(a) == two.predicted.value(a));

    auto t = even_torus(8, 8);
    Rational ta(7, 10);
    auto spiral = spiral_numbering(t, t.v_sites()[0], 9);
    auto tp = standard_path(t, spiral, ta);
    CHECK(tp.s_dagger == 3);
    CHECK(tp.psi_exponent.value(ta) == tp.predicted.value(ta));
    CHECK(tp.predicted == AsymptoticExponent{1 - 32 + 5, 1 - 2});

    CHECK_THROWS_AS(standard_path(g, {0}, a), InvalidArgument);
    CHECK_THROWS_AS(standard_path(g, {b, b}, a), InvalidArgument);
}

TEST_CASE("gate statistics bookkeeping") {
    CriticalGate gate;
    gate.transitions = {{0x3, 0x1}};
    std::vector<HittingSample> samples(4);
    for (int i = 0; i < 3; ++i) samples[i].gate_events = {{0x3, 0x1}};
    samples[3].gate_events = {{0x3, 0x1}, {0x3, 0x1}};
    auto st = gate_statistics(samples, gate);
    CHECK(st.frequencies == std::vector<double>{1.0});
    CHECK(st.single_crossing == 3);
    CHECK(st.single_fraction == 0.75);
    CHECK(st.all_counts[0] == 5);

    gate.transitions = {{0x3, 0x1}, {0x5, 0x1}};
    std::vector<HittingSample> two(30);
    for (int i = 0; i < 30; ++i) two[i].gate_events = {i < 20 ? Transition{0x3, 0x1} : Transition{0x5, 0x1}};
    auto s2 = gate_statistics(two, gate);
    double chi = (25.0 + 25.0) / 15.0;
    CHECK(s2.chi_square == doctest::Approx(chi));
    CHECK(s2.p_value == doctest::Approx(std::erfc(std::sqrt(chi / 2))).epsilon(1e-10));
    two[0].timed_out = true;
    CHECK(gate_statistics(two, gate).samples == 29);
}

TEST_CASE("gate passage on the even cycle") {
    auto s = analyse("cycle:6", Rational(1, 2));
    auto gate = gate_for(s);
    auto watched = gate.transition_set();
    auto p = ModelParams::from_alpha(s.g, 1e3, Rational(1, 2));
    SimulationOptions o;
    o.gate = &watched;
    const std::size_t n = 3000;
    auto batch = sample_crossover(s.g, p, s.g.u_mask(), TargetSet({s.g.v_mask()}), n, 42, o);
    auto st = gate_statistics(batch.samples, gate);
    REQUIRE(st.samples == n);
    for (double f : st.frequencies) CHECK(std::abs(f - 1.0 / 6) < 3 * std::sqrt((1.0 / 6) * (5.0 / 6) / n));

    auto space = ConfigurationSpace::enumerate(s.g);
    double exact = testing::single_crossing_probability(space, p, watched, s.g.u_mask(), s.g.v_mask());
    CHECK(std::abs(st.single_fraction - exact) < 3 * std::sqrt(exact * (1 - exact) / n));
    // The exact value stays below 0.95 at this activity and approaches 1 as it grows.
    auto p_big = ModelParams::from_alpha(s.g, 1e6, Rational(1, 2));
    double exact_big = testing::single_crossing_probability(space, p_big, watched, s.g.u_mask(), s.g.v_mask());
    CHECK(exact < 0.95);
    CHECK(exact_big > exact);
    CHECK(exact_big > 0.99);
}

TEST_CASE("analysis json") {
    auto s = analyse("torus:6x6", Rational(7, 10));
    auto gate = gate_for(s);
    auto pred = crossover_prediction(s.ca, &gate, ModelParams::from_alpha(s.g, 10.0, Rational(7, 10)));
    auto hyp = check_hypotheses(s.g, s.ca.alpha, s.src, s.ca);
    auto j = analysis_json(s.ca, &gate, &pred, &hyp);
    CHECK(j["s_star"] == 3);
    CHECK(j["g_star"] == "18/5");
    CHECK(j["gate_count"] == 288);
    CHECK(j["exponent"] == nlohmann::json{5, -2});
    CHECK(j["sharp_prefactor"].get<double>() == doctest::Approx(1.0 / 288));
    CHECK(j["hypotheses"]["H0"]["status"] == "verified");
}

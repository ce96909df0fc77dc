#include "doctest.h"

#include <cstdlib>

#include "hcmeta/config.hpp"
#include "hcmeta/errors.hpp"
#include "hcmeta/verify.hpp"

using namespace hcmeta;
using nlohmann::json;

TEST_CASE("config normalises graph and alpha") {
    auto c = ExperimentConfig::from_json(json::parse(R"({"graph": "torus:6x6", "alpha": "14/20", "lambda": 1000})"));
    CHECK(c.graph == "torus:6x6");
    CHECK(c.alpha == "7/10");
    CHECK(c.lambdas == std::vector<double>{1000.0});
    auto d = ExperimentConfig::from_json(json::parse(R"({"alpha": 0.5, "lambda": [10, 100]})"));
    CHECK(d.alpha == "1/2");
    CHECK(d.lambdas.size() == 2);
}

TEST_CASE("config round trip") {
    for (auto text : {R"j({"graph": "doubled(torus:5x5)", "alpha": "11/20", "lambda": [1e3, 1e4], "samples": 300,
                          "seed": 7, "options": {"gate": true}, "output": "out.json",
                          "thresholds": {"ks_p_min": 0.05}})j",
                      R"({"graph": "cycle:8"})", R"({})"}) {
        CAPTURE(text);
        auto c = ExperimentConfig::from_json(json::parse(text));
        auto j = c.to_json();
        auto again = ExperimentConfig::from_json(j);
        CHECK(again.to_json() == j);
        CHECK(dump17(again.to_json()) == dump17(j));
    }
    auto c = ExperimentConfig::from_json(json::parse(R"({"thresholds": {"ks_p_min": 0.05}, "seed": 7})"));
    CHECK(c.thresholds.ks_p_min == 0.05);
    CHECK(c.thresholds.ks_samples == 2000);
    CHECK(c.seed == 7);
}

TEST_CASE("thresholds may be given at the top level") {
    auto c = ExperimentConfig::from_json(json::parse(R"({"ks_p_min": 0.02, "single_crossing_min": 0.8})"));
    CHECK(c.thresholds.ks_p_min == 0.02);
    CHECK(c.thresholds.single_crossing_min == 0.8);
}

TEST_CASE("invalid configs") {
    for (auto text : {R"([1, 2])", R"({"graph": "torus:5x5x"})", R"({"alpha": "a/b"})", R"({"lambda": -1})",
                      R"({"lambda": "big"})", R"({"samples": "many"})", R"({"thresholds": {"ks_p_min": "x"}})"}) {
        CAPTURE(text);
        CHECK_THROWS_AS(ExperimentConfig::from_json(json::parse(text)), InvalidArgument);
    }
}

TEST_CASE("numbers are written with 17 significant digits") {
    CHECK(format17(0.1) == "0.10000000000000001");
    CHECK(format17(1e3) == "1000");
    CHECK(format17(1.0 / 3.0) == "0.33333333333333331");
    json j = {{"a", 0.1}, {"b", {1, 2.5, "s"}}, {"c", {{"d", true}, {"e", nullptr}}}};
    CHECK(dump17(j) == R"({"a": 0.10000000000000001, "b": [1, 2.5, "s"], "c": {"d": true, "e": null}})");
    // Every double survives a round trip through the text.
    for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 123456.789}) CHECK(std::strtod(format17(x).c_str(), nullptr) == x);
}

TEST_CASE("verification runner") {
    auto r = run_criterion(1);
    CHECK(r.id == 1);
    CHECK(r.pass);
    CHECK(r.seconds >= 0.0);
    CHECK_THROWS_AS(run_criterion(0), InvalidArgument);
    CHECK_THROWS_AS(run_criterion(criterion_count + 1), InvalidArgument);

    VerifyOptions o;
    o.only = {9, 2};
    auto rs = run_acceptance(o);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].id == 2);
    CHECK(rs[1].id == 9);
    auto table = verify_table(rs);
    CHECK(table.find(" 2  PASS  even-cycle sharp mean") != std::string::npos);
    CHECK(table.find("2/2 criteria passed") != std::string::npos);

    CriterionResult failed{6, "gate passage on the even cycle", false, "fraction 0.88", 1.5};
    CHECK(verify_table({failed}).find(" 6  FAIL  gate passage") == 0);
    CHECK(verify_table({failed}).find("0/1 criteria passed") != std::string::npos);
}

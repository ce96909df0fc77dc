#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "hcmeta/stats.hpp"

using namespace hcmeta;

namespace {

// sup |F_n - t| for a sorted uniform sample.
double uniform_statistic(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    double n = static_cast<double>(u.size()), d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
    return d;
}

}  // namespace

TEST_CASE("Kolmogorov tail for one and two observations") {
    for (double d : {0.55, 0.7, 0.9}) CHECK(kolmogorov_pvalue(1, d) == doctest::Approx(2 * (1 - d)).epsilon(1e-12));
    CHECK(kolmogorov_pvalue(1, 0.3) == doctest::Approx(1.0));
    for (double d : {0.3, 0.4, 0.45}) CHECK(kolmogorov_pvalue(2, d) == doctest::Approx(1 - 2 * std::pow(2 * d - 0.5, 2)).epsilon(1e-12));
    for (double d : {0.6, 0.8}) CHECK(kolmogorov_pvalue(2, d) == doctest::Approx(2 * std::pow(1 - d, 2)).epsilon(1e-12));
}

TEST_CASE("Kolmogorov tail matches simulation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t n : {10, 50}) {
        const int reps = 20000;
        std::vector<double> stats(reps);
        for (auto& s : stats) {
            std::vector<double> u(n);
            for (auto& x : u) x = unif(rng);
            s = uniform_statistic(u);
        }
        for (double d : {0.15, 0.25, 0.35}) {
            double tail = static_cast<double>(std::count_if(stats.begin(), stats.end(), [d](double s) { return s >= d; })) / reps;
            double p = kolmogorov_pvalue(n, d);
            CHECK(std::abs(tail - p) < 4 * std::sqrt(p * (1 - p) / reps) + 1e-4);
        }
    }
}

TEST_CASE("exact and asymptotic branches meet") {
    std::string m1, m2;
    std::size_t n = 500;
    double d = std::sqrt(18.0 / n);
    double below = kolmogorov_pvalue(n, d * 0.9999, &m1), above = kolmogorov_pvalue(n, d * 1.0001, &m2);
    CHECK(m1 == "exact");
    CHECK(m2 == "asymptotic");
    // The true tail is about 2 exp(-36); the exact branch resolves it down to rounding of 1 - F.
    CHECK(below < 1e-13);
    CHECK(above < 1e-15);
    // Kolmogorov limit at sqrt(n) d = 1.36 is about 0.049.
    CHECK(kolmogorov_pvalue(10000, 1.36 / std::sqrt(10000.0)) == doctest::Approx(0.0494).epsilon(0.03));
    CHECK(kolmogorov_pvalue(5, 0.0) == 1.0);
    CHECK(kolmogorov_pvalue(5, 1.0) == 0.0);
    CHECK_THROWS_AS(kolmogorov_pvalue(0, 0.1), InvalidArgument);
}

TEST_CASE("exponential samples pass the KS test") {
    int passes = 0;
    for (int batch = 0; batch < 100; ++batch) {
        std::mt19937_64 rng(1000 + batch);
        std::exponential_distribution<double> e(1.0);
        std::vector<double> x(2000);
        for (auto& v : x) v = 3.5 * e(rng);
        auto r = ks_exponential_test(x);
        CHECK(r.p_value >= 0.0);
        CHECK(r.p_value <= 1.0);
        passes += r.p_value > 0.01;
    }
    CHECK(passes >= 99);
}

TEST_CASE("non-exponential samples are rejected") {
    std::vector<double> constant(500, 2.0);
    auto c = ks_exponential_test(constant);
    CHECK(c.p_value < 1e-10);
    CHECK(c.statistic == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::gamma_distribution<double> sum_of_three(3.0, 1.0);
    std::vector<double> x(2000);
    for (auto& v : x) v = sum_of_three(rng);
    CHECK(ks_exponential_test(x).p_value < 0.01);
}

TEST_CASE("KS input validation") {
    CHECK_THROWS_AS(ks_exponential_test(std::vector<double>(99, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(ks_exponential_test(std::vector<double>(200, 0.0)), InvalidArgument);
    CHECK_NOTHROW(ks_exponential_test(std::vector<double>(10, 1.0), 10));
}

TEST_CASE("thresholds from json") {
    StatThresholds d;
    CHECK(d.ks_p_min == 0.01);
    CHECK(d.ks_samples == 2000);
    auto t = StatThresholds::from_json({{"ks_p_min", 0.05}, {"ks_samples", 500}});
    CHECK(t.ks_p_min == 0.05);
    CHECK(t.ks_samples == 500);
    CHECK(t.chi_square_p_min == 0.01);
    CHECK(t.single_crossing_min == 0.95);
    CHECK(StatThresholds::from_json(t.to_json()).to_json() == t.to_json());
}

TEST_CASE("mean estimate") {
    auto e = estimate_mean({1.0, 2.0, 3.0, 4.0});
    CHECK(e.mean == 2.5);
    CHECK(e.variance == doctest::Approx(5.0 / 3));
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 12)));
    CHECK(estimate_mean({}).mean == 0.0);
}

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "hcmeta/errors.hpp"

namespace hcmeta {

struct KsResult {
    std::size_t n = 0;
    double statistic = 0.0;  // sup |F_n - F|
    double p_value = 1.0;
    std::string method;  // "exact" or "asymptotic"
};

// Kolmogorov distribution P(D_n >= d) for a fully specified continuous null.  Uses the
// Marsaglia-Tsang-Wang matrix recursion when n d^2 < 18 and the Stephens-corrected
// asymptotic series otherwise (the tail there is below 1e-15).
double kolmogorov_pvalue(std::size_t n, double d, std::string* method = nullptr);

// One-sample KS of x / mean(x) against 1 - exp(-t).  The mean is estimated from the
// same sample, so the p-value is conservative (the Lilliefors effect makes it too large).
// Throws InvalidArgument with fewer than `min_samples` values.
KsResult ks_exponential_test(const std::vector<double>& samples, std::size_t min_samples = 100);

// Pre-registered thresholds; the CLI reads overrides from a JSON config file.
struct StatThresholds {
    double ks_p_min = 0.01;
    std::size_t ks_samples = 2000;
    double chi_square_p_min = 0.01;
    double single_crossing_min = 0.95;

    static StatThresholds from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct MeanEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
};

MeanEstimate estimate_mean(const std::vector<double>& x);

}  // namespace hcmeta

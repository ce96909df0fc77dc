#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcmeta/stats.hpp"

namespace hcmeta {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    StatThresholds thresholds;
    std::uint64_t seed = 42;
    int threads = 0;
    std::vector<int> only;  // empty means all criteria
};

constexpr int criterion_count = 13;

// Runs the acceptance criteria in order.  An exception inside a criterion is reported as a failure.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts = {});
CriterionResult run_criterion(int id, const VerifyOptions& opts = {});

std::string verify_table(const std::vector<CriterionResult>& results);

}  // namespace hcmeta

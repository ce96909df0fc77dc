#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hcmeta/stats.hpp"

namespace hcmeta {

// Shared experiment settings; command-line flags override values read from a file.
struct ExperimentConfig {
    std::string graph;
    std::optional<std::string> alpha;  // fraction, e.g. "7/10"
    std::vector<double> lambdas;
    std::size_t samples = 2000;
    std::uint64_t seed = 42;
    nlohmann::json options = nlohmann::json::object();
    std::string output;
    StatThresholds thresholds;

    // Graph spec and alpha are normalised on the way in.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// JSON text with every floating-point number written with 17 significant digits.
std::string dump17(const nlohmann::json& j);
std::string format17(double x);

}  // namespace hcmeta

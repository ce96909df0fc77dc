#include "hcmeta/config.hpp"

#include <cmath>
#include <cstdio>

#include "hcmeta/errors.hpp"
#include "hcmeta/exponent.hpp"
#include "hcmeta/graph.hpp"

namespace hcmeta {

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
    ExperimentConfig c;
    try {
        if (j.contains("graph")) c.graph = GraphFamilySpec::parse(j.at("graph").get<std::string>()).to_string();
        if (j.contains("alpha")) {
            const auto& a = j.at("alpha");
            c.alpha = to_string(parse_rational(a.is_string() ? a.get<std::string>() : a.dump()));
        }
        if (j.contains("lambda")) {
            const auto& l = j.at("lambda");
            if (l.is_array())
                c.lambdas = l.get<std::vector<double>>();
            else
                c.lambdas = {l.get<double>()};
        }
        c.samples = j.value("samples", c.samples);
        c.seed = j.value("seed", c.seed);
        if (j.contains("options")) c.options = j.at("options");
        c.output = j.value("output", c.output);
        // Thresholds may sit under "thresholds" or at the top level.
        c.thresholds = StatThresholds::from_json(j.contains("thresholds") ? j.at("thresholds") : j);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    for (double l : c.lambdas)
        if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("config: lambda values must be positive");
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    if (!graph.empty()) j["graph"] = graph;
    if (alpha) j["alpha"] = *alpha;
    j["lambda"] = lambdas;
    j["samples"] = samples;
    j["seed"] = seed;
    j["options"] = options;
    if (!output.empty()) j["output"] = output;
    j["thresholds"] = thresholds.to_json();
    return j;
}

std::string format17(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void write(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ", ";
                first = false;
                out += nlohmann::json(it.key()).dump();
                out += ": ";
                write(it.value(), out);
            }
            out += '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write(j[i], out);
            }
            out += ']';
            break;
        }
        case nlohmann::json::value_t::number_float: out += format17(j.get<double>()); break;
        default: out += j.dump(); break;
    }
}

}  // namespace

std::string dump17(const nlohmann::json& j) {
    std::string out;
    write(j, out);
    return out;
}

}  // namespace hcmeta

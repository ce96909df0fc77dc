#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hcmeta/configspace.hpp"

namespace hcmeta {

struct TransitionKernel {
    const ConfigurationSpace* space = nullptr;  // must outlive the kernel
    ModelParams params;
    std::vector<std::size_t> row_start;  // CSR over off-diagonal entries
    std::vector<std::uint32_t> col;
    std::vector<double> prob;
    std::vector<double> self_loop;

    std::size_t size() const { return self_loop.size(); }
    // K(i,j) including the diagonal; zero when the states are not adjacent.
    double operator()(std::size_t i, std::size_t j) const;
};

TransitionKernel build_kernel(const ConfigurationSpace& space, const ModelParams& params);

using Transition = std::pair<Mask, Mask>;

// Sorted set of directed transitions or target configurations, searched by bisection.
struct TransitionSet {
    std::vector<Transition> items;
    explicit TransitionSet(std::vector<Transition> t = {});
    bool contains(const Transition& t) const;
};

struct TargetSet {
    std::vector<Mask> items;
    explicit TargetSet(std::vector<Mask> t = {});
    bool contains(Mask x) const;
};

enum class SimulationMethod {
    stepwise,  // one kernel step per iteration (reference)
    jump       // jump chain with sampled holding steps
};

struct SimulationOptions {
    std::uint64_t step_cap = 10'000'000'000ULL;
    // Sample real exponential holding times of the rate-gamma clock; otherwise t_hat = steps/gamma.
    bool embedded_clock = false;
    SimulationMethod method = SimulationMethod::jump;
    const TransitionSet* gate = nullptr;
};

struct HittingSample {
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    double t_hat = 0.0;
    Mask terminal = 0;
    std::vector<Transition> gate_events;
    bool timed_out = false;  // a timeout is not a sample: steps/t_hat are only lower bounds
};

HittingSample simulate_hit(const BipartiteGraph& g, const ModelParams& params, Mask start,
                           const TargetSet& targets, std::uint64_t seed, const SimulationOptions& opts = {});
HittingSample simulate_hit(const TransitionKernel& kernel, Mask start, const TargetSet& targets,
                           std::uint64_t seed, const SimulationOptions& opts = {});

struct CrossoverSummary {
    std::size_t n = 0;
    std::size_t timeouts = 0;
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
    std::vector<double> scaled_sorted;  // t_hat / mean, ascending (empirical CDF support)
};

struct CrossoverBatch {
    std::vector<HittingSample> samples;
    CrossoverSummary summary;
};

// Sample i uses seed base_seed + i.  threads <= 0 means the OpenMP default.
CrossoverBatch sample_crossover(const BipartiteGraph& g, const ModelParams& params, Mask start,
                                const TargetSet& targets, std::size_t n_samples, std::uint64_t base_seed,
                                const SimulationOptions& opts = {}, int threads = 0);
CrossoverBatch sample_crossover_serial(const BipartiteGraph& g, const ModelParams& params, Mask start,
                                       const TargetSet& targets, std::size_t n_samples,
                                       std::uint64_t base_seed, const SimulationOptions& opts = {});

CrossoverSummary summarize(const std::vector<HittingSample>& samples);

struct CoupledRun {
    std::vector<Mask> lower;  // trajectory started at x
    std::vector<Mask> upper;  // trajectory started at x'
    std::vector<std::uint64_t> violations;  // steps where lower <= upper failed
};

// Common-clock coupling of two hard-core chains with lambda1 >= lambda2 and
// lambda_bar1 <= lambda_bar2.  Both chains share the site choice and the uniform
// variate; with identical parameters each marginal is exactly the kernel K.
CoupledRun coupled_simulate(const BipartiteGraph& g, const ModelParams& p1, const ModelParams& p2, Mask x,
                            Mask x_prime, std::uint64_t horizon, std::uint64_t seed,
                            bool keep_trajectories = true);

inline double continuous_mean(double mean_steps, const ModelParams& params) { return mean_steps / params.gamma; }

// Visit counts per state along a stepwise trajectory (long-run sanity checks).
std::vector<std::uint64_t> occupation_counts(const ConfigurationSpace& space, const ModelParams& params,
                                             Mask start, std::uint64_t steps, std::uint64_t seed);

nlohmann::json sample_json(std::size_t index, const HittingSample& s);

}  // namespace hcmeta

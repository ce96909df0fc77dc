// Serial reference kernels against their OpenMP versions, and stepwise against jump-chain simulation.

#include <benchmark/benchmark.h>

#include "hcmeta/metastability.hpp"

using namespace hcmeta;

namespace {

void crossover(benchmark::State& state, bool parallel) {
    auto g = even_cycle(6);
    auto p = ModelParams::from_alpha(g, 100.0, Rational(1, 2));
    TargetSet target({g.v_mask()});
    for (auto _ : state) {
        auto b = parallel ? sample_crossover(g, p, g.u_mask(), target, 400, 1)
                          : sample_crossover_serial(g, p, g.u_mask(), target, 400, 1);
        benchmark::DoNotOptimize(b.summary.mean);
    }
}

void brute_force(benchmark::State& state, bool parallel) {
    auto g = even_torus(8, 8);
    BruteForceOptions o;
    o.keep_witnesses = false;
    for (auto _ : state) {
        auto p = parallel ? brute_force_profile(g, 5, o) : brute_force_profile_serial(g, 5, o);
        benchmark::DoNotOptimize(p.delta.back());
    }
}

void no_trap(benchmark::State& state, bool parallel) {
    auto space = ConfigurationSpace::enumerate(even_torus(4, 4));
    Rational alpha(7, 10);
    for (auto _ : state) {
        auto r = parallel ? no_trap_certificate(space, alpha) : no_trap_certificate_serial(space, alpha);
        benchmark::DoNotOptimize(r.checked);
    }
}

void simulation_method(benchmark::State& state, SimulationMethod method) {
    auto g = cyclic_ladder(4);
    auto p = ModelParams::from_alpha(g, 30.0, Rational(7, 10));
    auto space = ConfigurationSpace::enumerate(g);
    auto kernel = build_kernel(space, p);
    TargetSet target({g.v_mask()});
    SimulationOptions o;
    o.method = method;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_hit(kernel, g.u_mask(), target, seed++, o).steps);
}

}  // namespace

BENCHMARK_CAPTURE(crossover, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(crossover, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(brute_force, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(brute_force, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(no_trap, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(no_trap, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(simulation_method, stepwise, SimulationMethod::stepwise)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(simulation_method, jump, SimulationMethod::jump)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

#include "hcmeta/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hcmeta/parallel.hpp"
#include "hcmeta/rng.hpp"

namespace hcmeta {

double TransitionKernel::operator()(std::size_t i, std::size_t j) const {
    if (i == j) return self_loop[i];
    for (std::size_t k = row_start[i]; k < row_start[i + 1]; ++k)
        if (col[k] == j) return prob[k];
    return 0.0;
}

TransitionKernel build_kernel(const ConfigurationSpace& space, const ModelParams& params) {
    const auto& g = space.graph();
    TransitionKernel k;
    k.space = &space;
    k.params = params;
    k.row_start.push_back(0);
    k.self_loop.resize(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        Mask x = space.state(i);
        std::vector<std::pair<std::uint32_t, double>> row;
        double rate_sum = 0.0;
        for (int s = 0; s < g.num_sites(); ++s) {
            double rate;
            if (x & bit(s))
                rate = 1.0;
            else if (!(g.neighbor_mask(s) & x))
                rate = params.activity(g.in_u(s));
            else
                continue;
            row.emplace_back(static_cast<std::uint32_t>(space.index_of(x ^ bit(s))), rate / params.gamma);
            rate_sum += rate;
        }
        std::sort(row.begin(), row.end());
        for (auto [j, p] : row) {
            k.col.push_back(j);
            k.prob.push_back(p);
        }
        k.row_start.push_back(k.col.size());
        k.self_loop[i] = (params.gamma - rate_sum) / params.gamma;
    }
    return k;
}

TransitionSet::TransitionSet(std::vector<Transition> t) : items(std::move(t)) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
}

bool TransitionSet::contains(const Transition& t) const { return std::binary_search(items.begin(), items.end(), t); }

TargetSet::TargetSet(std::vector<Mask> t) : items(std::move(t)) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
}

bool TargetSet::contains(Mask x) const { return std::binary_search(items.begin(), items.end(), x); }

namespace {

double exponential(CounterRng& rng, double rate) { return -std::log(rng.uniform()) / rate; }

void record_gate(const SimulationOptions& opts, Mask from, Mask to, HittingSample& s) {
    if (opts.gate && opts.gate->contains({from, to})) s.gate_events.emplace_back(from, to);
}

HittingSample run_stepwise(const BipartiteGraph& g, const ModelParams& p, Mask x, const TargetSet& targets,
                           CounterRng& rng, const SimulationOptions& opts, HittingSample s) {
    const double u_weight = 1.0 + p.lambda;
    const double v_weight = 1.0 + p.lambda_bar;
    const double u_block = p.nu * u_weight;
    const double keep_u = p.lambda / u_weight;
    const double keep_v = p.lambda_bar / v_weight;
    while (true) {
        if (s.steps >= opts.step_cap) {
            s.timed_out = true;
            break;
        }
        double r = rng.uniform() * p.gamma;
        int site;
        double keep;
        if (r < u_block) {
            site = std::min(p.nu - 1, static_cast<int>(r / u_weight));
            keep = keep_u;
        } else {
            site = p.nu + std::min(p.nv - 1, static_cast<int>((r - u_block) / v_weight));
            keep = keep_v;
        }
        bool occupy = rng.uniform() < keep && !(g.neighbor_mask(site) & x);
        Mask y = occupy ? (x | bit(site)) : (x & ~bit(site));
        ++s.steps;
        if (opts.embedded_clock) s.t_hat += exponential(rng, p.gamma);
        if (y != x) {
            record_gate(opts, x, y, s);
            x = y;
            if (targets.contains(x)) break;
        }
    }
    s.terminal = x;
    if (!opts.embedded_clock) s.t_hat = static_cast<double>(s.steps) / p.gamma;
    return s;
}

HittingSample run_jump(const BipartiteGraph& g, const ModelParams& p, Mask x, const TargetSet& targets,
                       CounterRng& rng, const SimulationOptions& opts, HittingSample s) {
    const int n = g.num_sites();
    std::vector<double> rate(n);
    while (true) {
        double total = 0.0;
        for (int site = 0; site < n; ++site) {
            if (x & bit(site))
                rate[site] = 1.0;
            else if (!(g.neighbor_mask(site) & x))
                rate[site] = p.activity(g.in_u(site));
            else
                rate[site] = 0.0;
            total += rate[site];
        }
        // Holding period: with the clock, an Exp(total) sojourn carries an independent
        // Poisson number of silent ticks; without it, a geometric number of steps.
        std::uint64_t held;
        if (opts.embedded_clock) {
            double t = exponential(rng, total);
            double silent_mean = (p.gamma - total) * t;
            std::uint64_t silent = 0;
            if (silent_mean > 0.0) silent = std::poisson_distribution<std::uint64_t>(silent_mean)(rng);
            held = 1 + silent;
            s.t_hat += t;
        } else {
            double leave = total / p.gamma;
            if (leave >= 1.0) {
                held = 1;
            } else {
                double draw = std::floor(std::log(rng.uniform()) / std::log1p(-leave));
                held = 1 + static_cast<std::uint64_t>(std::min(draw, 1.8e19));
            }
        }
        if (held > opts.step_cap - s.steps) {
            s.steps = opts.step_cap;
            s.timed_out = true;
            break;
        }
        s.steps += held;
        double r = rng.uniform() * total;
        int site = 0;
        for (; site < n - 1; ++site) {
            if (r < rate[site]) break;
            r -= rate[site];
        }
        while (rate[site] == 0.0) --site;  // guards against rounding past the last positive rate
        Mask y = x ^ bit(site);
        record_gate(opts, x, y, s);
        x = y;
        if (targets.contains(x)) break;
    }
    s.terminal = x;
    if (!opts.embedded_clock) s.t_hat = static_cast<double>(s.steps) / p.gamma;
    return s;
}

}  // namespace

HittingSample simulate_hit(const BipartiteGraph& g, const ModelParams& params, Mask start,
                           const TargetSet& targets, std::uint64_t seed, const SimulationOptions& opts) {
    if (targets.items.empty()) throw InvalidArgument("simulate_hit: empty target set");
    if (!g.fits_mask()) throw InvalidArgument("simulate_hit: graph exceeds 64 sites");
    if (!is_independent(g, start)) throw InvalidArgument("simulate_hit: start is not a valid configuration");
    HittingSample s;
    s.seed = seed;
    if (targets.contains(start)) {
        s.terminal = start;
        return s;
    }
    CounterRng rng(seed);
    if (opts.method == SimulationMethod::stepwise) return run_stepwise(g, params, start, targets, rng, opts, s);
    return run_jump(g, params, start, targets, rng, opts, s);
}

HittingSample simulate_hit(const TransitionKernel& kernel, Mask start, const TargetSet& targets,
                           std::uint64_t seed, const SimulationOptions& opts) {
    return simulate_hit(kernel.space->graph(), kernel.params, start, targets, seed, opts);
}

CrossoverSummary summarize(const std::vector<HittingSample>& samples) {
    CrossoverSummary sum;
    std::vector<double> t;
    for (const auto& s : samples) {
        if (s.timed_out)
            ++sum.timeouts;
        else
            t.push_back(s.t_hat);
    }
    sum.n = t.size();
    if (t.empty()) return sum;
    double acc = 0.0;
    for (double v : t) acc += v;
    sum.mean = acc / static_cast<double>(t.size());
    double sq = 0.0;
    for (double v : t) sq += (v - sum.mean) * (v - sum.mean);
    sum.variance = t.size() > 1 ? sq / static_cast<double>(t.size() - 1) : 0.0;
    sum.std_error = std::sqrt(sum.variance / static_cast<double>(t.size()));
    sum.scaled_sorted = t;
    std::sort(sum.scaled_sorted.begin(), sum.scaled_sorted.end());
    if (sum.mean > 0.0)
        for (double& v : sum.scaled_sorted) v /= sum.mean;
    return sum;
}

CrossoverBatch sample_crossover(const BipartiteGraph& g, const ModelParams& params, Mask start,
                                const TargetSet& targets, std::size_t n_samples, std::uint64_t base_seed,
                                const SimulationOptions& opts, int threads) {
    if (n_samples < 1) throw InvalidArgument("sample_crossover needs at least one sample");
    CrossoverBatch batch;
    batch.samples.resize(n_samples);
    const long n = static_cast<long>(n_samples);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (long i = 0; i < n; ++i) {
        try {
            batch.samples[i] = simulate_hit(g, params, start, targets, base_seed + static_cast<std::uint64_t>(i), opts);
        } catch (...) {
#pragma omp critical
            error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    batch.summary = summarize(batch.samples);
    return batch;
}

CrossoverBatch sample_crossover_serial(const BipartiteGraph& g, const ModelParams& params, Mask start,
                                       const TargetSet& targets, std::size_t n_samples,
                                       std::uint64_t base_seed, const SimulationOptions& opts) {
    if (n_samples < 1) throw InvalidArgument("sample_crossover needs at least one sample");
    CrossoverBatch batch;
    for (std::size_t i = 0; i < n_samples; ++i)
        batch.samples.push_back(simulate_hit(g, params, start, targets, base_seed + i, opts));
    batch.summary = summarize(batch.samples);
    return batch;
}

CoupledRun coupled_simulate(const BipartiteGraph& g, const ModelParams& p1, const ModelParams& p2, Mask x,
                            Mask x_prime, std::uint64_t horizon, std::uint64_t seed, bool keep_trajectories) {
    if (!(p1.lambda >= p2.lambda && p1.lambda_bar <= p2.lambda_bar))
        throw InvalidArgument("coupled_simulate needs lambda1 >= lambda2 and lambda_bar1 <= lambda_bar2");
    if (!is_independent(g, x) || !is_independent(g, x_prime))
        throw InvalidArgument("coupled_simulate: invalid configuration");
    if (!leq(g, x, x_prime)) throw InvalidArgument("coupled_simulate needs x below x' in the lattice order");
    const double lu = p1.lambda, lv = p2.lambda_bar;  // dominating activities
    const double u_block = g.num_u() * (1.0 + lu);
    const double total = u_block + g.num_v() * (1.0 + lv);
    CounterRng rng(seed);
    CoupledRun run;
    if (keep_trajectories) {
        run.lower.reserve(horizon + 1);
        run.upper.reserve(horizon + 1);
        run.lower.push_back(x);
        run.upper.push_back(x_prime);
    }
    Mask a = x, b = x_prime;
    for (std::uint64_t step = 1; step <= horizon; ++step) {
        double r = rng.uniform() * total;
        int site;
        double dom;
        if (r < u_block) {
            site = std::min(g.num_u() - 1, static_cast<int>(r / (1.0 + lu)));
            dom = lu;
        } else {
            site = g.num_u() + std::min(g.num_v() - 1, static_cast<int>((r - u_block) / (1.0 + lv)));
            dom = lv;
        }
        double w = rng.uniform() * (1.0 + dom);
        bool on_u = g.in_u(site);
        auto update = [&](Mask cur, const ModelParams& p) {
            if (w < 1.0) return cur & ~bit(site);
            if (w < 1.0 + p.activity(on_u) && !(g.neighbor_mask(site) & cur)) return cur | bit(site);
            return cur;
        };
        a = update(a, p1);
        b = update(b, p2);
        if (keep_trajectories) {
            run.lower.push_back(a);
            run.upper.push_back(b);
        }
        if (!leq(g, a, b)) run.violations.push_back(step);
    }
    return run;
}

std::vector<std::uint64_t> occupation_counts(const ConfigurationSpace& space, const ModelParams& params,
                                             Mask start, std::uint64_t steps, std::uint64_t seed) {
    const auto& g = space.graph();
    std::vector<std::uint64_t> counts(space.size(), 0);
    CounterRng rng(seed);
    const double u_block = params.nu * (1.0 + params.lambda);
    Mask x = start;
    for (std::uint64_t t = 0; t < steps; ++t) {
        double r = rng.uniform() * params.gamma;
        int site = r < u_block ? std::min(params.nu - 1, static_cast<int>(r / (1.0 + params.lambda)))
                               : params.nu + std::min(params.nv - 1,
                                                      static_cast<int>((r - u_block) / (1.0 + params.lambda_bar)));
        double a = params.activity(g.in_u(site));
        bool occupy = rng.uniform() < a / (1.0 + a) && !(g.neighbor_mask(site) & x);
        x = occupy ? (x | bit(site)) : (x & ~bit(site));
        ++counts[static_cast<std::size_t>(space.index_of(x))];
    }
    return counts;
}

nlohmann::json sample_json(std::size_t index, const HittingSample& s) {
    nlohmann::json events = nlohmann::json::array();
    for (auto [a, b] : s.gate_events) events.push_back({a, b});
    nlohmann::json j{{"sample", index}, {"seed", s.seed}, {"steps", s.steps}, {"t_hat", s.t_hat}, {"gate_events", events}};
    if (s.timed_out) j["timeout"] = true;
    return j;
}

}  // namespace hcmeta

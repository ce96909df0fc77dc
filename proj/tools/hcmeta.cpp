#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "hcmeta/config.hpp"
#include "hcmeta/errors.hpp"
#include "hcmeta/metastability.hpp"
#include "hcmeta/verify.hpp"

using namespace hcmeta;
using nlohmann::json;

namespace {

constexpr int exit_invalid = 2;
constexpr int exit_refused = 3;
constexpr int exit_failed = 4;

struct Common {
    std::string graph;
    std::string alpha = "7/10";
    std::vector<double> lambdas{1e3};
    std::optional<double> lambda_bar;
    std::size_t samples = 2000;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string config;
    std::string output;
    ExperimentConfig cfg;

    CLI::Option* graph_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* lambda_opt = nullptr;
    CLI::Option* samples_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* output_opt = nullptr;
};

void add_common(CLI::App* sub, Common& c, bool model = true) {
    c.graph_opt = sub->add_option("--graph", c.graph, "graph family, e.g. torus:6x6, cycle:8, doubled(torus:5x5)");
    if (model) {
        c.alpha_opt = sub->add_option("--alpha", c.alpha, "alpha as a fraction, lambda_bar = lambda^(1+alpha)");
        c.lambda_opt = sub->add_option("--lambda", c.lambdas, "activity lambda (repeatable)");
        sub->add_option("--lambda-bar", c.lambda_bar, "explicit lambda_bar instead of lambda^(1+alpha)");
    }
    sub->add_option("--threads", c.threads, "worker threads (default: HCMETA_THREADS or all cores)");
    sub->add_option("--config", c.config, "JSON experiment config; flags given on the command line win");
    c.output_opt = sub->add_option("--output", c.output, "write the artifact here instead of stdout");
}

// Fill options not given on the command line from the config file, then set up threads.
void finish(Common& c) {
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        if (!in) throw InvalidArgument("cannot read config file '" + c.config + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw InvalidArgument("config file '" + c.config + "': " + e.what());
        }
        c.cfg = ExperimentConfig::from_json(j);
        if (c.graph_opt && !c.graph_opt->count() && !c.cfg.graph.empty()) c.graph = c.cfg.graph;
        if (c.alpha_opt && !c.alpha_opt->count() && c.cfg.alpha) c.alpha = *c.cfg.alpha;
        if (c.lambda_opt && !c.lambda_opt->count() && !c.cfg.lambdas.empty()) c.lambdas = c.cfg.lambdas;
        if (c.samples_opt && !c.samples_opt->count() && j.contains("samples")) c.samples = c.cfg.samples;
        if (c.seed_opt && !c.seed_opt->count() && j.contains("seed")) c.seed = c.cfg.seed;
        if (c.output_opt && !c.output_opt->count() && !c.cfg.output.empty()) c.output = c.cfg.output;
    }
    if (c.threads <= 0)
        if (const char* env = std::getenv("HCMETA_THREADS")) {
            try {
                c.threads = std::stoi(env);
            } catch (const std::exception&) {
                throw InvalidArgument(std::string("HCMETA_THREADS must be an integer, got '") + env + "'");
            }
        }
    if (c.threads < 0) throw InvalidArgument("thread count must be positive");
#ifdef _OPENMP
    if (c.threads > 0) omp_set_num_threads(c.threads);
#endif
}

void emit(const Common& c, const std::string& text) {
    if (c.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + c.output + "'");
    out << text;
}

GraphFamilySpec require_graph(const Common& c) {
    if (c.graph.empty()) throw InvalidArgument("--graph is required");
    return GraphFamilySpec::parse(c.graph);
}

Rational alpha_of(const Common& c) { return parse_rational(c.alpha); }

ModelParams params_for(const Common& c, const BipartiteGraph& g, double lambda) {
    auto alpha = alpha_of(c);
    if (c.lambda_bar) return ModelParams::with_activities(g, lambda, *c.lambda_bar, alpha);
    return ModelParams::from_alpha(g, lambda, alpha);
}

json header(const Common& c, const GraphFamilySpec& spec) {
    json j;
    j["graph"] = spec.to_string();
    j["alpha"] = to_string(alpha_of(c));
    return j;
}

// "u", "v", "empty", "J" (configurations at least as likely as u) or explicit sites "0,3,5".
NodeSet node_set(const std::string& text, const ConfigurationSpace& space, const Rational& alpha) {
    if (text == "u") return {space.u_index()};
    if (text == "v") return {space.v_index()};
    if (text == "empty") return {space.empty_index()};
    if (text == "J") return dominance_sets(space, space.u_index(), alpha).j;
    std::vector<int> sites;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        try {
            sites.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw InvalidArgument("bad configuration '" + text + "': use u, v, empty, J or site ids like 0,3");
        }
    Mask x = make_configuration(space.graph(), sites);
    long i = space.index_of(x);
    if (i < 0) throw InvalidArgument("'" + text + "' is not an independent set");
    return {static_cast<std::size_t>(i)};
}

struct Model {
    std::shared_ptr<const BipartiteGraph> g;
    std::unique_ptr<ConfigurationSpace> space;
};

Model model_for(const GraphFamilySpec& spec, std::size_t cap = ConfigurationSpace::default_cap) {
    Model m;
    m.g = std::make_shared<BipartiteGraph>(build_family(spec));
    m.space = std::make_unique<ConfigurationSpace>(ConfigurationSpace::enumerate(m.g, cap));
    return m;
}

int cmd_enumerate(Common& c, std::size_t cap, bool with_height) {
    auto spec = require_graph(c);
    auto m = model_for(spec, cap);
    auto alpha = alpha_of(c);
    std::string out;
    for (std::size_t i = 0; i < m.space->size(); ++i) {
        Mask x = m.space->state(i);
        json j;
        j["index"] = i;
        j["sites"] = occupied_sites(x);
        j["u"] = popcount(u_part(*m.g, x));
        j["v"] = popcount(v_part(*m.g, x));
        if (with_height) j["height"] = to_string(height(*m.g, x, alpha));
        out += dump17(j) + "\n";
    }
    emit(c, out);
    return 0;
}

int cmd_resistance(Common& c, const std::string& from, const std::string& to, bool symbolic) {
    auto spec = require_graph(c);
    auto m = model_for(spec);
    auto alpha = alpha_of(c);
    NodeSet a = node_set(from, *m.space, alpha), b = node_set(to, *m.space, alpha);
    json out = header(c, spec);
    out["from"] = from;
    out["to"] = to;
    out["results"] = json::array();
    for (double lambda : c.lambdas) {
        auto p = params_for(c, *m.g, lambda);
        auto net = build_network(*m.space, p);
        auto r = effective_resistance(net, a, b);
        auto psi = critical_resistance(net, a, b);
        std::optional<SymbolicCriticalResistance> sym;
        if (symbolic) sym = critical_resistance_symbolic(net, a, b, alpha);
        json j = potential_json(r, psi, sym ? &*sym : nullptr);
        j["lambda"] = lambda;
        j["lambda_bar"] = p.lambda_bar;
        out["results"].push_back(j);
    }
    emit(c, dump17(out) + "\n");
    return 0;
}

int cmd_hitting(Common& c, const std::string& from, const std::string& to) {
    auto spec = require_graph(c);
    auto m = model_for(spec);
    auto alpha = alpha_of(c);
    NodeSet a = node_set(from, *m.space, alpha), b = node_set(to, *m.space, alpha);
    if (a.size() != 1) throw InvalidArgument("--from must be a single configuration");
    json out = header(c, spec);
    out["from"] = from;
    out["to"] = to;
    out["results"] = json::array();
    for (double lambda : c.lambdas) {
        auto p = params_for(c, *m.g, lambda);
        auto net = build_network(*m.space, p);
        double steps = expected_hitting_time(net, a[0], b);
        json j;
        j["lambda"] = lambda;
        j["lambda_bar"] = p.lambda_bar;
        j["gamma"] = p.gamma;
        j["mean_steps"] = steps;
        j["mean_steps_first_step"] = expected_hitting_time_first_step(net, a[0], b);
        j["mean_time"] = steps / p.gamma;
        bool inside = std::find(b.begin(), b.end(), a[0]) != b.end();
        if (!inside) j["escape_probability"] = escape_probability(net, a[0], b);
        out["results"].push_back(j);
    }
    emit(c, dump17(out) + "\n");
    return 0;
}

int cmd_isoperimetry(Common& c, int s_max, bool brute, const std::string& compare, std::uint64_t budget) {
    auto spec = require_graph(c);
    auto g = build_family(spec);
    if (s_max < 0) s_max = g.num_v();
    if (s_max > g.num_v()) throw InvalidArgument("--s-max exceeds |V| = " + std::to_string(g.num_v()));
    if (!compare.empty() && compare != "closed-form") throw InvalidArgument("--compare accepts only closed-form");
    auto strict = closed_form_family(spec);
    auto lattice = closed_form_family(spec, true);
    if (!lattice) lattice = tree_like_family(g);
    if (!strict) strict = lattice;

    std::optional<IsoperimetricProfile> profile;
    if (brute) {
        BruteForceOptions o;
        o.budget = budget;
        o.keep_witnesses = false;
        o.threads = c.threads;
        profile = brute_force_profile(g, s_max, o);
    } else if (!lattice) {
        throw InvalidArgument("no closed form for " + spec.to_string() + "; use --brute-force");
    }
    bool cmp = !compare.empty();
    if (cmp && !lattice) throw InvalidArgument("no closed form for " + spec.to_string());

    std::ostringstream out;
    out << "s,delta,provenance";
    if (profile) out << ",witness_count";
    if (cmp) out << ",closed_form,match,in_window";
    out << "\n";
    bool all_match = true;
    for (int s = 0; s <= s_max; ++s) {
        if (profile) {
            out << s << ',' << profile->delta[s] << ',' << profile->provenance[s] << ',' << profile->optimal_count[s];
        } else {
            out << s << ',' << closed_form_profile(*lattice, s) << ',' << lattice->name();
        }
        if (cmp) {
            int cf = closed_form_profile(*lattice, s);
            auto w = strict->window();
            bool in_window = !w || s <= *w;
            bool match = !profile || profile->delta[s] == cf;
            all_match = all_match && match;
            out << ',' << cf << ',' << (match ? "true" : "false") << ',' << (in_window ? "true" : "false");
        }
        out << "\n";
    }
    emit(c, out.str());
    return all_match ? 0 : exit_failed;
}

struct CriticalRun {
    BipartiteGraph g;
    IsoperimetricSource src;
    CriticalAnalysis ca;
};

CriticalRun critical_run(const Common& c, const GraphFamilySpec& spec, std::uint64_t budget) {
    CriticalRun r;
    r.g = build_family(spec);
    SourceOptions so;
    so.budget = budget;
    so.threads = c.threads;
    r.src = make_source(r.g, spec, so);
    auto alpha = alpha_of(c);
    r.ca = critical_analysis(r.src, alpha, default_search_bound(alpha, r.src.family), r.g.num_u());
    return r;
}

int cmd_critical(Common& c, bool with_gate, bool hypotheses, int kappa, std::uint64_t budget, bool predict) {
    auto spec = require_graph(c);
    auto r = critical_run(c, spec, budget);
    if (kappa < 0) kappa = default_kappa(r.ca.alpha);
    std::optional<CriticalGate> gate;
    if (with_gate) gate = build_gate(r.g, r.ca, r.src, kappa, spec);
    std::optional<CrossoverPrediction> pred;
    if (predict) pred = crossover_prediction(r.ca, gate ? &*gate : nullptr, params_for(c, r.g, c.lambdas.front()));
    std::optional<HypothesisReport> hyp;
    if (hypotheses) {
        HypothesisOptions ho;
        ho.kappa = kappa;
        ho.threads = c.threads;
        hyp = check_hypotheses(r.g, r.ca.alpha, r.src, r.ca, ho);
    }
    json out = header(c, spec);
    out.update(analysis_json(r.ca, gate ? &*gate : nullptr, pred ? &*pred : nullptr, hyp ? &*hyp : nullptr));
    if (pred) out["lambda"] = c.lambdas.front();
    emit(c, dump17(out) + "\n");
    return 0;
}

int cmd_gate(Common& c, int kappa, std::uint64_t budget, bool list) {
    auto spec = require_graph(c);
    auto r = critical_run(c, spec, budget);
    if (kappa < 0) kappa = default_kappa(r.ca.alpha);
    auto gate = build_gate(r.g, r.ca, r.src, kappa, spec);
    json out = header(c, spec);
    out.update(analysis_json(r.ca, &gate, nullptr, nullptr));
    if (list) {
        out["transitions"] = json::array();
        for (const auto& [x, y] : gate.transitions) out["transitions"].push_back({occupied_sites(x), occupied_sites(y)});
    }
    emit(c, dump17(out) + "\n");
    return 0;
}

struct SimulateFlags {
    bool ks = false;
    bool embedded = false;
    bool gate = false;
    bool exact = false;
    std::string method = "jump";
    std::string samples_out;
    std::uint64_t step_cap = 10'000'000'000ULL;
    std::string from = "u", to = "v";
};

int cmd_simulate(Common& c, const SimulateFlags& f) {
    auto spec = require_graph(c);
    if (c.lambdas.size() != 1) throw InvalidArgument("simulate takes exactly one --lambda");
    auto m = model_for(spec);
    const auto& g = *m.g;
    auto alpha = alpha_of(c);
    auto p = params_for(c, g, c.lambdas.front());
    const auto& th = c.cfg.thresholds;

    NodeSet a = node_set(f.from, *m.space, alpha), b = node_set(f.to, *m.space, alpha);
    if (a.size() != 1) throw InvalidArgument("--from must be a single configuration");
    std::vector<Mask> target_states;
    for (auto i : b) target_states.push_back(m.space->state(i));
    TargetSet targets(target_states);

    SimulationOptions so;
    so.step_cap = f.step_cap;
    so.embedded_clock = f.embedded;
    if (f.method == "jump")
        so.method = SimulationMethod::jump;
    else if (f.method == "stepwise")
        so.method = SimulationMethod::stepwise;
    else
        throw InvalidArgument("--method must be jump or stepwise");

    std::optional<CriticalGate> gate;
    TransitionSet watched;
    if (f.gate) {
        if (f.from != "u" || f.to != "v") throw InvalidArgument("--gate needs the default u -> v crossover");
        auto r = critical_run(c, spec, 10'000'000);
        gate = build_gate(r.g, r.ca, r.src, default_kappa(r.ca.alpha), spec);
        watched = gate->transition_set();
        so.gate = &watched;
    }

    auto batch = sample_crossover(g, p, m.space->state(a[0]), targets, c.samples, c.seed, so, c.threads);
    if (!f.samples_out.empty()) {
        std::ofstream out(f.samples_out, std::ios::binary);
        if (!out) throw InvalidArgument("cannot write '" + f.samples_out + "'");
        for (std::size_t i = 0; i < batch.samples.size(); ++i) out << dump17(sample_json(i, batch.samples[i])) << "\n";
    }

    std::vector<double> t;
    double steps = 0.0;
    for (const auto& s : batch.samples)
        if (!s.timed_out) {
            t.push_back(s.t_hat);
            steps += static_cast<double>(s.steps);
        }
    auto est = estimate_mean(t);

    json rep = header(c, spec);
    rep["lambda"] = p.lambda;
    rep["lambda_bar"] = p.lambda_bar;
    rep["gamma"] = p.gamma;
    rep["samples"] = c.samples;
    rep["seed"] = c.seed;
    rep["method"] = f.method;
    rep["clock"] = f.embedded ? "embedded" : "analytic";
    rep["timeouts"] = batch.summary.timeouts;
    rep["estimates"] = {{"mean_time", est.mean},
                        {"std_error", est.std_error},
                        {"variance", est.variance},
                        {"mean_steps", t.empty() ? 0.0 : steps / static_cast<double>(t.size())}};
    if (f.exact) {
        auto net = build_network(*m.space, p);
        rep["exact"] = {{"mean_time", expected_hitting_time(net, a[0], b) / p.gamma}};
    }
    rep["thresholds"] = th.to_json();
    bool pass = batch.summary.timeouts == 0;
    json checks = json::object();
    if (f.ks) {
        auto ks = ks_exponential_test(t);
        rep["ks"] = {{"n", ks.n}, {"statistic", ks.statistic}, {"p_value", ks.p_value}, {"method", ks.method}};
        checks["ks_exponential"] = ks.p_value > th.ks_p_min;
    }
    if (gate) {
        auto st = gate_statistics(batch.samples, *gate);
        rep["gate"] = {{"transitions", gate->transitions.size()},
                       {"single_crossing", st.single_crossing},
                       {"no_crossing", st.no_crossing},
                       {"single_fraction", st.single_fraction},
                       {"chi_square", st.chi_square},
                       {"dof", st.dof},
                       {"p_value", st.p_value},
                       {"first_counts", st.first_counts}};
        checks["single_crossing"] = st.single_fraction >= th.single_crossing_min;
        checks["chi_square_uniform"] = st.p_value > th.chi_square_p_min;
    }
    for (const auto& [name, ok] : checks.items()) pass = pass && ok.get<bool>();
    rep["checks"] = checks;
    rep["pass"] = pass;
    emit(c, dump17(rep) + "\n");
    return pass ? 0 : exit_failed;
}

int cmd_verify(Common& c, const std::vector<int>& only, bool as_json) {
    VerifyOptions o;
    o.thresholds = c.cfg.thresholds;
    o.seed = c.seed;
    o.threads = c.threads;
    o.only = only;
    for (int id : only)
        if (id < 1 || id > criterion_count)
            throw InvalidArgument("--only: criteria are numbered 1.." + std::to_string(criterion_count));
    auto results = run_acceptance(o);
    bool pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
    if (as_json) {
        json out = json::array();
        for (const auto& r : results) out.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        emit(c, dump17(out) + "\n");
    } else {
        emit(c, verify_table(results));
    }
    return pass ? 0 : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hard-core dynamics and metastability on bipartite graphs"};
    app.require_subcommand(1);
    Common ce, cr, ch, ci, cc, cg, cs, cv;

    auto* enumerate = app.add_subcommand("enumerate", "list configurations as JSON lines");
    add_common(enumerate, ce);
    std::size_t cap = ConfigurationSpace::default_cap;
    bool with_height = false;
    enumerate->add_option("--cap", cap, "refuse above this many configurations");
    enumerate->add_flag("--height", with_height, "include the height at --alpha");

    std::string from = "u", to = "v";
    auto* resistance = app.add_subcommand("resistance", "effective and critical resistance");
    add_common(resistance, cr);
    bool symbolic = false;
    resistance->add_option("--from", from, "u, v, empty, J or sites like 0,3");
    resistance->add_option("--to", to, "u, v, empty, J or sites like 0,3");
    resistance->add_flag("--symbolic", symbolic, "add the asymptotic order of the critical resistance");

    auto* hitting = app.add_subcommand("hitting", "exact expected hitting times");
    add_common(hitting, ch);
    hitting->add_option("--from", from, "starting configuration");
    hitting->add_option("--to", to, "target configurations");

    auto* iso = app.add_subcommand("isoperimetry", "isoperimetric profile as CSV");
    add_common(iso, ci, false);
    int s_max = -1;
    bool brute = false;
    std::string compare;
    std::uint64_t budget = 10'000'000;
    iso->add_option("--s-max", s_max, "largest size (default |V|)");
    iso->add_flag("--brute-force", brute, "exhaustive search");
    iso->add_option("--compare", compare, "closed-form: add the closed-form value per size");
    iso->add_option("--budget", budget, "maximum subset evaluations");

    auto* critical = app.add_subcommand("critical", "critical size, gate and hypotheses as JSON");
    add_common(critical, cc);
    bool with_gate = false, hypotheses = false, predict = false;
    int kappa = -1;
    critical->add_flag("--gate", with_gate, "construct the critical gate");
    critical->add_flag("--hypotheses", hypotheses, "check the structural hypotheses");
    critical->add_flag("--predict", predict, "crossover prediction at the first --lambda");
    critical->add_option("--kappa", kappa, "gate width (default ceil(1/alpha) - 1)");
    critical->add_option("--budget", budget, "brute-force budget");

    auto* gate = app.add_subcommand("gate", "critical gate as JSON");
    add_common(gate, cg);
    bool list = false;
    gate->add_option("--kappa", kappa, "gate width (default ceil(1/alpha) - 1)");
    gate->add_option("--budget", budget, "brute-force budget");
    gate->add_flag("--list", list, "list every transition as [x sites, y sites]");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo crossover times with a statistics report");
    add_common(simulate, cs);
    SimulateFlags sf;
    cs.samples_opt = simulate->add_option("--samples", cs.samples, "number of trajectories");
    cs.seed_opt = simulate->add_option("--seed", cs.seed, "base seed; sample i uses seed + i");
    simulate->add_flag("--ks-exponential", sf.ks, "KS test of T/mean against Exp(1)");
    simulate->add_flag("--embedded-clock", sf.embedded, "sample the rate-gamma Poisson clock");
    simulate->add_flag("--gate", sf.gate, "record critical gate crossings");
    simulate->add_flag("--exact", sf.exact, "add the exact mean from a linear solve");
    simulate->add_option("--method", sf.method, "jump (default) or stepwise");
    simulate->add_option("--samples-out", sf.samples_out, "write every sample as JSON lines");
    simulate->add_option("--step-cap", sf.step_cap, "kernel steps before a trajectory times out");
    simulate->add_option("--from", sf.from, "starting configuration");
    simulate->add_option("--to", sf.to, "target configurations");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    add_common(verify, cv, false);
    std::vector<int> only;
    bool as_json = false;
    cv.seed_opt = verify->add_option("--seed", cv.seed, "base seed for the Monte Carlo criteria");
    verify->add_option("--only", only, "criterion numbers to run")->delimiter(',');
    verify->add_flag("--json", as_json, "JSON instead of a table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_invalid;
    }

    try {
        auto run = [](Common& c, auto&& f) {
            finish(c);
            return f(c);
        };
        if (enumerate->parsed()) return run(ce, [&](Common& c) { return cmd_enumerate(c, cap, with_height); });
        if (resistance->parsed()) return run(cr, [&](Common& c) { return cmd_resistance(c, from, to, symbolic); });
        if (hitting->parsed()) return run(ch, [&](Common& c) { return cmd_hitting(c, from, to); });
        if (iso->parsed()) return run(ci, [&](Common& c) { return cmd_isoperimetry(c, s_max, brute, compare, budget); });
        if (critical->parsed())
            return run(cc, [&](Common& c) { return cmd_critical(c, with_gate, hypotheses, kappa, budget, predict); });
        if (gate->parsed()) return run(cg, [&](Common& c) { return cmd_gate(c, kappa, budget, list); });
        if (simulate->parsed()) return run(cs, [&](Common& c) { return cmd_simulate(c, sf); });
        if (verify->parsed()) return run(cv, [&](Common& c) { return cmd_verify(c, only, as_json); });
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const Refusal& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return exit_refused;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

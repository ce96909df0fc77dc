#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hcmeta/configspace.hpp"
#include "hcmeta/dynamics.hpp"
#include "hcmeta/exponent.hpp"
#include "hcmeta/isoperimetry.hpp"
#include "hcmeta/potential.hpp"

namespace hcmeta {

// Delta(s) from an exhaustive profile where available and a closed form beyond it.
struct IsoperimetricSource {
    std::optional<IsoperimetricProfile> brute;
    std::optional<ClosedFormFamily> family;

    int delta(int s) const;
    std::string provenance(int s) const;
    bool has(int s) const;
    ProfileSource as_function() const;
};

struct SourceOptions {
    std::uint64_t budget = 10'000'000;
    bool lattice_closed_form = true;  // torus families: extend with the infinite-lattice value
    int threads = 0;
};

// Brute force over as many sizes as the budget allows, plus the family closed form if any.
IsoperimetricSource make_source(const BipartiteGraph& g, const std::optional<GraphFamilySpec>& spec,
                                const SourceOptions& opts = {});

struct CriticalAnalysis {
    Rational alpha;
    int s_star = 0;
    Rational g_star;
    int s_tilde = 0;
    std::optional<int> ell_star;
    bool unique_max = true;
    std::vector<int> maximizers;  // all maximisers of g on {0..s_tilde}
    std::optional<int> t_star;    // |U| - s* - Delta(s*)
    std::vector<int> delta;       // Delta(0..s_tilde)
};

// g(s) = Delta(s) - alpha (s - 1).
Rational g_value(int delta, int s, const Rational& alpha);

// Throws Refusal when no s with Delta(s) <= alpha s appears within the search bound.
CriticalAnalysis critical_analysis(const ProfileSource& delta, const Rational& alpha, int search_bound,
                                   std::optional<int> num_u = std::nullopt);
CriticalAnalysis critical_analysis(const IsoperimetricSource& src, const Rational& alpha, int search_bound,
                                   std::optional<int> num_u = std::nullopt);

// ceil(8/alpha^2) + 1; for doubled tori also (2/alpha + 1)^2 + (2/alpha)^2.
int default_search_bound(const Rational& alpha, const std::optional<ClosedFormFamily>& family = std::nullopt);
int default_kappa(const Rational& alpha);

struct LemmaCriticalSize {
    std::vector<int> s_star;  // two candidates when the nearest integer to 1/alpha is ambiguous
    std::vector<int> ell_star;
    bool generic = true;  // 2/alpha (torus) or 4/alpha (doubled torus) is not an integer
    int regime = 0;       // doubled torus: 1 if l* > 1/alpha, 2 if l* < 1/alpha
};

LemmaCriticalSize torus_critical_size(const Rational& alpha);
LemmaCriticalSize doubled_torus_critical_size(const Rational& alpha);

struct DominanceSets {
    std::vector<std::size_t> j;        // pi(x) >= pi(a) in order, x != a
    std::vector<std::size_t> j_minus;  // pi(x) > pi(a) in order
};

DominanceSets dominance_sets(const ConfigurationSpace& space, std::size_t a, const Rational& alpha);

struct CriticalGate {
    int s_star = 0;
    int kappa = 0;
    std::vector<VSet> family_a;
    std::vector<VSet> family_b;
    std::vector<VSet> family_c;
    std::vector<Transition> transitions;  // (x in Q, y in Q*), sorted and distinct
    std::uint64_t count = 0;              // sum over A, B of |N(B) \ N(A)|
    std::optional<std::uint64_t> closed_form_count;
    std::string closed_form_name;
    bool conditional_on_conjecture = false;
    std::optional<bool> characterization_ok;  // torus: tilted rectangle description

    TransitionSet transition_set() const { return TransitionSet(transitions); }
    std::vector<Mask> q() const;
    std::vector<Mask> q_star() const;
};

// Needs every optimal set of sizes s*-1 and s*+kappa.  Throws Refusal on truncated witnesses.
CriticalGate build_gate(const BipartiteGraph& g, const CriticalAnalysis& ca, const IsoperimetricSource& src,
                        int kappa, const std::optional<GraphFamilySpec>& spec = std::nullopt);

std::optional<std::uint64_t> closed_form_gate_count(const GraphFamilySpec& spec, const Rational& alpha,
                                                    std::string* name = nullptr, bool* conditional = nullptr);

// Families of tilted (l-1) x l rectangles and those plus an element along a longer side.
std::pair<std::vector<VSet>, std::vector<VSet>> torus_gate_characterization(const BipartiteGraph& torus, int ell);

struct CrossoverPrediction {
    AsymptoticExponent exponent;  // of E_u[T_v] in continuous time
    Rational value;
    std::optional<double> log_sharp;  // log of lambda^{Delta(s*)+s*-1} / (count lambda_bar^{s*-1})
    std::optional<double> sharp;
};

CrossoverPrediction crossover_prediction(const CriticalAnalysis& ca, const CriticalGate* gate,
                                         const ModelParams& params);

enum class Status { verified, refuted, exhausted_budget, closed_form, not_applicable, inconclusive };
std::string to_string(Status s);

struct HypothesisResult {
    Status status = Status::not_applicable;
    std::string evidence;
};

struct HypothesisOptions {
    int kappa = -1;  // default ceil(1/alpha) - 1
    std::uint64_t search_budget = 2'000'000;
    std::size_t no_trap_state_cap = 200'000;
    int threads = 0;
};

using HypothesisReport = std::map<std::string, HypothesisResult>;

HypothesisReport check_hypotheses(const BipartiteGraph& g, const Rational& alpha, const IsoperimetricSource& src,
                                  const CriticalAnalysis& ca, const HypothesisOptions& opts = {});

struct TrapEntry {
    std::size_t state = 0;
    AsymptoticExponent exponent;  // of pi(x) Psi(x, J^-(x))
    Rational value;
    Order order = Order::less;  // compared with pi(u) Psi(u, J(u))
    bool stable = false;        // J^-(x) is empty
};

struct NoTrapReport {
    enum class Verdict { certified, refuted, inconclusive };
    Verdict verdict = Verdict::certified;
    AsymptoticExponent u_exponent;  // pi(u) Psi(u, J(u))
    Rational u_value;
    std::size_t checked = 0;
    std::vector<TrapEntry> violations;  // equal or larger order
    std::vector<TrapEntry> ties;        // equal value, different (p,q)
};
std::string to_string(NoTrapReport::Verdict v);

NoTrapReport no_trap_certificate(const ConfigurationSpace& space, const Rational& alpha, int threads = 0);
NoTrapReport no_trap_certificate_serial(const ConfigurationSpace& space, const Rational& alpha);

struct StandardPath {
    std::vector<Mask> path;
    std::vector<std::size_t> backbone;  // indices into path
    AsymptoticExponent psi_exponent;    // bottleneck of r * Z along the path
    Rational psi_value;
    int s_dagger = 0;
    AsymptoticExponent predicted;  // gamma / pi~(u) * lambda^{Delta+s-1} / lambda_bar^{s-1}
};

StandardPath standard_path(const BipartiteGraph& g, const VSet& numbering, const Rational& alpha);

struct CriticalPairReport {
    bool resistance_order = true;  // r(x,y) has the order of Psi(u, J(u)) for each gate transition
    bool before_gate = true;       // Psi(u, x) below Psi(u, J(u)) for x in Q
    bool after_gate = true;        // Psi(y, J(u)) below Psi(u, J(u)) for y in Q*
    AsymptoticExponent psi_u;
    std::vector<std::string> problems;
    bool ok() const { return resistance_order && before_gate && after_gate; }
};

CriticalPairReport critical_pair_check(const ElectricNetwork& net, const CriticalGate& gate, const Rational& alpha);

struct GateStatistics {
    std::size_t samples = 0;
    std::size_t single_crossing = 0;
    std::size_t no_crossing = 0;
    double single_fraction = 0.0;
    std::vector<std::uint64_t> first_counts;  // first gate transition of each sample, per transition
    std::vector<std::uint64_t> all_counts;    // every gate event
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::vector<double> frequencies;  // first_counts normalised
};

GateStatistics gate_statistics(const std::vector<HittingSample>& samples, const CriticalGate& gate);

nlohmann::json analysis_json(const CriticalAnalysis& ca, const CriticalGate* gate, const CrossoverPrediction* pred,
                             const HypothesisReport* hyp);

}  // namespace hcmeta

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcmeta/configspace.hpp"
#include "hcmeta/exponent.hpp"

namespace hcmeta {

using NodeSet = std::vector<std::size_t>;

// Conductance network on configuration indices.  Conductances are stored as logarithms;
// solves rescale by the largest conductance.
struct ElectricNetwork {
    std::size_t n = 0;
    std::vector<std::size_t> start;  // CSR
    std::vector<std::uint32_t> nbr;
    std::vector<double> log_c;
    double log_c_max = 0.0;

    // Present when built from a configuration space.
    const ConfigurationSpace* space = nullptr;
    std::optional<ModelParams> params;
    std::vector<double> log_pi;  // normalised stationary distribution
    double log_z = 0.0;
    // Symbolic resistance order of each CSR entry in the Z-free normalisation r*Z.
    std::vector<AsymptoticExponent> r_exponent;
    std::vector<AsymptoticExponent> pi_exponent;  // unnormalised weights

    std::size_t degree(std::size_t x) const { return start[x + 1] - start[x]; }
    double pi(std::size_t x) const;
    // Log conductance of the edge x-y, or nullopt if absent.
    std::optional<double> log_conductance(std::size_t x, std::size_t y) const;

    // Generic network from undirected edges (a, b, conductance); used for plain circuits.
    static ElectricNetwork from_edges(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges);
};

// c(x,y) = pi(x)K(x,y) = max(pi(x), pi(y)) / gamma on hard-core transitions.
ElectricNetwork build_network(const ConfigurationSpace& space, const ModelParams& params);

// Solver for the Laplacian restricted to the nodes not in `fixed`.  Up to
// direct_limit interior nodes it uses subtraction-free Gaussian elimination
// (pivots are recomputed as sums of remaining conductances), so non-negative
// right-hand sides are solved to high relative accuracy; beyond that it runs
// Jacobi-preconditioned conjugate gradients.
class DirichletSolver {
public:
    static constexpr std::size_t direct_limit = 20000;

    DirichletSolver(const ElectricNetwork& net, const std::vector<char>& fixed,
                    std::size_t force_iterative_above = direct_limit);
    ~DirichletSolver();
    DirichletSolver(DirichletSolver&&) noexcept;

    // Solves L_II phi = rhs_I with conductances divided by exp(log_c_max); values at fixed nodes are 0.
    std::vector<long double> solve(const std::vector<long double>& rhs) const;
    bool iterative() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct VoltageField {
    std::vector<double> w;
    NodeSet a;
    NodeSet b;
    double harmonic_residual = 0.0;
};

// W(x) = Pr_x(T_A < T_B).
VoltageField voltage(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b);

struct Resistance {
    double log_r = 0.0;
    double r = 0.0;
    double c = 0.0;
};

// Via the unit-voltage current out of A (computed subtraction-free from the swapped voltage).
Resistance effective_resistance(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b);
// Via a unit current injected at a with B grounded: R = potential at a.
Resistance effective_resistance_current(const ElectricNetwork& net, std::size_t a, const NodeSet& b);

// 1/(pi(a) R(a,B)).
double escape_probability(const ElectricNetwork& net, std::size_t a, const NodeSet& b);
// Sum over first steps y of K(a,y) Pr_y(T_B < T_a).
double escape_probability_first_step(const ElectricNetwork& net, std::size_t a, const NodeSet& b);

// G_{T_B}(a,x) = R(a,B) pi(x) W_{a,B}(x).
std::vector<double> green_function(const ElectricNetwork& net, std::size_t a, const NodeSet& b);
// Expected visits from the inverse of the B-grounded Laplacian: G(a,x) = pi(x) L_B^{-1}(x,a).
std::vector<double> green_function_direct(const ElectricNetwork& net, std::size_t a, const NodeSet& b);

// E_a[T_B] in discrete steps as R(a,B) * sum_x pi(x) W_{a,B}(x).
double expected_hitting_time(const ElectricNetwork& net, std::size_t a, const NodeSet& b);
// E_a[T_B] from the first-step system h = 1 + K h off B.
double expected_hitting_time_first_step(const ElectricNetwork& net, std::size_t a, const NodeSet& b);
// All of h(x) = E_x[T_B] from the first-step system.
std::vector<double> hitting_times_first_step(const ElectricNetwork& net, const NodeSet& b);

struct CriticalResistance {
    double log_psi = 0.0;  // log of inf over paths of max edge resistance
    double psi = 0.0;
    NodeSet witness_path;
};

// Bottleneck path grown as a maximum spanning tree (Prim) from A until B is reached.
CriticalResistance critical_resistance(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b);
// log Psi(x, y) for every y (Psi(x,x) = 0 is reported as -inf).
std::vector<double> critical_resistance_all(const ElectricNetwork& net, std::size_t x);

struct SymbolicCriticalResistance {
    AsymptoticExponent exponent;  // order of Psi * ... in the Z-free normalisation Psi/Z
    Rational value;
    bool order_tie = false;  // another (p,q) with the same value competes for the bottleneck
    bool reachable = false;
    NodeSet witness_path;
};

SymbolicCriticalResistance critical_resistance_symbolic(const ElectricNetwork& net, const NodeSet& a,
                                                        const NodeSet& b, const Rational& alpha);

struct NashWilliamsBounds {
    double upper = 0.0;  // sum of conductances across the cut
    double lower = 0.0;  // Berman-Konsowa bound from the path family
    double exact = 0.0;  // C(A,B)
};

// Throws InvalidArgument naming the violated condition for an invalid cut or path family.
NashWilliamsBounds nash_williams_bounds(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b,
                                        const NodeSet& cut, const std::vector<NodeSet>& paths);

// Paths chosen greedily by resistance-weighted shortest path, penalising reuse and never
// traversing an edge against an earlier path.
std::vector<NodeSet> greedy_path_family(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b,
                                        std::size_t count);
// {x : Psi(x, A) < Psi(A, B)}.
NodeSet critical_cut(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b);

struct VoltageBoundReport {
    double w = 0.0;
    double lower_r = 0.0, upper_r = 0.0;      // resistance form
    double lower_psi = 0.0, upper_psi = 0.0;  // critical-resistance form, k = |X|^4
    bool resistance_ok = false;
    bool psi_ok = false;
    bool valley_ok = false;  // |W(x) - W(y)| <= k Psi(x,y)/Psi(A,B) for all y
    bool ok() const { return resistance_ok && psi_ok && valley_ok; }
};

VoltageBoundReport voltage_bound_check(const ElectricNetwork& net, const NodeSet& a, const NodeSet& b,
                                       std::size_t x);

nlohmann::json potential_json(const Resistance& r, const CriticalResistance& psi,
                              const SymbolicCriticalResistance* symbolic);

}  // namespace hcmeta

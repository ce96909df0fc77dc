#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hcmeta/exponent.hpp"
#include "hcmeta/graph.hpp"

namespace hcmeta {

// Sorted list of V-site ids.
using VSet = std::vector<int>;

// Delta(A) = |N(A)| - |A|.  Throws InvalidArgument unless A is a set of V-sites.
int set_cost(const BipartiteGraph& g, const VSet& a);

struct IsoperimetricProfile {
    std::vector<int> delta;  // indexed by s
    std::vector<std::string> provenance;
    std::vector<std::vector<VSet>> witnesses;  // optimal sets per size, in colex order, capped
    std::vector<std::uint64_t> optimal_count;  // exact number of optimal sets per size
    std::vector<char> truncated;               // witnesses[s] is incomplete

    int s_max() const { return static_cast<int>(delta.size()) - 1; }
    bool complete(int s) const { return s <= s_max() && !truncated[s]; }
};

struct BruteForceOptions {
    std::uint64_t budget = 10'000'000;  // total subset evaluations
    std::size_t witness_cap = 10'000;
    bool keep_witnesses = true;
    int threads = 0;
};

// Exhaustive search over all subsets of V of size <= s_max, in colexicographic order.
// Throws Refusal naming the evaluation count when it exceeds the budget.
IsoperimetricProfile brute_force_profile(const BipartiteGraph& g, int s_max, const BruteForceOptions& opts = {});
IsoperimetricProfile brute_force_profile_serial(const BipartiteGraph& g, int s_max,
                                                const BruteForceOptions& opts = {});
std::uint64_t brute_force_evaluations(int nv, int s_max);

struct ClosedFormFamily {
    enum class Kind { torus, doubled_torus, tree_like, doubled_tree_like, hypercube };
    Kind kind = Kind::torus;
    int m = 0, n = 0;   // torus sides (base torus for the doubled family)
    int degree = 0;     // tree-like: degree of the regular (base) graph
    int girth = 0;      // tree-like: certified girth of the (base) graph
    int dim = 0;        // hypercube: Delta_{dim+1}, i.e. the graph is H_{dim+1} or doubled H_dim
    bool lattice = false;  // torus families: use the infinite-lattice value without the size guard

    std::string name() const;
    // Largest s inside the validity window, or nullopt when unbounded.
    std::optional<int> window() const;
};

// Family with a closed form for the given spec, if any.  Tree-like families are only
// produced with a girth certificate.
std::optional<ClosedFormFamily> closed_form_family(const GraphFamilySpec& spec, bool lattice = false);
// Tree-like family of any regular bipartite graph with a finite girth certificate.
std::optional<ClosedFormFamily> tree_like_family(const BipartiteGraph& g);

// Throws InvalidArgument with the range when s lies outside the window.
int closed_form_profile(const ClosedFormFamily& family, int s);

// ceil(2 sqrt s) + 1 for s > 0.
int torus_lattice_delta(std::int64_t s);
// Vertex isoperimetry of Z^2 with s = l^2 + (l-1)^2 + i, 0 <= i < 4l.
int doubled_lattice_delta(std::int64_t s);
// l with l^2 + (l-1)^2 <= s < (l+1)^2 + l^2.
int doubled_lattice_ell(std::int64_t s);

// Size of the upper shadow of the first k weight-r words of H_d in Harper order.
std::uint64_t psi_hypercube(int d, int r, std::uint64_t k);
// Delta_{d+1}(s), the vertex isoperimetric function of H_d, for 0 <= s <= 2^d.
std::uint64_t hypercube_delta(int d, std::uint64_t s);
std::uint64_t binomial(int n, int k);

// Words of H_d (bit d-1 is the first coordinate) by weight, then 1 before 0 at the first
// differing coordinate.
std::vector<std::uint32_t> harper_numbering(int d, std::size_t length);

// Spiral in the tilted lattice of V-sites of an even torus, starting from `start`.  Every
// prefix is checked against the lattice closed form and for wrap-around.
VSet spiral_numbering(const BipartiteGraph& torus, int start, int length);
std::pair<int, int> torus_dims(const BipartiteGraph& torus);

// Whether A u N(A) embeds in Z^2 consistently with the torus adjacency (no wrap).
bool lifts_to_plane(const BipartiteGraph& torus, const VSet& a);

struct LatticeOptimality {
    int n1 = 0, n3 = 0, n4 = 0;
    int n1100 = 0, n1010 = 0;
    int boundary_edges = 0;  // |d(A u N(A))|
    bool wraps = false;
};
LatticeOptimality lattice_optimality(const BipartiteGraph& torus, const VSet& a);

// |d(A u N(A))| / r on an r-regular graph; nullopt if the graph is not regular.
std::optional<Rational> regular_boundary_cost(const BipartiteGraph& g, const VSet& a);

struct Progression {
    std::vector<VSet> sets;
};

struct ProgressionFlags {
    bool valid = false;
    bool nested = false;
    bool isoperimetric = false;
    bool alpha_bounded = false;
    std::string problem;
};

using ProfileSource = std::function<int(int)>;
ProfileSource profile_source(const IsoperimetricProfile& p);
ProfileSource profile_source(const ClosedFormFamily& f);

ProgressionFlags progression_check(const BipartiteGraph& g, const Progression& p, const Rational& alpha,
                                   int s_star, const ProfileSource& delta);
Progression prefix_progression(const VSet& numbering, bool include_empty = true);

// Doubled torus seeds.  Cells are base-lattice points; the seed's V-sites are blue copies.
enum class SeedType { I, II, IIIa, IIIb, IV };
using Cell = std::pair<int, int>;

std::string to_string(SeedType t);
SeedType parse_seed_type(const std::string& text);
std::vector<Cell> seed_cells(SeedType t);
// k-th closed neighbourhood in Z^2, sorted.
std::vector<Cell> inflate(const std::vector<Cell>& cells, int k);
// l for which N^k(S) is the Pareto optimal set of that type.
int seed_ell(SeedType t, int k);

struct SeedSet {
    SeedType type = SeedType::I;
    int k = 0;
    int ell = 0;
    std::vector<Cell> cells;
    VSet sites;
    int cost = 0;
    int closed_form = 0;
};

struct ConnectingProgression {
    char which = 'a';
    SeedType from = SeedType::I, to = SeedType::II;
    int ell = 0;
    Progression progression;
    bool found = false;
    bool isoperimetric = false;  // every member matches the closed form on the torus
};

struct SeedNumbering {
    SeedSet set;
    std::vector<ConnectingProgression> progressions;
};

// N^k(S) placed on doubled(torus:MxN); throws InvalidArgument if it would wrap.
SeedSet seed_set_doubled_torus(SeedType t, int k, int m, int n);
// Nested isoperimetric progression of the given kind ('a'..'d') at l, found by depth-first search.
ConnectingProgression connecting_progression(char which, int ell, int m, int n);
SeedNumbering seed_numbering_doubled_torus(SeedType t, int k, int m, int n);

std::string profile_csv(const IsoperimetricProfile& p);

}  // namespace hcmeta

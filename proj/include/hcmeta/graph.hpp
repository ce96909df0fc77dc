#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hcmeta/errors.hpp"

namespace hcmeta {

using Edge = std::pair<int, int>;
using SiteLabel = std::vector<int>;

// Plain undirected simple graph; input to double_graph.
struct SimpleGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    std::vector<SiteLabel> labels;
    std::string name;

    static SimpleGraph from_edges(int n, const std::vector<Edge>& edges, std::string name = {});
    std::vector<Edge> edges() const;
    bool connected() const;
};

SimpleGraph cycle_graph(int n);
SimpleGraph path_graph(int n);
SimpleGraph torus_graph(int m, int n);
SimpleGraph hypercube_graph(int d);

class BipartiteGraph {
public:
    BipartiteGraph() = default;
    // Sites 0..nu-1 form U, nu..nu+nv-1 form V.
    BipartiteGraph(int nu, int nv, const std::vector<Edge>& edges, std::string family = {},
                   std::vector<SiteLabel> labels = {});

    int num_sites() const { return nu_ + nv_; }
    int num_u() const { return nu_; }
    int num_v() const { return nv_; }
    bool in_u(int site) const { return site < nu_; }
    bool in_v(int site) const { return site >= nu_ && site < nu_ + nv_; }
    std::vector<int> u_sites() const;
    std::vector<int> v_sites() const;
    const std::vector<int>& neighbors(int site) const { return adj_[site]; }
    int degree(int site) const { return static_cast<int>(adj_[site].size()); }
    std::vector<Edge> edges() const;
    std::size_t num_edges() const;

    // Occupied-site masks; only meaningful when num_sites() <= 64.
    std::uint64_t neighbor_mask(int site) const { return nbr_mask_[site]; }
    std::uint64_t u_mask() const { return u_mask_; }
    std::uint64_t v_mask() const { return v_mask_; }
    bool fits_mask() const { return num_sites() <= 64; }

    const std::string& family() const { return family_; }
    const std::vector<SiteLabel>& labels() const { return labels_; }
    const SiteLabel& label(int site) const { return labels_[site]; }
    // Site carrying the given label, or -1.
    int find_label(const SiteLabel& label) const;

private:
    int nu_ = 0;
    int nv_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<std::uint64_t> nbr_mask_;
    std::uint64_t u_mask_ = 0;
    std::uint64_t v_mask_ = 0;
    std::string family_;
    std::vector<SiteLabel> labels_;
};

struct GraphFamilySpec {
    enum class Kind {
        complete_bipartite,
        even_cycle,
        path,
        cyclic_ladder,
        even_torus,
        hypercube,
        random_bipartite,
        doubled
    };
    Kind kind = Kind::even_cycle;
    int a = 0;  // m, cycle length, path length, ladder length, torus rows, cube dimension, |U|
    int b = 0;  // n, torus columns, |V|
    double edge_prob = 0.5;
    std::uint64_t seed = 0;
    bool u_first = true;  // path: whether the first site lies in U
    std::shared_ptr<GraphFamilySpec> base;  // doubled: the graph being doubled

    // Accepts "torus:6x6", "cycle:8", "complete:2x3", "path:6", "ladder:4", "hypercube:4",
    // "random:6x5,0.4,17", "doubled(torus:5x5)".
    static GraphFamilySpec parse(const std::string& text);
    std::string to_string() const;
};

BipartiteGraph build_family(const GraphFamilySpec& spec);
BipartiteGraph build_family(const std::string& text);

BipartiteGraph complete_bipartite(int m, int n);
BipartiteGraph even_cycle(int len);
BipartiteGraph path(int len, bool u_first = true);
BipartiteGraph cyclic_ladder(int len);
BipartiteGraph even_torus(int m, int n);
BipartiteGraph hypercube(int d);
BipartiteGraph random_bipartite(int nu, int nv, double edge_prob, std::uint64_t seed);

// Bases a doubled graph may be built from; any size >= 3 is allowed for cycles and tori.
SimpleGraph simple_from_spec(const GraphFamilySpec& spec);

// (i,red) ~ (j,blue) iff i == j or i ~ j.  Red copies form U, blue copies form V,
// so the blue copy of vertex p has id n + p.
BipartiteGraph double_graph(const SimpleGraph& g);

// Union of neighbours of a set of V-sites.
std::vector<int> neighborhood(const BipartiteGraph& g, const std::vector<int>& a);

struct ValidationReport {
    bool bipartite = true;
    bool symmetric = true;
    bool connected = true;
    std::optional<int> regular_degree;
    // Shortest cycle length, or nullopt if no cycle of length <= girth_cap exists.
    std::optional<int> girth;
    int girth_cap = 0;
    std::vector<std::string> problems;
    bool ok() const { return bipartite && symmetric && connected; }
};

ValidationReport validate(const BipartiteGraph& g, int girth_cap = 64);
std::optional<int> girth(const SimpleGraph& g, int cap = 64);

std::string to_json(const BipartiteGraph& g);

// Canonical adjacency string for graphs of at most 64 vertices (test support).
std::string canonical_form(const SimpleGraph& g);
SimpleGraph as_simple(const BipartiteGraph& g);
bool isomorphic(const SimpleGraph& a, const SimpleGraph& b);

}  // namespace hcmeta

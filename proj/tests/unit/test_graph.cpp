#include "doctest.h"

#include <algorithm>
#include <set>

#include "hcmeta/graph.hpp"
#include "json.hpp"

using namespace hcmeta;

namespace {

std::vector<int> degrees(const BipartiteGraph& g) {
    std::vector<int> d;
    for (int s = 0; s < g.num_sites(); ++s) d.push_back(g.degree(s));
    return d;
}

bool is_regular(const BipartiteGraph& g, int d) {
    auto ds = degrees(g);
    return std::all_of(ds.begin(), ds.end(), [d](int x) { return x == d; });
}

}  // namespace

TEST_CASE("complete bipartite K23 has the expected parts and degrees") {
    auto g = complete_bipartite(2, 3);
    CHECK(g.num_u() == 2);
    CHECK(g.num_v() == 3);
    CHECK(g.num_edges() == 6);
    for (int s : g.u_sites()) CHECK(g.degree(s) == 3);
    for (int s : g.v_sites()) CHECK(g.degree(s) == 2);
}

TEST_CASE("even torus 4x4 is 4-regular with equal parts") {
    auto g = even_torus(4, 4);
    CHECK(g.num_sites() == 16);
    CHECK(g.num_edges() == 32);
    CHECK(g.num_u() == 8);
    CHECK(g.num_v() == 8);
    CHECK(is_regular(g, 4));
    for (int s : g.u_sites()) CHECK((g.label(s)[0] + g.label(s)[1]) % 2 == 0);
    for (int s : g.v_sites()) CHECK((g.label(s)[0] + g.label(s)[1]) % 2 == 1);
}

TEST_CASE("hypercube H3 splits by word parity") {
    auto g = hypercube(3);
    CHECK(g.num_sites() == 8);
    CHECK(g.num_edges() == 12);
    CHECK(g.num_u() == 4);
    CHECK(is_regular(g, 3));
    for (int s : g.u_sites()) CHECK(__builtin_popcount(g.label(s)[0]) % 2 == 0);
}

TEST_CASE("every edge crosses the bipartition and lists are symmetric") {
    for (auto spec : {"torus:6x6", "cycle:8", "complete:3x4", "path:7", "ladder:6", "hypercube:4",
                      "random:6x5,0.4,17", "doubled(torus:5x5)", "doubled(cycle:5)"}) {
        auto g = build_family(spec);
        for (int s = 0; s < g.num_sites(); ++s) {
            std::set<int> seen;
            for (int t : g.neighbors(s)) {
                CHECK(g.in_u(s) != g.in_u(t));
                CHECK(seen.insert(t).second);
                auto back = g.neighbors(t);
                CHECK(std::find(back.begin(), back.end(), s) != back.end());
            }
        }
        CHECK(validate(g).ok());
    }
}

TEST_CASE("invalid family parameters are rejected") {
    CHECK_THROWS_AS(even_torus(5, 6), InvalidArgument);
    CHECK_THROWS_AS(even_cycle(7), InvalidArgument);
    CHECK_THROWS_AS(complete_bipartite(0, 3), InvalidArgument);
    CHECK_THROWS_AS(hypercube(0), InvalidArgument);
    CHECK_THROWS_AS(build_family("torus:6"), InvalidArgument);
    CHECK_THROWS_AS(build_family("moebius:4"), InvalidArgument);
    CHECK_THROWS_AS(random_bipartite(3, 3, 1e-9, 1), InvalidArgument);
}

TEST_CASE("doubled cycles are cyclic ladders") {
    for (int n = 2; n <= 6; ++n) {
        auto doubled = double_graph(cycle_graph(2 * n));
        CHECK(isomorphic(as_simple(doubled), as_simple(cyclic_ladder(2 * n))));
    }
    CHECK_FALSE(isomorphic(as_simple(double_graph(cycle_graph(6))), as_simple(even_torus(4, 4))));
}

TEST_CASE("doubled hypercubes are hypercubes of one more dimension") {
    for (int d = 1; d <= 4; ++d)
        CHECK(isomorphic(as_simple(double_graph(hypercube_graph(d))), as_simple(hypercube(d + 1))));
}

TEST_CASE("doubling a single vertex gives one edge") {
    auto g = double_graph(SimpleGraph::from_edges(1, {}));
    CHECK(g.num_u() == 1);
    CHECK(g.num_v() == 1);
    CHECK(g.num_edges() == 1);
}

TEST_CASE("doubled graph uses red copies for U and blue copies for V") {
    auto base = torus_graph(5, 5);
    auto g = double_graph(base);
    CHECK(g.num_u() == 25);
    CHECK(g.num_v() == 25);
    for (int p = 0; p < base.n; ++p) {
        auto n = g.neighbors(base.n + p);
        std::vector<int> expected{p};
        for (int q : base.adj[p]) expected.push_back(q);
        std::sort(expected.begin(), expected.end());
        CHECK(n == expected);
    }
}

TEST_CASE("neighbourhoods") {
    auto torus = even_torus(6, 6);
    CHECK(neighborhood(torus, {torus.v_sites()[0]}).size() == 4);
    CHECK(neighborhood(torus, {}).empty());
    CHECK_THROWS_AS(neighborhood(torus, {torus.u_sites()[0]}), InvalidArgument);

    auto dt = build_family("doubled(torus:5x5)");
    int blue = dt.find_label({2, 3, 1});
    auto n = neighborhood(dt, {blue});
    CHECK(n.size() == 5);
    std::set<SiteLabel> labels;
    for (int s : n) labels.insert(dt.label(s));
    CHECK(labels == std::set<SiteLabel>{{2, 3, 0}, {1, 3, 0}, {3, 3, 0}, {2, 2, 0}, {2, 4, 0}});
}

TEST_CASE("neighbourhood is monotone under inclusion") {
    auto g = build_family("random:8x8,0.3,5");
    auto v = g.v_sites();
    for (unsigned mask = 0; mask < (1u << v.size()); mask += 7) {
        std::vector<int> a, b;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (mask & (1u << i)) a.push_back(v[i]);
            if ((mask | 0x11u) & (1u << i)) b.push_back(v[i]);
        }
        auto na = neighborhood(g, a), nb = neighborhood(g, b);
        CHECK(std::includes(nb.begin(), nb.end(), na.begin(), na.end()));
    }
}

TEST_CASE("validation reports regularity and girth") {
    auto c = validate(even_cycle(6));
    CHECK(c.connected);
    CHECK(c.regular_degree == 2);
    CHECK(c.girth == 6);

    auto k = validate(complete_bipartite(2, 3));
    CHECK(k.connected);
    CHECK_FALSE(k.regular_degree.has_value());
    CHECK(k.girth == 4);

    auto t = validate(even_torus(6, 6));
    CHECK(t.regular_degree == 4);
    CHECK(t.girth == 4);

    auto p = validate(path(6));
    CHECK_FALSE(p.girth.has_value());
}

TEST_CASE("disconnected graphs fail validation") {
    BipartiteGraph g(2, 2, {{0, 2}, {1, 3}});
    auto r = validate(g);
    CHECK_FALSE(r.connected);
    CHECK_FALSE(r.ok());
}

TEST_CASE("random bipartite graphs are seeded and connected") {
    auto a = random_bipartite(6, 5, 0.4, 17);
    auto b = random_bipartite(6, 5, 0.4, 17);
    CHECK(a.edges() == b.edges());
    CHECK(validate(a).connected);
}

TEST_CASE("family specs round-trip") {
    for (auto s : {"torus:6x6", "cycle:8", "complete:2x3", "path:6", "path:5,v", "ladder:4", "hypercube:4",
                   "doubled(torus:5x5)", "doubled(cycle:5)"})
        CHECK(GraphFamilySpec::parse(s).to_string() == s);
}

TEST_CASE("graph json lists parts and edges") {
    auto g = complete_bipartite(1, 2);
    auto j = nlohmann::json::parse(to_json(g));
    CHECK(j["u_sites"] == nlohmann::json{0});
    CHECK(j["v_sites"] == nlohmann::json{1, 2});
    CHECK(j["edges"].size() == 2);
}

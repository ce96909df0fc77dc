#include "hcmeta/graph.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <tuple>
#include <deque>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

#include "hcmeta/rng.hpp"

namespace hcmeta {

namespace {

std::vector<std::vector<int>> adjacency_from_edges(int n, const std::vector<Edge>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n) throw InvalidArgument("edge endpoint out of range");
        if (a == b) throw InvalidArgument("self-loop in simple graph");
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            throw InvalidArgument("duplicate edge in simple graph");
    }
    return adj;
}

bool connected_adj(const std::vector<std::vector<int>>& adj) {
    if (adj.empty()) return true;
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : adj[x])
            if (!seen[y]) {
                seen[y] = 1;
                ++count;
                stack.push_back(y);
            }
    }
    return count == adj.size();
}

int parse_int(const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw InvalidArgument("not an integer: '" + s + "'");
    }
    if (pos != s.size()) throw InvalidArgument("not an integer: '" + s + "'");
    return v;
}

std::pair<int, int> parse_dims(const std::string& s) {
    auto x = s.find('x');
    if (x == std::string::npos) throw InvalidArgument("expected MxN, got '" + s + "'");
    return {parse_int(s.substr(0, x)), parse_int(s.substr(x + 1))};
}

// Builds a bipartite graph from a 2-colourable simple graph, U = colour-0 vertices.
BipartiteGraph from_two_coloured(const SimpleGraph& g, const std::vector<int>& colour,
                                 const std::string& family) {
    std::vector<int> id(g.n);
    int nu = 0;
    for (int i = 0; i < g.n; ++i)
        if (colour[i] == 0) id[i] = nu++;
    int nv = 0;
    for (int i = 0; i < g.n; ++i)
        if (colour[i] == 1) id[i] = nu + nv++;
    std::vector<Edge> edges;
    for (auto [a, b] : g.edges()) edges.emplace_back(id[a], id[b]);
    std::vector<SiteLabel> labels(g.n);
    for (int i = 0; i < g.n; ++i) labels[id[i]] = g.labels.empty() ? SiteLabel{i} : g.labels[i];
    return BipartiteGraph(nu, nv, edges, family, labels);
}

}  // namespace

SimpleGraph SimpleGraph::from_edges(int n, const std::vector<Edge>& edges, std::string name) {
    SimpleGraph g;
    g.n = n;
    g.adj = adjacency_from_edges(n, edges);
    g.name = std::move(name);
    return g;
}

std::vector<Edge> SimpleGraph::edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < n; ++a)
        for (int b : adj[a])
            if (a < b) out.emplace_back(a, b);
    return out;
}

bool SimpleGraph::connected() const { return connected_adj(adj); }

SimpleGraph cycle_graph(int n) {
    if (n < 3) throw InvalidArgument("cycle needs at least 3 vertices");
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    auto g = SimpleGraph::from_edges(n, e, "cycle:" + std::to_string(n));
    for (int i = 0; i < n; ++i) g.labels.push_back({i});
    return g;
}

SimpleGraph path_graph(int n) {
    if (n < 1) throw InvalidArgument("path needs at least 1 vertex");
    std::vector<Edge> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    auto g = SimpleGraph::from_edges(n, e, "path:" + std::to_string(n));
    for (int i = 0; i < n; ++i) g.labels.push_back({i});
    return g;
}

SimpleGraph torus_graph(int m, int n) {
    if (m < 3 || n < 3) throw InvalidArgument("torus sides must be at least 3");
    auto id = [n](int i, int j) { return i * n + j; };
    std::vector<Edge> e;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            e.emplace_back(id(i, j), id((i + 1) % m, j));
            e.emplace_back(id(i, j), id(i, (j + 1) % n));
        }
    auto g = SimpleGraph::from_edges(m * n, e, "torus:" + std::to_string(m) + "x" + std::to_string(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) g.labels.push_back({i, j});
    return g;
}

SimpleGraph hypercube_graph(int d) {
    if (d < 1 || d > 20) throw InvalidArgument("hypercube dimension must be in [1,20]");
    int n = 1 << d;
    std::vector<Edge> e;
    for (int w = 0; w < n; ++w)
        for (int k = 0; k < d; ++k)
            if (!(w & (1 << k))) e.emplace_back(w, w | (1 << k));
    auto g = SimpleGraph::from_edges(n, e, "hypercube:" + std::to_string(d));
    for (int w = 0; w < n; ++w) g.labels.push_back({w});
    return g;
}

BipartiteGraph::BipartiteGraph(int nu, int nv, const std::vector<Edge>& edges, std::string family,
                               std::vector<SiteLabel> labels)
    : nu_(nu), nv_(nv), family_(std::move(family)), labels_(std::move(labels)) {
    if (nu < 0 || nv < 0) throw InvalidArgument("negative part size");
    int n = nu + nv;
    for (auto [a, b] : edges)
        if (a >= 0 && b >= 0 && a < n && b < n && (a < nu) == (b < nu))
            throw InvalidArgument("edge {" + std::to_string(a) + "," + std::to_string(b) +
                                  "} joins two sites of the same part");
    adj_ = adjacency_from_edges(n, edges);
    if (labels_.empty())
        for (int i = 0; i < n; ++i) labels_.push_back({i});
    if (static_cast<int>(labels_.size()) != n) throw InvalidArgument("label count mismatch");
    nbr_mask_.assign(n, 0);
    if (n <= 64) {
        for (int i = 0; i < n; ++i) {
            for (int j : adj_[i]) nbr_mask_[i] |= std::uint64_t{1} << j;
            (i < nu ? u_mask_ : v_mask_) |= std::uint64_t{1} << i;
        }
    }
}

std::vector<int> BipartiteGraph::u_sites() const {
    std::vector<int> s(nu_);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

std::vector<int> BipartiteGraph::v_sites() const {
    std::vector<int> s(nv_);
    std::iota(s.begin(), s.end(), nu_);
    return s;
}

std::vector<Edge> BipartiteGraph::edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < nu_; ++a)
        for (int b : adj_[a]) out.emplace_back(a, b);
    return out;
}

std::size_t BipartiteGraph::num_edges() const {
    std::size_t e = 0;
    for (int a = 0; a < nu_; ++a) e += adj_[a].size();
    return e;
}

int BipartiteGraph::find_label(const SiteLabel& label) const {
    for (int i = 0; i < num_sites(); ++i)
        if (labels_[i] == label) return i;
    return -1;
}

BipartiteGraph complete_bipartite(int m, int n) {
    if (m < 1 || n < 1) throw InvalidArgument("complete_bipartite needs positive part sizes");
    std::vector<Edge> e;
    std::vector<SiteLabel> labels;
    for (int i = 0; i < m; ++i) labels.push_back({0, i});
    for (int j = 0; j < n; ++j) labels.push_back({1, j});
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) e.emplace_back(i, m + j);
    return BipartiteGraph(m, n, e, "complete:" + std::to_string(m) + "x" + std::to_string(n), labels);
}

BipartiteGraph even_cycle(int len) {
    if (len < 4 || len % 2) throw InvalidArgument("even_cycle needs an even length >= 4");
    auto g = cycle_graph(len);
    std::vector<int> colour(len);
    for (int i = 0; i < len; ++i) colour[i] = i % 2;
    return from_two_coloured(g, colour, "cycle:" + std::to_string(len));
}

BipartiteGraph path(int len, bool u_first) {
    if (len < 2) throw InvalidArgument("path needs at least 2 sites");
    auto g = path_graph(len);
    std::vector<int> colour(len);
    for (int i = 0; i < len; ++i) colour[i] = (i % 2) ^ (u_first ? 0 : 1);
    return from_two_coloured(g, colour, std::string("path:") + std::to_string(len) + (u_first ? "" : ",v"));
}

BipartiteGraph cyclic_ladder(int len) {
    if (len < 4 || len % 2) throw InvalidArgument("cyclic_ladder needs an even length >= 4");
    std::vector<Edge> e;
    auto id = [](int i, int j) { return 2 * i + j; };
    for (int i = 0; i < len; ++i) {
        e.emplace_back(id(i, 0), id((i + 1) % len, 0));
        e.emplace_back(id(i, 1), id((i + 1) % len, 1));
        e.emplace_back(id(i, 0), id(i, 1));
    }
    auto g = SimpleGraph::from_edges(2 * len, e);
    std::vector<int> colour(2 * len);
    for (int i = 0; i < len; ++i)
        for (int j = 0; j < 2; ++j) {
            colour[id(i, j)] = (i + j) % 2;
            g.labels.push_back({});
        }
    for (int i = 0; i < len; ++i)
        for (int j = 0; j < 2; ++j) g.labels[id(i, j)] = {i, j};
    return from_two_coloured(g, colour, "ladder:" + std::to_string(len));
}

BipartiteGraph even_torus(int m, int n) {
    if (m < 4 || n < 4 || m % 2 || n % 2) throw InvalidArgument("even_torus needs even sides >= 4");
    auto g = torus_graph(m, n);
    std::vector<int> colour(m * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) colour[i * n + j] = (i + j) % 2;
    return from_two_coloured(g, colour, "torus:" + std::to_string(m) + "x" + std::to_string(n));
}

BipartiteGraph hypercube(int d) {
    auto g = hypercube_graph(d);
    std::vector<int> colour(g.n);
    for (int w = 0; w < g.n; ++w) colour[w] = __builtin_popcount(w) % 2;
    return from_two_coloured(g, colour, "hypercube:" + std::to_string(d));
}

BipartiteGraph random_bipartite(int nu, int nv, double edge_prob, std::uint64_t seed) {
    if (nu < 1 || nv < 1) throw InvalidArgument("random_bipartite needs positive part sizes");
    if (!(edge_prob > 0.0 && edge_prob <= 1.0)) throw InvalidArgument("edge_prob must be in (0,1]");
    std::ostringstream fam;
    fam << "random:" << nu << "x" << nv << "," << edge_prob << "," << seed;
    CounterRng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<Edge> e;
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nv; ++j)
                if (rng.uniform() < edge_prob) e.emplace_back(i, nu + j);
        BipartiteGraph g(nu, nv, e, fam.str());
        if (validate(g, 0).connected) return g;
    }
    throw InvalidArgument("random_bipartite: no connected sample after 100 attempts");
}

SimpleGraph simple_from_spec(const GraphFamilySpec& spec) {
    using K = GraphFamilySpec::Kind;
    switch (spec.kind) {
        case K::even_cycle: return cycle_graph(spec.a);
        case K::path: return path_graph(spec.a);
        case K::even_torus: return torus_graph(spec.a, spec.b);
        case K::hypercube: return hypercube_graph(spec.a);
        default: {
            auto g = as_simple(build_family(spec));
            return g;
        }
    }
}

BipartiteGraph double_graph(const SimpleGraph& g) {
    if (g.n < 1) throw InvalidArgument("cannot double an empty graph");
    if (!g.connected()) throw InvalidArgument("cannot double a disconnected graph");
    std::vector<Edge> e;
    for (int i = 0; i < g.n; ++i) {
        e.emplace_back(i, g.n + i);
        for (int j : g.adj[i]) e.emplace_back(i, g.n + j);
    }
    std::vector<SiteLabel> labels;
    for (int colour = 0; colour < 2; ++colour)
        for (int i = 0; i < g.n; ++i) {
            SiteLabel l = g.labels.empty() ? SiteLabel{i} : g.labels[i];
            l.push_back(colour);
            labels.push_back(l);
        }
    return BipartiteGraph(g.n, g.n, e, "doubled(" + g.name + ")", labels);
}

std::vector<int> neighborhood(const BipartiteGraph& g, const std::vector<int>& a) {
    std::vector<char> mark(g.num_sites(), 0);
    for (int s : a) {
        if (!g.in_v(s)) throw InvalidArgument("neighborhood: site " + std::to_string(s) + " is not in V");
        for (int t : g.neighbors(s)) mark[t] = 1;
    }
    std::vector<int> out;
    for (int i = 0; i < g.num_sites(); ++i)
        if (mark[i]) out.push_back(i);
    return out;
}

static std::optional<int> shortest_cycle(const std::vector<std::vector<int>>& adj, int cap) {
    // A non-tree edge closing at depths du, dv gives a closed walk of length
    // du + dv + 1 containing a cycle no longer.
    int n = static_cast<int>(adj.size());
    int best = std::numeric_limits<int>::max();
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(n, -1), parent(n, -1);
        std::deque<int> q{s};
        dist[s] = 0;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            if (2 * dist[x] + 1 >= best) break;
            for (int y : adj[x]) {
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    q.push_back(y);
                } else if (parent[x] != y) {
                    best = std::min(best, dist[x] + dist[y] + 1);
                }
            }
        }
    }
    if (best <= cap) return best;
    return std::nullopt;
}

std::optional<int> girth(const SimpleGraph& g, int cap) { return shortest_cycle(g.adj, cap); }

ValidationReport validate(const BipartiteGraph& g, int girth_cap) {
    ValidationReport r;
    r.girth_cap = girth_cap;
    int n = g.num_sites();
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        const auto& nb = g.neighbors(i);
        adj[i] = nb;
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
            r.symmetric = false;
            r.problems.push_back("duplicate neighbour at site " + std::to_string(i));
        }
        for (int j : nb) {
            if (g.in_u(i) == g.in_u(j)) {
                r.bipartite = false;
                r.problems.push_back("edge within one part at site " + std::to_string(i));
            }
            if (!std::binary_search(g.neighbors(j).begin(), g.neighbors(j).end(), i)) {
                r.symmetric = false;
                r.problems.push_back("asymmetric adjacency at site " + std::to_string(i));
            }
        }
    }
    r.connected = connected_adj(adj);
    if (!r.connected) r.problems.push_back("graph is disconnected");
    if (n > 0) {
        int d = g.degree(0);
        bool reg = true;
        for (int i = 1; i < n; ++i) reg = reg && g.degree(i) == d;
        if (reg) r.regular_degree = d;
    }
    if (girth_cap > 0) r.girth = shortest_cycle(adj, girth_cap);
    return r;
}

std::string to_json(const BipartiteGraph& g) {
    nlohmann::json j;
    j["family"] = g.family();
    j["u_sites"] = g.u_sites();
    j["v_sites"] = g.v_sites();
    nlohmann::json edges = nlohmann::json::array();
    for (auto [a, b] : g.edges()) edges.push_back({a, b});
    j["edges"] = edges;
    return j.dump();
}

SimpleGraph as_simple(const BipartiteGraph& g) {
    auto s = SimpleGraph::from_edges(g.num_sites(), g.edges(), g.family());
    s.labels = g.labels();
    return s;
}

namespace {

using Colouring = std::vector<int>;

// Colour refinement with canonical renumbering of the signature classes.
Colouring refine(const SimpleGraph& g, Colouring col) {
    int classes = *std::max_element(col.begin(), col.end()) + 1;
    while (true) {
        std::vector<std::vector<int>> sig(g.n);
        for (int v = 0; v < g.n; ++v) {
            sig[v].push_back(col[v]);
            std::vector<int> nb;
            for (int w : g.adj[v]) nb.push_back(col[w]);
            std::sort(nb.begin(), nb.end());
            sig[v].insert(sig[v].end(), nb.begin(), nb.end());
        }
        std::map<std::vector<int>, int> ids;
        for (const auto& s : sig) ids.emplace(s, 0);
        int k = 0;
        for (auto& [s, id] : ids) id = k++;
        Colouring next(g.n);
        for (int v = 0; v < g.n; ++v) next[v] = ids[sig[v]];
        col = std::move(next);
        if (k == classes) return col;
        classes = k;
    }
}

void search_canonical(const SimpleGraph& g, const Colouring& col, std::string& best) {
    int classes = *std::max_element(col.begin(), col.end()) + 1;
    if (classes == g.n) {
        std::vector<int> pos = col;
        std::string s(static_cast<std::size_t>(g.n) * g.n, '0');
        for (int v = 0; v < g.n; ++v)
            for (int w : g.adj[v]) s[static_cast<std::size_t>(pos[v]) * g.n + pos[w]] = '1';
        if (best.empty() || s < best) best = s;
        return;
    }
    std::vector<int> size(classes, 0);
    for (int c : col) ++size[c];
    int target = 0;
    while (size[target] == 1) ++target;
    for (int v = 0; v < g.n; ++v) {
        if (col[v] != target) continue;
        Colouring next(g.n);
        for (int w = 0; w < g.n; ++w) next[w] = col[w] > target ? col[w] + 1 : col[w];
        for (int w = 0; w < g.n; ++w)
            if (col[w] == target && w != v) next[w] = target + 1;
        search_canonical(g, refine(g, next), best);
    }
}

}  // namespace

std::string canonical_form(const SimpleGraph& g) {
    if (g.n > 64) throw InvalidArgument("canonical_form supports at most 64 vertices");
    if (g.n == 0) return {};
    std::string best;
    search_canonical(g, refine(g, Colouring(g.n, 0)), best);
    return best;
}

bool isomorphic(const SimpleGraph& a, const SimpleGraph& b) {
    if (a.n != b.n || a.edges().size() != b.edges().size()) return false;
    return canonical_form(a) == canonical_form(b);
}

GraphFamilySpec GraphFamilySpec::parse(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text += c;
    GraphFamilySpec s;
    if (text.rfind("doubled(", 0) == 0) {
        if (text.back() != ')') throw InvalidArgument("unbalanced parenthesis in '" + raw + "'");
        s.kind = Kind::doubled;
        s.base = std::make_shared<GraphFamilySpec>(parse(text.substr(8, text.size() - 9)));
        return s;
    }
    auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("graph spec needs 'family:params', got '" + raw + "'");
    std::string fam = text.substr(0, colon);
    std::string arg = text.substr(colon + 1);
    if (fam == "complete" || fam == "kmn") {
        s.kind = Kind::complete_bipartite;
        std::tie(s.a, s.b) = parse_dims(arg);
    } else if (fam == "cycle") {
        s.kind = Kind::even_cycle;
        s.a = parse_int(arg);
    } else if (fam == "path") {
        s.kind = Kind::path;
        auto comma = arg.find(',');
        if (comma != std::string::npos) {
            std::string side = arg.substr(comma + 1);
            if (side != "u" && side != "v") throw InvalidArgument("path parity must be 'u' or 'v'");
            s.u_first = side == "u";
            arg = arg.substr(0, comma);
        }
        s.a = parse_int(arg);
    } else if (fam == "ladder") {
        s.kind = Kind::cyclic_ladder;
        s.a = parse_int(arg);
    } else if (fam == "torus") {
        s.kind = Kind::even_torus;
        std::tie(s.a, s.b) = parse_dims(arg);
    } else if (fam == "hypercube") {
        s.kind = Kind::hypercube;
        s.a = parse_int(arg);
    } else if (fam == "random") {
        s.kind = Kind::random_bipartite;
        std::stringstream ss(arg);
        std::string dims, prob, seed;
        if (!std::getline(ss, dims, ',') || !std::getline(ss, prob, ',') || !std::getline(ss, seed, ','))
            throw InvalidArgument("random spec is 'random:NUxNV,prob,seed'");
        std::tie(s.a, s.b) = parse_dims(dims);
        try {
            s.edge_prob = std::stod(prob);
            s.seed = std::stoull(seed);
        } catch (const std::exception&) {
            throw InvalidArgument("random spec is 'random:NUxNV,prob,seed'");
        }
    } else {
        throw InvalidArgument("unknown graph family '" + fam + "'");
    }
    return s;
}

std::string GraphFamilySpec::to_string() const {
    auto dims = [this] { return std::to_string(a) + "x" + std::to_string(b); };
    switch (kind) {
        case Kind::complete_bipartite: return "complete:" + dims();
        case Kind::even_cycle: return "cycle:" + std::to_string(a);
        case Kind::path: return "path:" + std::to_string(a) + (u_first ? "" : ",v");
        case Kind::cyclic_ladder: return "ladder:" + std::to_string(a);
        case Kind::even_torus: return "torus:" + dims();
        case Kind::hypercube: return "hypercube:" + std::to_string(a);
        case Kind::random_bipartite: {
            std::ostringstream o;
            o << "random:" << dims() << "," << edge_prob << "," << seed;
            return o.str();
        }
        case Kind::doubled: return "doubled(" + base->to_string() + ")";
    }
    return {};
}

BipartiteGraph build_family(const GraphFamilySpec& spec) {
    using K = GraphFamilySpec::Kind;
    switch (spec.kind) {
        case K::complete_bipartite: return complete_bipartite(spec.a, spec.b);
        case K::even_cycle: return even_cycle(spec.a);
        case K::path: return path(spec.a, spec.u_first);
        case K::cyclic_ladder: return cyclic_ladder(spec.a);
        case K::even_torus: return even_torus(spec.a, spec.b);
        case K::hypercube: return hypercube(spec.a);
        case K::random_bipartite: return random_bipartite(spec.a, spec.b, spec.edge_prob, spec.seed);
        case K::doubled: {
            if (!spec.base) throw InvalidArgument("doubled spec without base");
            auto base = simple_from_spec(*spec.base);
            base.name = spec.base->to_string();
            return double_graph(base);
        }
    }
    throw InvalidArgument("unknown graph family");
}

BipartiteGraph build_family(const std::string& text) { return build_family(GraphFamilySpec::parse(text)); }

}  // namespace hcmeta

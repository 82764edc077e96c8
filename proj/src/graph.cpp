#include "spinlab/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace spinlab {

int Graph::edge_index(int u, int v) const {
    for (const auto& [w, e] : adj[u])
        if (w == v) return e;
    return -1;
}

std::vector<int> Graph::slice_vertices(int lev) const {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (!level.empty() && level[v] == lev) out.push_back(v);
    return out;
}

std::vector<int> Graph::boundary_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (!boundary_flag.empty() && boundary_flag[v]) out.push_back(v);
    return out;
}

void Graph::finalize() {
    for (auto& e : edges) {
        if (e.u == e.v) throw std::invalid_argument("graph: self-loop");
        if (e.u > e.v) std::swap(e.u, e.v);
        if (e.u < 0 || e.v >= n) throw std::invalid_argument("graph: edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    for (size_t i = 1; i < edges.size(); ++i)
        if (edges[i] == edges[i - 1]) throw std::invalid_argument("graph: duplicate edge");
    adj.assign(n, {});
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        adj[edges[e].u].push_back({edges[e].v, e});
        adj[edges[e].v].push_back({edges[e].u, e});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    degree_bound = 0;
    for (int v = 0; v < n; ++v) degree_bound = std::max(degree_bound, degree(v));
}

Graph make_graph(int n, std::vector<Edge> edges, GraphKind kind) {
    Graph g;
    g.n = n;
    g.edges = std::move(edges);
    g.kind = kind;
    g.finalize();
    return g;
}

Graph complete_graph(int n) {
    std::vector<Edge> es;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) es.push_back({u, v});
    return make_graph(n, std::move(es), GraphKind::Complete);
}

Graph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle_graph: n >= 3 required");
    std::vector<Edge> es;
    for (int v = 0; v < n; ++v) es.push_back({v, (v + 1) % n});
    return make_graph(n, std::move(es), GraphKind::Cycle);
}

Graph path_graph(int n) {
    if (n < 1) throw std::invalid_argument("path_graph: n >= 1 required");
    std::vector<Edge> es;
    for (int v = 0; v + 1 < n; ++v) es.push_back({v, v + 1});
    return make_graph(n, std::move(es), GraphKind::Path);
}

Graph build_regular_tree(int degree, int depth) {
    if (degree < 3) throw std::invalid_argument("build_regular_tree: degree >= 3 required");
    if (depth < 1) throw std::invalid_argument("build_regular_tree: depth >= 1 required");
    std::vector<Edge> es;
    std::vector<int> depths{0};
    std::vector<int> frontier{0};
    int next = 1;
    for (int d = 1; d <= depth; ++d) {
        std::vector<int> nf;
        for (int parent : frontier) {
            const int kids = (d == 1) ? degree : degree - 1;
            for (int k = 0; k < kids; ++k) {
                es.push_back({parent, next});
                depths.push_back(d);
                nf.push_back(next);
                ++next;
            }
        }
        frontier = std::move(nf);
    }
    Graph g = make_graph(next, std::move(es), GraphKind::RegularTree);
    g.depth = std::move(depths);
    g.boundary_flag.assign(g.n, 0);
    for (int v = 0; v < g.n; ++v)
        if (g.depth[v] == depth) g.boundary_flag[v] = 1;
    return g;
}

Graph build_cylinder(const Graph& slice, int low_level, int high_level) {
    if (slice.n == 0) throw std::invalid_argument("build_cylinder: empty slice");
    if (low_level > high_level) throw std::invalid_argument("build_cylinder: low > high");
    const int m = slice.n;
    const int layers = high_level - low_level + 1;
    std::vector<Edge> es;
    for (int l = 0; l < layers; ++l) {
        for (const auto& e : slice.edges) es.push_back({l * m + e.u, l * m + e.v});
        if (l + 1 < layers)
            for (int j = 0; j < m; ++j) es.push_back({l * m + j, (l + 1) * m + j});
    }
    Graph g = make_graph(layers * m, std::move(es), GraphKind::Cylinder);
    g.level.resize(g.n);
    g.slice_pos.resize(g.n);
    for (int l = 0; l < layers; ++l)
        for (int j = 0; j < m; ++j) {
            g.level[l * m + j] = low_level + l;
            g.slice_pos[l * m + j] = j;
        }
    if (slice.special_vertex >= 0) g.special_vertex = slice.special_vertex;
    return g;
}

Graph build_shared_clique_pair(int n) {
    if (n < 4) throw std::invalid_argument("build_shared_clique_pair: n >= 4 required");
    // vertex 0 is shared; copy A = {0, 1..n-1}, copy B = {0, n..2n-2}
    std::vector<Edge> es;
    auto add_clique = [&](std::vector<int> vs) {
        for (size_t i = 0; i < vs.size(); ++i)
            for (size_t j = i + 1; j < vs.size(); ++j) es.push_back({vs[i], vs[j]});
    };
    std::vector<int> a{0}, b{0};
    for (int v = 1; v < n; ++v) a.push_back(v);
    for (int v = n; v < 2 * n - 1; ++v) b.push_back(v);
    add_clique(a);
    add_clique(b);
    Graph g = make_graph(2 * n - 1, std::move(es), GraphKind::SharedCliquePair);
    g.special_vertex = 0;
    return g;
}

std::vector<std::vector<int>> induced_components(const Graph& g, std::span<const uint8_t> member) {
    std::vector<int> comp(g.n, -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < g.n; ++s) {
        if (!member[s] || comp[s] >= 0) continue;
        std::vector<int> stack{s}, verts;
        comp[s] = static_cast<int>(out.size());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            verts.push_back(v);
            for (const auto& [w, e] : g.adj[v]) {
                (void)e;
                if (member[w] && comp[w] < 0) {
                    comp[w] = comp[s];
                    stack.push_back(w);
                }
            }
        }
        std::sort(verts.begin(), verts.end());
        out.push_back(std::move(verts));
    }
    return out;
}

namespace {
const char* kind_name(GraphKind k) {
    switch (k) {
        case GraphKind::SquareWindow: return "square-window";
        case GraphKind::RegularTree: return "regular-tree";
        case GraphKind::Cylinder: return "cylinder";
        case GraphKind::SharedCliquePair: return "shared-clique-pair";
        case GraphKind::Complete: return "complete";
        case GraphKind::Cycle: return "cycle";
        case GraphKind::Path: return "path";
        default: return "generic";
    }
}
GraphKind kind_from_name(const std::string& s) {
    if (s == "square-window") return GraphKind::SquareWindow;
    if (s == "regular-tree") return GraphKind::RegularTree;
    if (s == "cylinder") return GraphKind::Cylinder;
    if (s == "shared-clique-pair") return GraphKind::SharedCliquePair;
    if (s == "complete") return GraphKind::Complete;
    if (s == "cycle") return GraphKind::Cycle;
    if (s == "path") return GraphKind::Path;
    return GraphKind::Generic;
}

void write_int_row(std::ostream& out, const char* tag, const std::vector<int>& v) {
    if (v.empty()) return;
    out << tag;
    for (int x : v) out << ' ' << x;
    out << '\n';
}
}  // namespace

void write_graph(std::ostream& out, const Graph& g) {
    out << "graph " << kind_name(g.kind) << ' ' << g.n << ' ' << g.edge_count() << ' '
        << g.special_vertex << '\n';
    write_int_row(out, "level", g.level);
    write_int_row(out, "slice", g.slice_pos);
    write_int_row(out, "depth", g.depth);
    if (!g.boundary_flag.empty()) {
        out << "boundary";
        for (auto b : g.boundary_flag) out << ' ' << int(b);
        out << '\n';
    }
    out << "edges\n";
    for (const auto& e : g.edges) out << e.u << ' ' << e.v << '\n';
}

Graph read_graph(std::istream& in) {
    std::string word, kind;
    int n = 0, m = 0, special = -1;
    in >> word >> kind >> n >> m >> special;
    if (word != "graph" || n < 0) throw std::runtime_error("read_graph: bad header");
    Graph g;
    g.n = n;
    g.kind = kind_from_name(kind);
    g.special_vertex = special;
    auto read_ints = [&](std::vector<int>& dst) {
        dst.resize(n);
        for (auto& x : dst) in >> x;
    };
    while (in >> word && word != "edges") {
        if (word == "level") read_ints(g.level);
        else if (word == "slice") read_ints(g.slice_pos);
        else if (word == "depth") read_ints(g.depth);
        else if (word == "boundary") {
            g.boundary_flag.resize(n);
            for (auto& b : g.boundary_flag) {
                int x;
                in >> x;
                b = static_cast<uint8_t>(x);
            }
        } else {
            throw std::runtime_error("read_graph: unknown section '" + word + "'");
        }
    }
    for (int i = 0; i < m; ++i) {
        Edge e;
        in >> e.u >> e.v;
        g.edges.push_back(e);
    }
    if (!in) throw std::runtime_error("read_graph: truncated edge list");
    g.finalize();
    return g;
}

}  // namespace spinlab

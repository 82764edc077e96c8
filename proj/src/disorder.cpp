#include "spinlab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spinlab {

Coupling sample_couplings(const Graph& g, CouplingDescriptor desc, uint64_t seed) {
    Coupling c;
    c.desc = desc;
    c.seed = seed;
    c.j.resize(g.edge_count());
    for (uint64_t attempt = 0;; ++attempt) {
        RngStream rng(purpose_seed(seed, Purpose::Couplings, attempt));
        for (auto& x : c.j) {
            switch (desc.kind) {
                case CouplingDescriptor::Gaussian: x = rng.gaussian(0.0, desc.param); break;
                case CouplingDescriptor::UniformSymmetric:
                    x = desc.param * (2.0 * rng.uniform01() - 1.0);
                    break;
                case CouplingDescriptor::ConstantPlusOne: x = 1.0; break;
                case CouplingDescriptor::PositiveExponential:
                    x = rng.exponential(1.0 / desc.param);
                    break;
            }
        }
        if (!desc.continuous()) return c;
        std::set<double> distinct(c.j.begin(), c.j.end());
        const bool ok = distinct.size() == c.j.size() && !distinct.count(0.0);
        if (ok) return c;  // probability-1 branch; resample on the null event
    }
}

double total_energy(const Graph& g, const Coupling& c, const SpinConfig& s) {
    double h = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) h -= c[e] * s[g.edges[e].u] * s[g.edges[e].v];
    return h;
}

bool is_fixed_edge(const Graph& g, const Coupling& c, int edge) {
    const auto [x, y] = g.edges[edge];
    const double jxy = std::abs(c[edge]);
    for (int end : {x, y}) {
        double rest = 0.0;
        for (const auto& [nb, e] : g.adj[end]) {
            (void)nb;
            if (e != edge) rest += std::abs(c[e]);
        }
        if (jxy > rest) return true;
    }
    return false;
}

namespace {

// Edges incident to the subset that are not tree edges (slice-internal
// non-tree edges plus edges leaving the subset), summed in |J|.
double external_weight(const Graph& g, const Coupling& c, std::span<const int> subset,
                       const std::set<int>& tree_edges) {
    std::set<int> seen;
    double sum = 0.0;
    for (int v : subset)
        for (const auto& [nb, e] : g.adj[v]) {
            (void)nb;
            if (tree_edges.count(e) || seen.count(e)) continue;
            seen.insert(e);
            sum += std::abs(c[e]);
        }
    return sum;
}

// Ordered-domination criterion for a given spanning tree and root: orient the
// tree toward the root; each non-root vertex's parent edge must satisfy
// |J_e| > external + sum of |J| over the vertex's other tree edges.
bool tree_certifies(const Graph& g, const Coupling& c, std::span<const int> subset,
                    const std::vector<int>& tree, int root) {
    std::set<int> tset(tree.begin(), tree.end());
    const double ext = external_weight(g, c, subset, tset);
    std::map<int, std::vector<std::pair<int, int>>> tadj;  // v -> (nbr, edge)
    for (int e : tree) {
        tadj[g.edges[e].u].push_back({g.edges[e].v, e});
        tadj[g.edges[e].v].push_back({g.edges[e].u, e});
    }
    std::map<int, int> parent_edge;
    std::vector<int> order{root};
    std::set<int> vis{root};
    for (size_t i = 0; i < order.size(); ++i) {
        for (auto [nb, e] : tadj[order[i]]) {
            if (vis.count(nb)) continue;
            vis.insert(nb);
            parent_edge[nb] = e;
            order.push_back(nb);
        }
    }
    if (vis.size() != subset.size()) return false;  // not spanning
    for (int v : subset) {
        if (v == root) continue;
        const int pe = parent_edge.at(v);
        double others = 0.0;
        for (auto [nb, e] : tadj[v]) {
            (void)nb;
            if (e != pe) others += std::abs(c[e]);
        }
        if (!(std::abs(c[pe]) > ext + others)) return false;
    }
    return true;
}

void spanning_trees_rec(const std::vector<int>& cand_edges, size_t idx, std::vector<int>& chosen,
                        size_t need, const Graph& g, std::span<const int> subset,
                        std::vector<std::vector<int>>& out) {
    if (chosen.size() == need) {
        std::map<int, int> uf;
        for (int v : subset) uf[v] = v;
        auto find = [&](int v) {
            while (uf[v] != v) v = uf[v] = uf[uf[v]];
            return v;
        };
        for (int e : chosen) {
            const int a = find(g.edges[e].u), b = find(g.edges[e].v);
            if (a == b) return;
            uf[a] = b;
        }
        out.push_back(chosen);
        return;
    }
    if (idx >= cand_edges.size()) return;
    if (cand_edges.size() - idx < need - chosen.size()) return;
    chosen.push_back(cand_edges[idx]);
    spanning_trees_rec(cand_edges, idx + 1, chosen, need, g, subset, out);
    chosen.pop_back();
    spanning_trees_rec(cand_edges, idx + 1, chosen, need, g, subset, out);
}

}  // namespace

std::optional<FixedTree> find_fixed_spanning_tree(const Graph& g, const Coupling& c,
                                                  std::span<const int> subset,
                                                  int exhaustive_cap) {
    if (subset.empty()) throw std::invalid_argument("find_fixed_spanning_tree: empty subset");
    std::set<int> sset(subset.begin(), subset.end());
    std::vector<int> internal;
    for (int v : subset)
        for (const auto& [nb, e] : g.adj[v])
            if (nb > v && sset.count(nb)) internal.push_back(e);
    {
        std::set<int> vis{subset[0]};
        std::vector<int> stack{subset[0]};
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const auto& [nb, e] : g.adj[v]) {
                (void)e;
                if (sset.count(nb) && !vis.count(nb)) {
                    vis.insert(nb);
                    stack.push_back(nb);
                }
            }
        }
        if (vis.size() != subset.size())
            throw std::invalid_argument("find_fixed_spanning_tree: subset not connected");
    }
    if (subset.size() == 1) return FixedTree{{}, subset[0], false};

    if (static_cast<int>(subset.size()) <= exhaustive_cap) {
        std::vector<std::vector<int>> trees;
        std::vector<int> chosen;
        spanning_trees_rec(internal, 0, chosen, subset.size() - 1, g, subset, trees);
        for (const auto& tree : trees)
            for (int root : subset)
                if (tree_certifies(g, c, subset, tree, root)) return FixedTree{tree, root, false};
        return std::nullopt;
    }

    // greedy heaviest-|J| spanning tree, canonical root, flagged sufficient-only
    std::vector<int> by_weight = internal;
    std::sort(by_weight.begin(), by_weight.end(),
              [&](int a, int b) { return std::abs(c[a]) > std::abs(c[b]); });
    std::map<int, int> uf;
    for (int v : subset) uf[v] = v;
    auto find = [&](int v) {
        while (uf[v] != v) v = uf[v] = uf[uf[v]];
        return v;
    };
    std::vector<int> tree;
    for (int e : by_weight) {
        const int a = find(g.edges[e].u), b = find(g.edges[e].v);
        if (a == b) continue;
        uf[a] = b;
        tree.push_back(e);
    }
    if (tree_certifies(g, c, subset, tree, subset[0])) return FixedTree{tree, subset[0], true};
    return std::nullopt;
}

std::optional<ChokingCycle> find_choking_cycle(const PlanarWindow& w, int vertex, int max_edges) {
    if (w.mode == BoundaryMode::Periodic)
        throw std::invalid_argument("find_choking_cycle: planar window required");
    const int x0 = w.vx(vertex), y0 = w.vy(vertex);
    struct Rect {
        int x1, y1, x2, y2;
        long long area() const { return static_cast<long long>(x2 - x1) * (y2 - y1); }
    };
    std::vector<Rect> rects;
    for (int x1 = 0; x1 < x0; ++x1)
        for (int x2 = x0 + 1; x2 < w.width; ++x2)
            for (int y1 = 0; y1 < y0; ++y1)
                for (int y2 = y0 + 1; y2 < w.height; ++y2) rects.push_back({x1, y1, x2, y2});
    std::sort(rects.begin(), rects.end(), [](const Rect& a, const Rect& b) {
        if (a.area() != b.area()) return a.area() < b.area();
        return std::tie(a.x1, a.y1, a.x2, a.y2) < std::tie(b.x1, b.y1, b.x2, b.y2);
    });
    for (const auto& r : rects) {
        std::vector<int> cyc;
        for (int x = r.x1; x < r.x2; ++x) cyc.push_back(w.vertex_id(x, r.y1));
        for (int y = r.y1; y < r.y2; ++y) cyc.push_back(w.vertex_id(r.x2, y));
        for (int x = r.x2; x > r.x1; --x) cyc.push_back(w.vertex_id(x, r.y2));
        for (int y = r.y2; y > r.y1; --y) cyc.push_back(w.vertex_id(r.x1, y));
        std::set<int> edges;  // on the cycle or touching one of its vertices
        for (int v : cyc)
            for (const auto& [nb, e] : w.graph.adj[v]) {
                (void)nb;
                edges.insert(e);
            }
        if (static_cast<int>(edges.size()) < max_edges)
            return ChokingCycle{cyc, static_cast<int>(edges.size())};
    }
    return std::nullopt;
}

PercColoring sample_perc_coloring(const Graph& g, double p, uint64_t seed) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("sample_perc_coloring: p in (0,1) required");
    PercColoring col;
    col.p = p;
    col.seed = seed;
    col.black.resize(g.n);
    RngStream rng(purpose_seed(seed, Purpose::Colors));
    for (auto& b : col.black) b = rng.bernoulli(p) ? 1 : 0;
    return col;
}

std::vector<uint8_t> majority_recolor(const Graph& g, const PercColoring& col) {
    std::vector<uint8_t> red(g.n, 0);
    for (int v = 0; v < g.n; ++v) {
        int black = col.black[v] ? 1 : 0;
        int total = 1;
        for (const auto& [nb, e] : g.adj[v]) {
            (void)e;
            black += col.black[nb] ? 1 : 0;
            ++total;
        }
        red[v] = (2 * black > total) ? 1 : 0;
    }
    return red;
}

std::vector<int> cluster_sizes(const Graph& g, std::span<const uint8_t> member) {
    auto comps = induced_components(g, member);
    std::vector<int> sizes;
    for (const auto& c : comps) sizes.push_back(static_cast<int>(c.size()));
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

void write_couplings(std::ostream& out, const Graph& g, const Coupling& c) {
    const char* kind = c.desc.kind == CouplingDescriptor::Gaussian           ? "gaussian"
                       : c.desc.kind == CouplingDescriptor::UniformSymmetric ? "uniform-symmetric"
                       : c.desc.kind == CouplingDescriptor::ConstantPlusOne
                           ? "constant"
                           : "positive-exponential";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", c.desc.param);
    out << "couplings " << kind << ' ' << buf << ' ' << c.seed << ' ' << c.edge_count() << '\n';
    for (int e = 0; e < c.edge_count(); ++e) {
        std::snprintf(buf, sizeof buf, "%.17g", c.j[e]);
        out << g.edges[e].u << ' ' << g.edges[e].v << ' ' << buf << '\n';
    }
}

Coupling read_couplings(std::istream& in, const Graph& g) {
    std::string word, kind;
    double param;
    uint64_t seed;
    int count;
    in >> word >> kind >> param >> seed >> count;
    if (word != "couplings" || count != g.edge_count())
        throw std::runtime_error("read_couplings: bad header");
    Coupling c;
    c.desc.param = param;
    c.seed = seed;
    if (kind == "gaussian") c.desc.kind = CouplingDescriptor::Gaussian;
    else if (kind == "uniform-symmetric") c.desc.kind = CouplingDescriptor::UniformSymmetric;
    else if (kind == "constant") c.desc.kind = CouplingDescriptor::ConstantPlusOne;
    else if (kind == "positive-exponential") c.desc.kind = CouplingDescriptor::PositiveExponential;
    else throw std::runtime_error("read_couplings: bad kind");
    c.j.resize(count);
    for (int i = 0; i < count; ++i) {
        int u, v;
        double x;
        in >> u >> v >> x;
        const int e = g.edge_index(u, v);
        if (e < 0) throw std::runtime_error("read_couplings: unknown edge");
        c.j[e] = x;
    }
    if (!in) throw std::runtime_error("read_couplings: truncated");
    return c;
}

}  // namespace spinlab

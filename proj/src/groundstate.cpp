#include "spinlab/groundstate.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace spinlab {

GroundStateReport enumerate_ground_states(const Graph& g, const Coupling& c,
                                          int budget_vertices) {
    if (g.n < 1) throw std::invalid_argument("enumerate_ground_states: empty graph");
    if (g.n > budget_vertices)
        throw std::length_error("enumerate_ground_states: vertex budget exceeded");
    constexpr double kTol = 1e-12;
    const uint64_t total = 1ull << (g.n - 1);

    // pass 1: exact minimum; pass 2: collect everything within tolerance
    SpinConfig s(g.n, +1);
    double h = total_energy(g, c, s);
    double best = h;
    for (uint64_t i = 1; i < total; ++i) {
        // Gray-code step: flip vertex (ctz(i) + 1); vertex 0 stays +1
        const int v = std::countr_zero(i) + 1;
        double dh = 0.0;
        for (const auto& [nb, e] : g.adj[v]) dh += 2.0 * c[e] * s[v] * s[nb];
        s[v] = static_cast<int8_t>(-s[v]);
        h += dh;
        best = std::min(best, h);
    }

    GroundStateReport r;
    r.min_energy = best;
    std::fill(s.begin(), s.end(), static_cast<int8_t>(+1));
    h = total_energy(g, c, s);
    std::vector<SpinConfig> kept;
    if (h <= best + kTol) kept.push_back(s);
    for (uint64_t i = 1; i < total; ++i) {
        const int v = std::countr_zero(i) + 1;
        double dh = 0.0;
        for (const auto& [nb, e] : g.adj[v]) dh += 2.0 * c[e] * s[v] * s[nb];
        s[v] = static_cast<int8_t>(-s[v]);
        h += dh;
        if (h <= best + kTol) {
            if (kept.size() >= 100'000)
                throw std::length_error("enumerate_ground_states: minimizer set too large");
            kept.push_back(s);
        }
    }
    std::sort(kept.begin(), kept.end());
    r.minimizers = std::move(kept);
    r.degenerate = r.minimizers.size() > 1;
    for (const auto& m : r.minimizers) {
        std::vector<int> uns;
        for (int e = 0; e < g.edge_count(); ++e)
            if (c[e] * m[g.edges[e].u] * m[g.edges[e].v] < 0) uns.push_back(e);
        r.unsatisfied.push_back(std::move(uns));
    }
    return r;
}

namespace {

// Connected-subset enumeration (each subset once: seed = smallest vertex,
// frame-owned candidate marks as in the loop enumerator).
struct SubsetScan {
    const Graph& g;
    int k_max;
    std::span<const uint8_t> skip;
    std::size_t budget;
    std::size_t visited = 0;

    std::vector<int> current;
    std::vector<uint8_t> in_current, banned, in_ext;

    // returns false to stop the scan early (verdict found)
    std::function<bool(const std::vector<int>&)> visit;

    SubsetScan(const Graph& g_, int k, std::span<const uint8_t> sk, std::size_t b)
        : g(g_), k_max(k), skip(sk), budget(b) {
        in_current.assign(g.n, 0);
        banned.assign(g.n, 0);
        in_ext.assign(g.n, 0);
    }

    bool usable(int v) const { return skip.empty() || !skip[v]; }

    bool grow(int seed, std::vector<int> ext) {
        if (++visited > budget) throw std::length_error("verify_local_ground_state: subset budget");
        if (!visit(current)) return false;
        if (static_cast<int>(current.size()) >= k_max) return true;
        std::vector<int> banned_here;
        bool keep_going = true;
        size_t idx = 0;
        while (idx < ext.size()) {
            const int v = ext[idx++];
            std::vector<int> child(ext.begin() + idx, ext.end());
            std::vector<int> marked;
            for (const auto& [nb, e] : g.adj[v]) {
                (void)e;
                if (nb <= seed || banned[nb] || in_ext[nb] || in_current[nb] || !usable(nb))
                    continue;
                child.push_back(nb);
                in_ext[nb] = 1;
                marked.push_back(nb);
            }
            current.push_back(v);
            in_current[v] = 1;
            keep_going = grow(seed, std::move(child));
            in_current[v] = 0;
            current.pop_back();
            for (int nb : marked) in_ext[nb] = 0;
            if (!keep_going) break;
            banned[v] = 1;
            banned_here.push_back(v);
        }
        for (int v : banned_here) banned[v] = 0;
        return keep_going;
    }

    void run() {
        for (int seed = 0; seed < g.n; ++seed) {
            if (!usable(seed)) continue;
            current = {seed};
            in_current[seed] = 1;
            std::vector<int> ext;
            for (const auto& [nb, e] : g.adj[seed]) {
                (void)e;
                if (nb > seed && usable(nb)) {
                    ext.push_back(nb);
                    in_ext[nb] = 1;
                }
            }
            const bool keep_going = grow(seed, ext);
            for (int nb : ext) in_ext[nb] = 0;
            in_current[seed] = 0;
            if (!keep_going) return;
        }
    }
};

}  // namespace

LocalVerdict verify_local_ground_state(const Graph& g, const Coupling& c, const SpinConfig& s,
                                       int k_max, std::span<const uint8_t> skip,
                                       std::size_t subset_budget) {
    if (k_max < 1) throw std::invalid_argument("verify_local_ground_state: K >= 1 required");
    constexpr double kTol = 1e-12;
    LocalVerdict verdict;
    SubsetScan scan(g, k_max, skip, subset_budget);
    scan.visit = [&](const std::vector<int>& subset) {
        double sum = 0.0;
        for (int v : subset)
            for (const auto& [nb, e] : g.adj[v])
                if (!scan.in_current[nb]) sum += c[e] * s[v] * s[nb];
        if (sum < -kTol) {
            verdict.pass = false;
            verdict.witness = subset;
            std::sort(verdict.witness.begin(), verdict.witness.end());
            verdict.witness_boundary_sum = sum;
            return false;
        }
        return true;
    };
    scan.run();
    return verdict;
}

UnsatReport unsatisfied_subgraph(const PlanarWindow& w, const Coupling& c, const SpinConfig& s) {
    if (w.mode == BoundaryMode::Periodic)
        throw std::invalid_argument("unsatisfied_subgraph: planar window required");
    UnsatReport r;
    std::vector<int> uf(w.face_count());
    for (int f = 0; f < w.face_count(); ++f) uf[f] = f;
    auto find = [&](int f) {
        while (uf[f] != f) f = uf[f] = uf[uf[f]];
        return f;
    };
    for (int d = 0; d < w.dual_edge_count(); ++d) {
        const int e = w.primal_of_dual[d];
        if (c[e] * s[w.graph.edges[e].u] * s[w.graph.edges[e].v] < 0) {
            r.dual_edges.push_back(d);
            const int a = find(w.dual_ends[d].first), b = find(w.dual_ends[d].second);
            if (a == b) r.forest = false;
            else uf[a] = b;
        }
    }
    return r;
}

FrustrationReport plaquette_frustration_check(const PlanarWindow& w, const Coupling& c) {
    FrustrationReport r;
    for (int f = 0; f < w.face_count(); ++f) {
        const auto es = w.face_edges(f);
        double prod = 1.0;
        for (int e : es) prod *= c[e];
        if (prod >= 0) continue;
        r.frustrated_faces.push_back(f);
        // the four face corners, in the edge structure's vertex set
        std::set<int> corner_set;
        for (int e : es) {
            corner_set.insert(w.graph.edges[e].u);
            corner_set.insert(w.graph.edges[e].v);
        }
        std::vector<int> corners(corner_set.begin(), corner_set.end());
        for (int pat = 0; pat < (1 << 4); ++pat) {
            std::map<int, int> spin;
            for (int i = 0; i < 4; ++i) spin[corners[i]] = (pat >> i) & 1 ? +1 : -1;
            bool any_unsat = false;
            for (int e : es)
                if (c[e] * spin[w.graph.edges[e].u] * spin[w.graph.edges[e].v] < 0)
                    any_unsat = true;
            if (!any_unsat) r.invariant_holds = false;
        }
    }
    return r;
}

DomainWall domain_walls(const PlanarWindow& w, const SpinConfig& a, const SpinConfig& b) {
    if (a.size() != b.size() || static_cast<int>(a.size()) != w.graph.n)
        throw std::invalid_argument("domain_walls: configurations must share the window");
    DomainWall wall;
    std::vector<uint8_t> in_wall(w.dual_edge_count(), 0);
    for (int d = 0; d < w.dual_edge_count(); ++d) {
        const auto [u, v] = w.graph.edges[w.primal_of_dual[d]];
        const int agree_u = a[u] * b[u], agree_v = a[v] * b[v];
        if (agree_u != agree_v) {
            wall.dual_edges.push_back(d);
            in_wall[d] = 1;
        }
    }
    // components over shared faces
    std::map<int, std::vector<int>> at_face;
    for (int d : wall.dual_edges) {
        at_face[w.dual_ends[d].first].push_back(d);
        at_face[w.dual_ends[d].second].push_back(d);
    }
    std::vector<uint8_t> seen(w.dual_edge_count(), 0);
    for (int d0 : wall.dual_edges) {
        if (seen[d0]) continue;
        DomainWall::Component comp;
        std::vector<int> stack{d0};
        seen[d0] = 1;
        std::set<int> faces;
        while (!stack.empty()) {
            const int d = stack.back();
            stack.pop_back();
            comp.dual_edges.push_back(d);
            for (int f : {w.dual_ends[d].first, w.dual_ends[d].second}) {
                faces.insert(f);
                for (int d2 : at_face[f])
                    if (!seen[d2]) {
                        seen[d2] = 1;
                        stack.push_back(d2);
                    }
            }
        }
        std::sort(comp.dual_edges.begin(), comp.dual_edges.end());
        // cycle iff edges >= faces in the component (tree has faces-1 edges)
        const bool has_cycle = comp.dual_edges.size() >= faces.size();
        if (has_cycle) {
            comp.cls = WallClass::ClosedLoop;
        } else {
            // boundary anchoring: a border primal edge of a component face
            // whose value also differs
            int anchors = 0;
            for (int f : faces) {
                bool anchored = false;
                for (int e : w.face_edges(f)) {
                    if (w.dual_of_primal[e] >= 0) continue;  // interior edge, not border
                    const auto [u, v] = w.graph.edges[e];
                    if (a[u] * b[u] != a[v] * b[v]) anchored = true;
                }
                if (anchored) ++anchors;
            }
            comp.cls = anchors >= 2   ? WallClass::BoundaryToBoundary
                       : anchors == 1 ? WallClass::BoundaryToInterior
                                      : WallClass::Interior;
        }
        wall.components.push_back(std::move(comp));
    }
    return wall;
}

namespace {

void require_tree(const Graph& g) {
    if (g.edge_count() != g.n - 1)
        throw std::invalid_argument("tree operation: edge count != n-1");
    std::vector<uint8_t> all(g.n, 1);
    if (induced_components(g, all).size() != 1)
        throw std::invalid_argument("tree operation: graph not connected");
}

SpinConfig satisfied_config(const Graph& tree, const Coupling& c,
                            std::span<const uint8_t> unsat_edge = {}) {
    SpinConfig s(tree.n, 0);
    s[0] = +1;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (const auto& [nb, e] : tree.adj[v]) {
            if (s[nb] != 0) continue;
            int sign = c[e] > 0 ? +1 : -1;
            if (!unsat_edge.empty() && unsat_edge[e]) sign = -sign;
            s[nb] = static_cast<int8_t>(s[v] * sign);
            stack.push_back(nb);
        }
    }
    return s;
}

}  // namespace

std::optional<SpinConfig> construct_tree_flip_gsp(const Graph& tree, const Coupling& c, double h) {
    require_tree(tree);
    if (!(h > 0)) throw std::invalid_argument("construct_tree_flip_gsp: h > 0 required");
    // components of the heavy subgraph
    std::vector<int> uf(tree.n);
    for (int v = 0; v < tree.n; ++v) uf[v] = v;
    auto find = [&](int v) {
        while (uf[v] != v) v = uf[v] = uf[uf[v]];
        return v;
    };
    for (int e = 0; e < tree.edge_count(); ++e)
        if (std::abs(c[e]) >= h) uf[find(tree.edges[e].u)] = find(tree.edges[e].v);
    std::vector<uint8_t> comp_reaches_boundary(tree.n, 0);
    for (int v = 0; v < tree.n; ++v)
        if (!tree.boundary_flag.empty() && tree.boundary_flag[v])
            comp_reaches_boundary[find(v)] = 1;

    std::vector<int> light;
    for (int e = 0; e < tree.edge_count(); ++e)
        if (std::abs(c[e]) < h) light.push_back(e);
    std::sort(light.begin(), light.end(),
              [&](int a, int b) { return std::abs(c[a]) < std::abs(c[b]); });
    for (int e : light) {
        const auto [u, v] = tree.edges[e];
        if (!comp_reaches_boundary[find(u)] || !comp_reaches_boundary[find(v)]) continue;
        // flip the u side of e in the all-satisfied configuration
        SpinConfig s = satisfied_config(tree, c);
        std::vector<uint8_t> u_side(tree.n, 0);
        std::vector<int> stack{u};
        u_side[u] = 1;
        while (!stack.empty()) {
            const int x = stack.back();
            stack.pop_back();
            for (const auto& [nb, e2] : tree.adj[x]) {
                if (e2 == e || u_side[nb]) continue;
                u_side[nb] = 1;
                stack.push_back(nb);
            }
        }
        for (int x = 0; x < tree.n; ++x)
            if (u_side[x]) s[x] = static_cast<int8_t>(-s[x]);
        return s;
    }
    return std::nullopt;
}

SpinConfig sample_tree_invariant_gsp(const Graph& tree, const Coupling& c, double eps,
                                     uint64_t seed, int k_max) {
    require_tree(tree);
    for (int e = 0; e < tree.edge_count(); ++e)
        if (!(c[e] > 0))
            throw std::invalid_argument("sample_tree_invariant_gsp: positive couplings required");

    auto heavy = [&](int e) { return std::abs(c[e]) >= eps; };
    std::vector<uint8_t> unsat_edge(tree.edge_count(), 0);
    for (int e = 0; e < tree.edge_count(); ++e) {
        if (heavy(e)) continue;
        // every connected subset (size <= k_max) with e on its boundary must
        // carry a strict heavy majority, in count and summed |J|
        bool free_edge = true;
        for (int side = 0; side < 2 && free_edge; ++side) {
            const int inside = side == 0 ? tree.edges[e].u : tree.edges[e].v;
            const int outside = side == 0 ? tree.edges[e].v : tree.edges[e].u;
            std::vector<uint8_t> skip(tree.n, 0);
            skip[outside] = 1;  // subsets on this side exclude the other endpoint
            SubsetScan scan(tree, k_max, skip, 10'000'000);
            scan.visit = [&](const std::vector<int>& subset) {
                if (std::find(subset.begin(), subset.end(), inside) == subset.end()) return true;
                int heavy_cnt = 0, light_cnt = 0;
                double heavy_sum = 0, light_sum = 0;
                for (int v : subset)
                    for (const auto& [nb, e2] : tree.adj[v]) {
                        if (scan.in_current[nb]) continue;
                        if (heavy(e2)) {
                            ++heavy_cnt;
                            heavy_sum += std::abs(c[e2]);
                        } else {
                            ++light_cnt;
                            light_sum += std::abs(c[e2]);
                        }
                    }
                if (!(heavy_cnt > light_cnt && heavy_sum > light_sum)) {
                    free_edge = false;
                    return false;
                }
                return true;
            };
            scan.run();
        }
        if (free_edge) {
            RngStream coin(purpose_seed(seed, Purpose::Coins, static_cast<uint64_t>(e)));
            unsat_edge[e] = coin.coin_pm1() < 0 ? 1 : 0;
        }
    }
    return satisfied_config(tree, c, unsat_edge);
}

GroundStateReport check_torus_unique_gsp(const PlanarWindow& w, const Coupling& c) {
    if (w.mode != BoundaryMode::Periodic)
        throw std::invalid_argument("check_torus_unique_gsp: periodic window required");
    if (c.desc.kind != CouplingDescriptor::ConstantPlusOne)
        throw std::invalid_argument("check_torus_unique_gsp: constant +1 couplings required");
    if (w.width > 5 || w.height > 5)
        throw std::length_error("check_torus_unique_gsp: torus budget is 5x5");
    return enumerate_ground_states(w.graph, c, 25);
}

void write_groundstate_report_json(std::ostream& out, const Graph& g, const GroundStateReport& r) {
    nlohmann::json j;
    j["notion"] = "exhaustive-global-minimum-free-boundary";
    j["min_energy"] = r.min_energy;
    j["degenerate"] = r.degenerate;
    j["minimizer_count"] = r.minimizers.size();
    auto spins_str = [](const SpinConfig& s) {
        std::string str;
        for (int8_t x : s) str += x > 0 ? '+' : '-';
        return str;
    };
    j["minimizers"] = nlohmann::json::array();
    for (size_t i = 0; i < r.minimizers.size(); ++i) {
        nlohmann::json m;
        m["spins"] = spins_str(r.minimizers[i]);
        nlohmann::json uns = nlohmann::json::array();
        for (int e : r.unsatisfied[i])
            uns.push_back({{"u", g.edges[e].u}, {"v", g.edges[e].v}});
        m["unsatisfied_edges"] = uns;
        j["minimizers"].push_back(m);
    }
    out << j.dump(2) << '\n';
}

}  // namespace spinlab

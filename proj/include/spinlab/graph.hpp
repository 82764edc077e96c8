// Finite graph windows: adjacency with canonical edge indexing, plus the
// builders used throughout (regular-tree balls, cylinders, products,
// shared-clique counterexample graphs). Graphs are immutable after build and
// safe for concurrent reads.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinlab {

struct Edge {
    int u = -1, v = -1;  // u < v
    bool operator==(const Edge&) const = default;
};

using SpinConfig = std::vector<int8_t>;  // one of {-1,+1} per vertex

enum class GraphKind {
    Generic,
    SquareWindow,
    RegularTree,
    Cylinder,
    SharedCliquePair,
    Complete,
    Cycle,
    Path,
};

struct Graph {
    int n = 0;
    std::vector<Edge> edges;  // sorted by (u,v); the canonical edge order
    // adj[v] = sorted (neighbor, edge index) pairs
    std::vector<std::vector<std::pair<int, int>>> adj;

    GraphKind kind = GraphKind::Generic;
    int degree_bound = 0;

    // Optional per-vertex labels; empty when not applicable.
    std::vector<int> level;      // cylinder level
    std::vector<int> slice_pos;  // index inside the slice
    std::vector<int> depth;      // tree depth from the root
    std::vector<uint8_t> boundary_flag;  // tree leaves / window border
    int special_vertex = -1;     // shared vertex of a clique pair

    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    // -1 when the edge does not exist
    int edge_index(int u, int v) const;
    bool has_edge(int u, int v) const { return edge_index(u, v) >= 0; }
    bool has_levels() const { return !level.empty(); }

    std::vector<int> slice_vertices(int lev) const;
    std::vector<int> boundary_vertices() const;

    // Builds adj from edges; validates symmetry/irreflexivity and sorts.
    void finalize();
};

Graph make_graph(int n, std::vector<Edge> edges, GraphKind kind = GraphKind::Generic);

Graph complete_graph(int n);
Graph cycle_graph(int n);
Graph path_graph(int n);

// Ball of radius `depth` in the d-regular tree: the root has d children,
// every other internal vertex d-1; leaves carry the boundary flag.
Graph build_regular_tree(int degree, int depth);

// Product of `slice` with the integer path [low..high]; every vertex is joined
// to its copy in the adjacent levels.
Graph build_cylinder(const Graph& slice, int low_level, int high_level);

// Two copies of K_n sharing a single vertex (the labeled special_vertex).
Graph build_shared_clique_pair(int n);

// Connected components induced by `member` (vertices with member[v] != 0).
std::vector<std::vector<int>> induced_components(const Graph& g, std::span<const uint8_t> member);

// Line-oriented text format: header (kind, n, labels), then `u v` per line.
// Round-trips bit-exactly.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

}  // namespace spinlab

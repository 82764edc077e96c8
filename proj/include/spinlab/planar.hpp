// Square-lattice windows with planar embedding and dual structure, and the
// dual-loop machinery: enumeration of simple dual cycles, congruence types
// under translations / 90-degree rotations / reflections, and loop geometry
// (enclosed cells, crossed primal edges, V_gamma).
//
// Conventions. Vertices live at integer points (x,y), 0 <= x < width,
// 0 <= y < height. Faces (dual vertices) are the unit squares, indexed by
// their lower-left corner. A dual loop is a simple cycle in the
// face-adjacency graph; each dual edge crosses exactly one interior primal
// edge. The cells of the dual lattice (faces of the dual grid) correspond to
// interior primal vertices, and a loop encloses exactly a set of such cells:
// flipping those vertices changes the value of exactly the crossed edges.
#pragma once

#include "spinlab/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinlab {

enum class BoundaryMode { Free, Fixed, Periodic };

struct PlanarWindow {
    int width = 0, height = 0;
    BoundaryMode mode = BoundaryMode::Free;
    Graph graph;
    std::vector<int8_t> xi;  // fixed-mode boundary values; empty otherwise

    int faces_x = 0, faces_y = 0;     // face grid dimensions
    std::vector<int> dual_of_primal;  // primal edge -> dual edge id, -1 on the border
    std::vector<int> primal_of_dual;  // dual edge id -> primal edge
    std::vector<std::pair<int, int>> dual_ends;  // dual edge -> (face, face), sorted

    int vertex_id(int x, int y) const { return y * width + x; }
    int vx(int v) const { return v % width; }
    int vy(int v) const { return v / width; }
    int face_id(int fx, int fy) const { return fy * faces_x + fx; }
    int fx(int f) const { return f % faces_x; }
    int fy(int f) const { return f / faces_x; }
    int face_count() const { return faces_x * faces_y; }
    int dual_edge_count() const { return static_cast<int>(primal_of_dual.size()); }

    bool is_border_vertex(int v) const;
    // Cells of the dual lattice = interior primal vertices.
    bool is_cell(int v) const;
    std::vector<int> cell_vertices() const;
    // The 4 primal edges of a face, in a fixed order.
    std::array<int, 4> face_edges(int f) const;
    // Central interior vertex; reference cell for n_[gamma].
    int reference_cell() const;
};

PlanarWindow build_square_window(int width, int height, BoundaryMode mode,
                                 std::vector<int8_t> xi = {});

struct DualLoop {
    std::vector<int> cells;        // enclosed interior primal vertices, sorted
    std::vector<int> face_cycle;   // faces along the boundary cycle, canonical start/direction
    std::vector<int> dual_edges;   // dual edge ids on the cycle, sorted
    std::vector<int> crossed_primal_edges;  // primal edges dual to the cycle, sorted
    std::vector<int> vgamma;       // V_gamma: enclosed vertices + crossed-edge endpoints, sorted

    int length() const { return static_cast<int>(dual_edges.size()); }  // l_gamma
    int span() const { return static_cast<int>(vgamma.size()); }        // S_gamma
};

// Builds the loop whose enclosed cell set is `cells`; throws if the set is not
// connected, has a hole, or pinches (i.e. its boundary is not a simple cycle).
DualLoop loop_from_cells(const PlanarWindow& w, std::span<const int> cells);

// All simple interior dual loops of length <= max_length, each exactly once,
// sorted by (length, cells). Throws when the predicted or actual loop count
// exceeds the cap.
std::vector<DualLoop> enumerate_dual_loops(const PlanarWindow& w, int max_length,
                                           std::size_t cap = 2'000'000);

struct LoopType {
    std::vector<std::pair<int, int>> canonical_cells;  // normalized representative
    std::string key;          // canonical boundary-cycle key (lex-min over the orbit)
    int length = 0;           // l, constant on the type
    int span = 0;             // S, constant on the type
    int members_at_origin = 0;  // n_[gamma]: placements covering a fixed cell
    bool truncated = false;   // window too small to host every such placement

    bool operator==(const LoopType& o) const { return key == o.key; }
};

LoopType canonical_loop_type(const PlanarWindow& w, const DualLoop& loop);

// Loops + deduplicated type table for a window; the shared input of the loop
// dynamics engine.
struct LoopEnsemble {
    int max_length = 0;
    std::vector<DualLoop> loops;
    std::vector<LoopType> types;
    std::vector<int> type_of;  // loop index -> type index
    std::vector<std::vector<int>> loops_on_dual_edge;  // dual edge -> loop indices

    int count_of_length(int l) const;  // number of types with that length
};

LoopEnsemble build_loop_ensemble(const PlanarWindow& w, int max_length,
                                 std::size_t cap = 2'000'000);

// Window serialization: header (kind, dims, boundary-mode) + one edge per line.
void write_window(std::ostream& out, const PlanarWindow& w);
PlanarWindow read_window(std::istream& in);

// Loops serialize as face-index lists, one loop per line.
void write_loops(std::ostream& out, const PlanarWindow& w, std::span<const DualLoop> loops);
std::vector<DualLoop> read_loops(std::istream& in, const PlanarWindow& w);

}  // namespace spinlab

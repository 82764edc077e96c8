// Path geometry on finite windows (directions, crosses, snails, exact ray
// intersections) and forest geometry (stems, roots, component classification,
// mass-transport estimators, boundary-path edge counts).
#pragma once

#include "spinlab/rng.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace spinlab {

using LatticePoint = std::pair<int, int>;

// Simple path of lattice neighbors inside a width x height window. The
// direction map is t(verts[i]) = t0 + i, a bijection onto a contiguous range.
struct LatticePath {
    int width = 0, height = 0;
    std::vector<LatticePoint> verts;
    int t0 = 0;
    std::map<LatticePoint, int> index_of;  // point -> position in verts

    int position(LatticePoint p) const {
        auto it = index_of.find(p);
        return it == index_of.end() ? -1 : it->second;
    }
    int direction_value(LatticePoint p) const { return t0 + position(p); }
};

LatticePath make_path(int width, int height, std::vector<LatticePoint> verts, int t0 = 0);

struct Cross {
    LatticePoint base;
    int n = 0;
    // the n-th path points on the four axis rays: x+, x-, y+, y-
    std::array<LatticePoint, 4> points;
};

struct CrossQuery {
    bool available = false;
    std::array<int, 4> hits{};  // path points found per ray (x+, x-, y+, y-)
    Cross cross;
};

CrossQuery nth_cross(const LatticePath& path, LatticePoint p, int n);

struct Snail {
    int n = 0;
    int lo_index = 0, hi_index = 0;  // contiguous span of path positions
    int length = 0;                  // path edges in the span
};

struct SnailQuery {
    bool available = false;
    Snail snail;
};

SnailQuery nth_snail(const LatticePath& path, LatticePoint p, int n);

struct CrossLemmaResult {
    bool precondition_ok = false;  // both crosses available, perpendicular point intersection
    bool holds = false;            // snails intersect and the distance bound holds
    LatticePoint shared_vertex{};
    int path_distance = 0;
    int snail_length_sum = 0;
};

CrossLemmaResult check_cross_lemma(const LatticePath& path, LatticePoint p, LatticePoint q, int n,
                                   int m);

enum class RayTag { Past, Future, AtBase };

struct RayCrossing {
    long long s_num = 0, s_den = 1;  // ray parameter, exact rational, den > 0
    RayTag tag = RayTag::AtBase;
    int lo_index = 0, hi_index = 0;  // positions of the touching run along the path

    double s() const { return double(s_num) / double(s_den); }
};

// Transversal crossings of the geometric ray p + s*(a,b), s >= 0, with the
// path's polygonal curve, ordered by s; exact rational arithmetic throughout.
std::vector<RayCrossing> ray_intersections(const LatticePath& path, LatticePoint p, int a, int b);

// Random self-avoiding path grown from the window center (myopic growth with
// restarts); used by the cross-lemma property suites.
LatticePath sample_self_avoiding_path(int width, int height, int target_length, uint64_t seed);

// ---------------------------------------------------------------------------
// Forests.
// ---------------------------------------------------------------------------

// Parent map on window vertices. parent = -1 means the stem exits the window
// (or the tree's root); parent = -2 means the vertex is not in the forest.
struct ForestView {
    int width = 0, height = 0;
    std::vector<int> parent;
    std::vector<std::vector<int>> children;
    std::vector<int> component;  // -1 when not in forest
    int component_count = 0;

    int vertex_id(int x, int y) const { return y * width + x; }
    int vx(int v) const { return v % width; }
    int vy(int v) const { return v / width; }
    bool in_forest(int v) const { return parent[v] != -2; }
    bool on_window_boundary(int v) const {
        const int x = vx(v), y = vy(v);
        return x == 0 || y == 0 || x == width - 1 || y == height - 1;
    }
    std::vector<int> stem(int v) const;  // v, parent(v), ... within the window
};

ForestView make_forest(int width, int height, std::vector<int> parent);

// Translation-invariant single-infinite surrogate: each vertex's parent is up
// with probability p, right otherwise; steps leaving the window mark an exit.
ForestView sample_directed_forest(int width, int height, double p, uint64_t seed);

enum class ComponentKind { Finite, Single, Bi, Multi };

struct ComponentClass {
    ComponentKind kind = ComponentKind::Finite;
    int boundary_paths = 0;  // max vertex-disjoint boundary-reaching paths
    bool undetermined = false;
    std::vector<int> encounter_points;  // removal leaves >= 3 boundary-reaching parts
};

ComponentClass classify_component(const ForestView& f, int component_id);

struct MtEstimate {
    double lhs = 0.0;  // sum_{k=1..margin} f(k)
    double rhs = 0.0;  // core average of sum over roots within distance margin
    int core_size = 0;
};

// f is given by values f(1..margin) (f[k-1] = f(k)).
MtEstimate mt_estimate(const ForestView& f, std::span<const double> f_values, int margin);

// e_n: forest edges inside the centered box of l-infinity radius n that lie on
// a simple in-tree path connecting two box-boundary vertices.
long long count_boundary_path_edges(const ForestView& f, int box_halfwidth);

void write_forest(std::ostream& out, const ForestView& f);
ForestView read_forest(std::istream& in);

struct EstimatorRow {
    double n = 0, value = 0, stderr_ = 0;
    int seeds = 0;
};
void write_estimator_csv(std::ostream& out, std::span<const EstimatorRow> rows);

}  // namespace spinlab

// Coupling disorder and its inspection: sampling, fixed edges, fixed spanning
// trees of slices (the ordered-domination criterion), choking cycles, and the
// site-percolation utilities used by the tree ground-state constructions.
#pragma once

#include "spinlab/graph.hpp"
#include "spinlab/planar.hpp"
#include "spinlab/rng.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace spinlab {

struct CouplingDescriptor {
    enum Kind { Gaussian, UniformSymmetric, ConstantPlusOne, PositiveExponential };
    Kind kind = ConstantPlusOne;
    double param = 1.0;  // sd / half-width / unused / mean

    bool continuous() const { return kind != ConstantPlusOne; }
    static CouplingDescriptor gaussian(double sd = 1.0) { return {Gaussian, sd}; }
    static CouplingDescriptor uniform_symmetric(double hw = 1.0) { return {UniformSymmetric, hw}; }
    static CouplingDescriptor constant_plus_one() { return {ConstantPlusOne, 1.0}; }
    static CouplingDescriptor positive_exponential(double mean = 1.0) {
        return {PositiveExponential, mean};
    }
};

struct Coupling {
    CouplingDescriptor desc;
    uint64_t seed = 0;
    std::vector<double> j;  // per edge, canonical edge order

    double operator[](int e) const { return j[e]; }
    int edge_count() const { return static_cast<int>(j.size()); }
};

// Deterministic in (graph, descriptor, seed); continuous descriptors are
// resampled until all values are pairwise distinct and nonzero.
Coupling sample_couplings(const Graph& g, CouplingDescriptor desc, uint64_t seed);

// H(sigma) = -sum_{<x,y>} J_xy sigma_x sigma_y over the window edges.
double total_energy(const Graph& g, const Coupling& c, const SpinConfig& s);

// |J_xy| > sum of |J| over the other edges at x, or the same at y.
bool is_fixed_edge(const Graph& g, const Coupling& c, int edge);

struct FixedTree {
    std::vector<int> edges;  // spanning tree of the subset, all fixed
    int root = -1;           // last vertex of the certifying order
    bool sufficient_only = false;  // greedy search only (subset above the cap)
};

// Spanning tree of `subset` certified by the ordered-domination criterion:
// for some rooted spanning tree, every non-root vertex's parent edge |J|
// exceeds (sum of |J| over all subset-touching non-tree edges) + (sum of |J|
// over its other tree edges). Exhaustive over trees and roots up to
// `exhaustive_cap` vertices; greedy heaviest-tree otherwise (flagged).
std::optional<FixedTree> find_fixed_spanning_tree(const Graph& g, const Coupling& c,
                                                  std::span<const int> subset,
                                                  int exhaustive_cap = 8);

struct ChokingCycle {
    std::vector<int> cycle;  // vertex cycle surrounding the target
    int edge_count = 0;      // edges on the cycle or incident to its vertices
};

// Smallest-enclosing-first search over axis-aligned rectangular surrounding
// cycles with fewer than `max_edges` on-or-incident edges.
std::optional<ChokingCycle> find_choking_cycle(const PlanarWindow& w, int vertex, int max_edges);

struct PercColoring {
    double p = 0.5;
    uint64_t seed = 0;
    std::vector<uint8_t> black;  // per vertex
};

PercColoring sample_perc_coloring(const Graph& g, double p, uint64_t seed);

// Vertices v such that {v} and its neighbors have a strict black majority.
std::vector<uint8_t> majority_recolor(const Graph& g, const PercColoring& col);

// Sizes of connected components of the predicate-induced subgraph, descending.
std::vector<int> cluster_sizes(const Graph& g, std::span<const uint8_t> member);

// `u v J` lines at full precision, after a reproducibility header.
void write_couplings(std::ostream& out, const Graph& g, const Coupling& c);
Coupling read_couplings(std::istream& in, const Graph& g);

}  // namespace spinlab

// Exact ground-state enumeration on small graphs, K-local ground-state
// verification, unsatisfied-edge forests, frustrated plaquettes, domain
// walls, and the tree ground-state-pair constructions.
#pragma once

#include "spinlab/disorder.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/planar.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace spinlab {

struct GroundStateReport {
    double min_energy = 0.0;
    // minimizers modulo global flip: vertex 0 is pinned +1
    std::vector<SpinConfig> minimizers;
    bool degenerate = false;  // more than one minimizer mod flip
    std::vector<std::vector<int>> unsatisfied;  // per minimizer, edge ids
};

// Exhaustive scan over the 2^(n-1) configurations with vertex 0 pinned +1.
// Energies within 1e-12 of the minimum count as co-minimal.
GroundStateReport enumerate_ground_states(const Graph& g, const Coupling& c,
                                          int budget_vertices = 30);

struct LocalVerdict {
    bool pass = true;
    std::vector<int> witness;  // violating connected subset when !pass
    double witness_boundary_sum = 0.0;
};

// Checks sum_{boundary of C} J sigma sigma >= 0 for every connected subset C
// of size <= K. Vertices with skip[v] != 0 (pinned boundary) are not used.
LocalVerdict verify_local_ground_state(const Graph& g, const Coupling& c, const SpinConfig& s,
                                       int k_max, std::span<const uint8_t> skip = {},
                                       std::size_t subset_budget = 10'000'000);

struct UnsatReport {
    std::vector<int> dual_edges;  // dual ids of unsatisfied interior edges
    bool forest = true;           // acyclic in the dual graph
};

UnsatReport unsatisfied_subgraph(const PlanarWindow& w, const Coupling& c, const SpinConfig& s);

struct FrustrationReport {
    std::vector<int> frustrated_faces;  // negative coupling product
    // every frustrated face keeps >= 1 unsatisfied edge under each of its 16
    // local spin patterns (checked exhaustively)
    bool invariant_holds = true;
};

FrustrationReport plaquette_frustration_check(const PlanarWindow& w, const Coupling& c);

enum class WallClass { ClosedLoop, BoundaryToBoundary, BoundaryToInterior, Interior };

struct DomainWall {
    std::vector<int> dual_edges;  // interior dual edges where edge values differ
    struct Component {
        std::vector<int> dual_edges;
        WallClass cls = WallClass::Interior;
    };
    std::vector<Component> components;
};

// Dual edges whose primal edge value differs between the two configurations
// (equivalently: exactly one endpoint agrees across them), with components
// classified.
DomainWall domain_walls(const PlanarWindow& w, const SpinConfig& a, const SpinConfig& b);

// Flip construction: an edge e with |J_e| < h bridging two boundary-reaching
// components of the |J| >= h subgraph yields the all-satisfied configuration
// with one side of e flipped (exactly e unsatisfied).
std::optional<SpinConfig> construct_tree_flip_gsp(const Graph& tree, const Coupling& c, double h);

// Coin-per-free-edge sampler: edges with |J_e| < eps whose every side-subset
// up to size K has a strict heavy majority (count and summed |J|) on its
// boundary get an independent fair coin for their satisfaction; everything
// else is satisfied. Positive couplings required.
SpinConfig sample_tree_invariant_gsp(const Graph& tree, const Coupling& c, double eps,
                                     uint64_t seed, int k_max);

// J = +1 torus: exactly the two monochromatic configurations minimize.
GroundStateReport check_torus_unique_gsp(const PlanarWindow& w, const Coupling& c);

void write_groundstate_report_json(std::ostream& out, const Graph& g, const GroundStateReport& r);

}  // namespace spinlab

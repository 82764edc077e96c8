// Event-driven zero-temperature Glauber dynamics: per-vertex Poisson clocks
// with per-ring coins, boundary conditions, monotone coupling, and the
// finite-window freezing taxonomy.
#pragma once

#include "spinlab/disorder.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <vector>

namespace spinlab {

struct BoundaryCondition {
    std::vector<uint8_t> pinned;  // empty = no boundary condition
    std::vector<int8_t> value;    // meaningful where pinned

    bool is_pinned(int v) const { return !pinned.empty() && pinned[v]; }
    static BoundaryCondition none() { return {}; }
    static BoundaryCondition pin(int n, std::span<const int> verts, std::span<const int8_t> vals);
    static BoundaryCondition pin_all(int n, std::span<const int> verts, int8_t val);
};

// Per-clock Poisson ring times and per-ring coins, reproducible from the
// seed. The k-th coin belongs to the k-th ring and is drawn whether or not a
// tie consumes it, so two runs sharing the stream see identical randomness.
class EventStream {
  public:
    struct Ring {
        double time;
        int clock;
        int64_t k;  // 1-based ring index at this clock
        int coin;   // in {-1,+1}
    };

    EventStream(uint64_t seed, std::span<const uint64_t> clock_keys, double rate = 1.0);

    Ring next();
    int clock_count() const { return static_cast<int>(streams_.size()); }
    uint64_t seed() const { return seed_; }

    // recomputed-from-seed views, for property checks
    std::vector<double> ring_times(int clock, double horizon) const;
    std::vector<int> coins(int clock, int count) const;

  private:
    uint64_t seed_;
    double rate_;
    std::vector<uint64_t> keys_;
    std::vector<RngStream> streams_;
    std::vector<int64_t> rings_seen_;
    using HeapItem = std::pair<double, int>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
};

struct GlauberOptions {
    bool log_flip_events = true;
    bool energy_trace = true;
    // per-vertex stream keys; defaults to the vertex index. Subgraph runs pass
    // the original ids so restricted streams match the full run's.
    std::vector<uint64_t> clock_keys;
    double tie_eps = 1e-12;
};

struct VertexStats {
    uint64_t flips = 0;
    uint64_t reducing_flips = 0;
    uint64_t rings = 0;
    uint64_t tie_rings = 0;
    double last_flip_time = -1.0;
};

struct FlipEvent {
    double t;
    int v;
    double dh;
};

struct RunRecord {
    double horizon = 0.0;
    uint64_t seed = 0;
    std::vector<FlipEvent> events;  // flips only; every dh <= 0
    std::vector<VertexStats> stats;
    std::vector<std::pair<double, double>> energy_trace;  // (t, H), first entry at t=0
    SpinConfig final_spins;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    uint64_t total_flips = 0;
    uint64_t total_reducing = 0;
};

// Energy change of flipping `vertex`: 2 * sum_{y ~ x} J_xy sigma_x sigma_y.
double delta_h(const Graph& g, const Coupling& c, const SpinConfig& s, int vertex);
// Same, but rejects pinned vertices.
double delta_h(const Graph& g, const Coupling& c, const SpinConfig& s, int vertex,
               const BoundaryCondition& bc);

RunRecord run_glauber(const Graph& g, const Coupling& c, const SpinConfig& sigma0,
                      const BoundaryCondition& bc, double horizon, uint64_t seed,
                      const GlauberOptions& opts = {});

struct MonotonePair {
    RunRecord low, high;
    uint64_t order_violations = 0;  // pointwise-order failures over all event times
};

// Both runs consume the identical EventStream; requires ferromagnetic
// (constant +1) couplings and low <= high pointwise (initial and boundary).
MonotonePair run_coupled_monotone(const Graph& g, const Coupling& c, const SpinConfig& low0,
                                  const SpinConfig& high0, const BoundaryCondition& bc_low,
                                  const BoundaryCondition& bc_high, double horizon, uint64_t seed,
                                  const GlauberOptions& opts = {});

enum class FreezeClass { AllQuiet, AllQuietSliceConstant, Active };

// Finite-horizon heuristic: a vertex is quiet iff it has no flip in the
// trailing window [T(1-f), T].
struct FreezeReport {
    FreezeClass cls = FreezeClass::AllQuiet;
    bool heuristic = true;
    std::vector<int> active;
    std::vector<std::vector<int>> active_components;
};

FreezeReport classify_freezing(const Graph& g, const RunRecord& rec, double trailing_fraction);

// Estimate: initializes `subset` monochromatic (both signs tried across
// trials), randomizes the rest, and reports whether no subset vertex ever
// flips in any trial.
bool is_psf_estimate(const Graph& g, const Coupling& c, std::span<const int> subset, int trials,
                     double horizon, uint64_t seed);

// True iff all vertices have >= d+1 more neighbors of one common sign than of
// the other (the strongly-freezing slice event).
bool strongly_freezing_event(const Graph& g, const SpinConfig& s, int d);

// CSV: vertex,flips,energy_reducing_flips,last_flip_time,final_spin
void write_run_counters_csv(std::ostream& out, const RunRecord& rec);
// CSV: time,vertex,energy_delta
void write_run_events_csv(std::ostream& out, const RunRecord& rec);
// JSON: classification, energy endpoints, seed, horizon
void write_run_summary_json(std::ostream& out, const Graph& g, const RunRecord& rec,
                            double trailing_fraction);

}  // namespace spinlab

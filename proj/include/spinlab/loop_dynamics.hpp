// Loop dynamics on a planar window: proper frequency schedules satisfying the
// well-definedness and decay conditions, clock-driven loop flips with per-ring
// coins, dependency clusters, per-type energy accounting, and perturbation
// margins.
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

struct ScheduleChecks {
    double sum_nfs = 0.0;   // sum over types of n_[gamma] f_[gamma] S_[gamma]
    bool decay_ok = true;   // per-edge tail bound sum_{loops >= l} f < e^(-c l)
    int violated_l = -1;    // witness length when the decay bound fails
    int violated_dual_edge = -1;
    double worst_margin = 0.0;  // min over (edge,l) of e^(-c l) - tail sum
};

struct FrequencySchedule {
    double c = 10.0;
    int l_max = 0;
    std::vector<double> rate_by_type;  // proper: constant on each type
    ScheduleChecks checks;

    double rate_of_loop(const LoopEnsemble& ens, int loop) const {
        return rate_by_type[ens.type_of[loop]];
    }
};

// Default rule f_[gamma] = e^(-c l) / (n_[gamma] S_[gamma] count_of_length(l)).
// Requires c >= 10; both numeric invariant checks run and must pass.
FrequencySchedule make_frequency_schedule(const LoopEnsemble& ens, double c);

// Numeric checks for an arbitrary (user-supplied) proper rate table.
ScheduleChecks validate_schedule(const LoopEnsemble& ens, std::span<const double> rate_by_type,
                                 double c);

// H^gamma = -sum over primal edges dual to the loop's edges of J sigma sigma.
double loop_hamiltonian(const PlanarWindow& w, const Coupling& c, const DualLoop& loop,
                        const SpinConfig& s);

enum class LoopAction : int8_t { None = 0, Flip = 1, CoinFlip = 2, CoinStay = 3 };

struct LoopEvent {
    double t;
    int loop;
    double h;  // H^gamma evaluated at the ring
    LoopAction action;
};

struct LoopRunRecord {
    double horizon = 0.0;
    uint64_t seed = 0;
    int l_max = 0;
    std::vector<LoopEvent> events;  // every ring, including no-ops
    std::vector<uint64_t> rings_per_loop;
    std::vector<uint64_t> flips_per_vertex;
    // per type: cumulative energy change from its executed flips, sampled at
    // each of its events
    std::vector<std::vector<std::pair<double, double>>> energy_by_type;
    SpinConfig final_spins;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double bookkeeping_error = 0.0;  // |running H - recomputed H| at the end
    // positive-loop fraction sampled at checkpoints (monitored observable)
    std::vector<std::pair<double, double>> positive_fraction_trace;
};

struct LoopRunOptions {
    double tie_eps = 1e-12;
    int positive_fraction_checkpoints = 8;
};

LoopRunRecord run_loop_dynamics(const PlanarWindow& w, const LoopEnsemble& ens,
                                const FrequencySchedule& sched, const Coupling& c,
                                const SpinConfig& sigma0, double horizon, uint64_t seed,
                                const LoopRunOptions& opts = {});

struct DependencyCluster {
    std::vector<int> vertices;
    bool budget_ok = false;   // tau * sum n f S < 1
    double budget = 0.0;      // tau * sum n f S
};

// Smallest vertex set containing `vertex` and closed under: v in the set and
// a loop containing v (v inside gamma) rings before tau => V_gamma joins the
// set. Ring draws are the same thinned process the engine uses.
DependencyCluster dependency_cluster(const PlanarWindow& w, const LoopEnsemble& ens,
                                     const FrequencySchedule& sched, double tau, uint64_t seed,
                                     int vertex);

// Cumulative energy change over executed energy-reducing flips of the type.
std::vector<std::pair<double, double>> energy_accounting(const LoopRunRecord& rec, int type);

// epsilon = min |H^gamma| over evaluated loop-Hamiltonians whose crossed
// edges include `edge`; +infinity when the edge never sat on a rung loop.
double perturbation_margin(const LoopRunRecord& rec, const LoopEnsemble& ens, int edge);

// (time, loop, action) triples for replay comparison.
std::vector<std::tuple<double, int, int>> flip_sequence(const LoopRunRecord& rec);

// CSV: time,loop_canonical_id,H_value,action
void write_loop_events_csv(std::ostream& out, const LoopRunRecord& rec);
// CSV: type_key,time,cumulative_energy_change
void write_type_energy_csv(std::ostream& out, const LoopEnsemble& ens, const LoopRunRecord& rec);
// JSON: terminal local-ground-state flag, loop-scan residual count, cap, seed
void write_loop_summary_json(std::ostream& out, const PlanarWindow& w, const LoopEnsemble& ens,
                             const Coupling& c, const LoopRunRecord& rec);

}  // namespace spinlab

#include "spinlab/loop_dynamics.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace spinlab {

namespace {

ScheduleChecks run_checks(const LoopEnsemble& ens, std::span<const double> rate_by_type,
                          double c) {
    ScheduleChecks checks;
    for (size_t t = 0; t < ens.types.size(); ++t)
        checks.sum_nfs +=
            double(ens.types[t].members_at_origin) * rate_by_type[t] * ens.types[t].span;

    checks.worst_margin = std::numeric_limits<double>::infinity();
    const int l_max = ens.max_length;
    for (size_t d = 0; d < ens.loops_on_dual_edge.size(); ++d) {
        const auto& through = ens.loops_on_dual_edge[d];
        if (through.empty()) continue;
        for (int l = 1; l <= l_max; ++l) {
            double tail = 0.0;
            for (int li : through)
                if (ens.loops[li].length() >= l) tail += rate_by_type[ens.type_of[li]];
            const double bound = std::exp(-c * l);
            const double margin = bound - tail;
            if (margin < checks.worst_margin) checks.worst_margin = margin;
            if (tail >= bound && checks.violated_l < 0) {
                checks.decay_ok = false;
                checks.violated_l = l;
                checks.violated_dual_edge = static_cast<int>(d);
            }
        }
    }
    return checks;
}

}  // namespace

ScheduleChecks validate_schedule(const LoopEnsemble& ens, std::span<const double> rate_by_type,
                                 double c) {
    if (rate_by_type.size() != ens.types.size())
        throw std::invalid_argument("validate_schedule: one rate per type required");
    for (double r : rate_by_type)
        if (!(r >= 0)) throw std::invalid_argument("validate_schedule: rates must be >= 0");
    return run_checks(ens, rate_by_type, c);
}

FrequencySchedule make_frequency_schedule(const LoopEnsemble& ens, double c) {
    if (!(c >= 10.0))
        throw std::invalid_argument("make_frequency_schedule: decay constant c >= 10 required");
    FrequencySchedule sched;
    sched.c = c;
    sched.l_max = ens.max_length;
    sched.rate_by_type.resize(ens.types.size());
    for (size_t t = 0; t < ens.types.size(); ++t) {
        const auto& ty = ens.types[t];
        sched.rate_by_type[t] = std::exp(-c * ty.length) /
                                (double(ty.members_at_origin) * ty.span *
                                 ens.count_of_length(ty.length));
    }
    sched.checks = run_checks(ens, sched.rate_by_type, c);
    if (!sched.checks.decay_ok || !std::isfinite(sched.checks.sum_nfs))
        throw std::runtime_error("make_frequency_schedule: invariant checks failed");
    return sched;
}

double loop_hamiltonian(const PlanarWindow& w, const Coupling& c, const DualLoop& loop,
                        const SpinConfig& s) {
    for (int cell : loop.cells)
        if (!w.is_cell(cell))
            throw std::invalid_argument("loop_hamiltonian: boundary-touching loop");
    double h = 0.0;
    for (int e : loop.crossed_primal_edges)
        h -= c[e] * s[w.graph.edges[e].u] * s[w.graph.edges[e].v];
    return h;
}

namespace {

// Per-loop coin streams: the k-th coin belongs to the k-th ring; draws are
// lazy but indexed, so consumption order cannot shift outcomes.
struct LoopCoins {
    uint64_t seed;
    std::map<int, std::pair<RngStream, int64_t>> streams;  // loop -> (rng, produced)

    explicit LoopCoins(uint64_t s) : seed(s) {}

    int coin_at(int loop, int64_t k) {
        auto it = streams.find(loop);
        if (it == streams.end())
            it = streams
                     .insert({loop, {RngStream(purpose_seed(seed, Purpose::Coins,
                                                            static_cast<uint64_t>(loop))),
                                     0}})
                     .first;
        auto& [rng, produced] = it->second;
        int coin = 0;
        while (produced < k) {
            coin = rng.coin_pm1();
            ++produced;
        }
        if (produced != k) throw std::logic_error("loop coins consumed out of order");
        return coin;
    }
};

// Thinned ring generator: one Poisson clock at the aggregate rate, rings
// attributed to loops proportionally to their rates. Exact for finite sets.
struct RingGenerator {
    RngStream rng;
    double total_rate = 0.0;
    std::vector<double> prefix;  // cumulative rates by loop index
    double t = 0.0;

    RingGenerator(const LoopEnsemble& ens, const FrequencySchedule& sched, uint64_t seed)
        : rng(purpose_seed(seed, Purpose::Clocks)) {
        prefix.resize(ens.loops.size());
        for (size_t i = 0; i < ens.loops.size(); ++i) {
            total_rate += sched.rate_of_loop(ens, static_cast<int>(i));
            prefix[i] = total_rate;
        }
    }

    std::pair<double, int> next() {
        if (total_rate <= 0.0) return {std::numeric_limits<double>::infinity(), -1};
        t += rng.exponential(total_rate);
        const double u = rng.uniform01() * total_rate;
        const int loop =
            static_cast<int>(std::upper_bound(prefix.begin(), prefix.end(), u) - prefix.begin());
        return {t, std::min(loop, static_cast<int>(prefix.size()) - 1)};
    }
};

}  // namespace

LoopRunRecord run_loop_dynamics(const PlanarWindow& w, const LoopEnsemble& ens,
                                const FrequencySchedule& sched, const Coupling& c,
                                const SpinConfig& sigma0, double horizon, uint64_t seed,
                                const LoopRunOptions& opts) {
    if (!(horizon > 0)) throw std::invalid_argument("run_loop_dynamics: horizon > 0 required");
    if (static_cast<int>(sigma0.size()) != w.graph.n)
        throw std::invalid_argument("run_loop_dynamics: sigma0 size mismatch");
    const bool continuous = c.desc.continuous();

    LoopRunRecord rec;
    rec.horizon = horizon;
    rec.seed = seed;
    rec.l_max = ens.max_length;
    rec.rings_per_loop.assign(ens.loops.size(), 0);
    rec.flips_per_vertex.assign(w.graph.n, 0);
    rec.energy_by_type.assign(ens.types.size(), {});
    SpinConfig s = sigma0;
    double h_total = total_energy(w.graph, c, s);
    rec.initial_energy = h_total;
    std::vector<double> cum_by_type(ens.types.size(), 0.0);

    RingGenerator gen(ens, sched, seed);
    LoopCoins coins(seed);

    const int n_checks = std::max(opts.positive_fraction_checkpoints, 0);
    int next_check = 0;
    auto positive_fraction = [&]() {
        if (ens.loops.empty()) return 0.0;
        int pos = 0;
        for (const auto& loop : ens.loops)
            if (loop_hamiltonian(w, c, loop, s) > 0) ++pos;
        return double(pos) / ens.loops.size();
    };
    auto sample_checkpoints_until = [&](double t) {
        while (next_check < n_checks) {
            const double ct = horizon * double(next_check + 1) / n_checks;
            if (ct > t) break;
            rec.positive_fraction_trace.push_back({ct, positive_fraction()});
            ++next_check;
        }
    };

    for (;;) {
        const auto [t, loop] = gen.next();
        if (!(t <= horizon)) break;
        sample_checkpoints_until(t);
        const int64_t k = static_cast<int64_t>(++rec.rings_per_loop[loop]);
        const double h = loop_hamiltonian(w, c, ens.loops[loop], s);
        LoopAction action = LoopAction::None;
        if (continuous && std::abs(h) < opts.tie_eps)
            throw std::runtime_error(
                "run_loop_dynamics: |H^gamma| below tie tolerance with continuous couplings "
                "(degenerate coupling instance)");
        bool flip = false;
        if (h > 0) {
            flip = true;
            action = LoopAction::Flip;
        } else if (!continuous && h == 0.0) {
            flip = coins.coin_at(loop, k) > 0;
            action = flip ? LoopAction::CoinFlip : LoopAction::CoinStay;
        }
        if (flip) {
            for (int cell : ens.loops[loop].cells) {
                s[cell] = static_cast<int8_t>(-s[cell]);
                ++rec.flips_per_vertex[cell];
            }
            h_total -= 2.0 * h;
            const int type = ens.type_of[loop];
            cum_by_type[type] -= 2.0 * h;
            rec.energy_by_type[type].push_back({t, cum_by_type[type]});
        }
        rec.events.push_back({t, loop, h, action});
        if (h_total > rec.initial_energy + 1e-9)
            throw std::logic_error("run_loop_dynamics: total energy increased");
    }
    sample_checkpoints_until(horizon);
    rec.final_spins = std::move(s);
    rec.final_energy = h_total;
    rec.bookkeeping_error = std::abs(total_energy(w.graph, c, rec.final_spins) - h_total);
    const double scale = std::max(1.0, std::abs(rec.final_energy));
    if (rec.bookkeeping_error > 1e-9 * scale)
        throw std::logic_error("run_loop_dynamics: energy bookkeeping drifted");
    return rec;
}

DependencyCluster dependency_cluster(const PlanarWindow& w, const LoopEnsemble& ens,
                                     const FrequencySchedule& sched, double tau, uint64_t seed,
                                     int vertex) {
    if (!(tau > 0)) throw std::invalid_argument("dependency_cluster: tau > 0 required");
    DependencyCluster out;
    out.budget = tau * sched.checks.sum_nfs;
    out.budget_ok = out.budget < 1.0;

    // loops that ring before tau, from the same thinned generator
    std::vector<uint8_t> rang(ens.loops.size(), 0);
    RingGenerator gen(ens, sched, seed);
    for (;;) {
        const auto [t, loop] = gen.next();
        if (!(t < tau)) break;
        rang[loop] = 1;
    }

    std::vector<uint8_t> in_d(w.graph.n, 0);
    in_d[vertex] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t li = 0; li < ens.loops.size(); ++li) {
            if (!rang[li]) continue;
            const auto& loop = ens.loops[li];
            bool touches = false;
            for (int cell : loop.cells)
                if (in_d[cell]) touches = true;
            if (!touches) continue;
            for (int v : loop.vgamma)
                if (!in_d[v]) {
                    in_d[v] = 1;
                    grew = true;
                }
        }
    }
    for (int v = 0; v < w.graph.n; ++v)
        if (in_d[v]) out.vertices.push_back(v);
    return out;
}

std::vector<std::pair<double, double>> energy_accounting(const LoopRunRecord& rec, int type) {
    if (type < 0 || type >= static_cast<int>(rec.energy_by_type.size()))
        throw std::invalid_argument("energy_accounting: unknown type");
    return rec.energy_by_type[type];
}

double perturbation_margin(const LoopRunRecord& rec, const LoopEnsemble& ens, int edge) {
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& ev : rec.events) {
        const auto& crossed = ens.loops[ev.loop].crossed_primal_edges;
        if (!std::binary_search(crossed.begin(), crossed.end(), edge)) continue;
        eps = std::min(eps, std::abs(ev.h));
    }
    return eps;
}

std::vector<std::tuple<double, int, int>> flip_sequence(const LoopRunRecord& rec) {
    std::vector<std::tuple<double, int, int>> out;
    for (const auto& ev : rec.events)
        if (ev.action == LoopAction::Flip || ev.action == LoopAction::CoinFlip)
            out.push_back({ev.t, ev.loop, static_cast<int>(ev.action)});
    return out;
}

void write_loop_events_csv(std::ostream& out, const LoopRunRecord& rec) {
    out << "time,loop_canonical_id,H_value,action\n";
    for (const auto& ev : rec.events) {
        const char* a = ev.action == LoopAction::Flip       ? "flip"
                        : ev.action == LoopAction::CoinFlip ? "coin-flip"
                        : ev.action == LoopAction::CoinStay ? "coin-stay"
                                                            : "none";
        out << ev.t << ',' << ev.loop << ',' << ev.h << ',' << a << '\n';
    }
}

void write_type_energy_csv(std::ostream& out, const LoopEnsemble& ens, const LoopRunRecord& rec) {
    out << "type_key,time,cumulative_energy_change\n";
    for (size_t t = 0; t < rec.energy_by_type.size(); ++t)
        for (const auto& [time, cum] : rec.energy_by_type[t])
            out << ens.types[t].key << ',' << time << ',' << cum << '\n';
}

void write_loop_summary_json(std::ostream& out, const PlanarWindow& w, const LoopEnsemble& ens,
                             const Coupling& c, const LoopRunRecord& rec) {
    int residual = 0;
    for (const auto& loop : ens.loops)
        if (loop_hamiltonian(w, c, loop, rec.final_spins) > 0) ++residual;
    nlohmann::json j;
    j["l_max"] = rec.l_max;
    j["loop_count"] = ens.loops.size();
    j["terminal_is_lmax_local_ground_state"] = residual == 0;
    j["loop_scan_residual_count"] = residual;
    j["initial_energy"] = rec.initial_energy;
    j["final_energy"] = rec.final_energy;
    j["bookkeeping_error"] = rec.bookkeeping_error;
    j["seed"] = rec.seed;
    j["horizon"] = rec.horizon;
    out << j.dump(2) << '\n';
}

}  // namespace spinlab

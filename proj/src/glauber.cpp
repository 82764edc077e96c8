#include "spinlab/glauber.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace spinlab {

BoundaryCondition BoundaryCondition::pin(int n, std::span<const int> verts,
                                         std::span<const int8_t> vals) {
    if (verts.size() != vals.size())
        throw std::invalid_argument("BoundaryCondition::pin: size mismatch");
    BoundaryCondition bc;
    bc.pinned.assign(n, 0);
    bc.value.assign(n, 0);
    for (size_t i = 0; i < verts.size(); ++i) {
        bc.pinned[verts[i]] = 1;
        bc.value[verts[i]] = vals[i];
    }
    return bc;
}

BoundaryCondition BoundaryCondition::pin_all(int n, std::span<const int> verts, int8_t val) {
    std::vector<int8_t> vals(verts.size(), val);
    return pin(n, verts, vals);
}

EventStream::EventStream(uint64_t seed, std::span<const uint64_t> clock_keys, double rate)
    : seed_(seed), rate_(rate), keys_(clock_keys.begin(), clock_keys.end()) {
    streams_.reserve(keys_.size());
    rings_seen_.assign(keys_.size(), 0);
    for (size_t i = 0; i < keys_.size(); ++i) {
        streams_.emplace_back(purpose_seed(seed_, Purpose::Clocks, keys_[i]));
        heap_.push({streams_.back().exponential(rate_), static_cast<int>(i)});
    }
}

EventStream::Ring EventStream::next() {
    const auto [t, clock] = heap_.top();
    heap_.pop();
    const int coin = streams_[clock].coin_pm1();  // the k-th coin, drawn at the k-th ring
    const int64_t k = ++rings_seen_[clock];
    heap_.push({t + streams_[clock].exponential(rate_), clock});
    return {t, clock, k, coin};
}

std::vector<double> EventStream::ring_times(int clock, double horizon) const {
    RngStream rng(purpose_seed(seed_, Purpose::Clocks, keys_[clock]));
    std::vector<double> out;
    double t = 0;
    for (;;) {
        t += rng.exponential(rate_);
        if (t > horizon) break;
        out.push_back(t);
        rng.coin_pm1();  // the ring's coin sits between the increments
    }
    return out;
}

std::vector<int> EventStream::coins(int clock, int count) const {
    RngStream rng(purpose_seed(seed_, Purpose::Clocks, keys_[clock]));
    std::vector<int> out;
    for (int k = 0; k < count; ++k) {
        rng.exponential(rate_);
        out.push_back(rng.coin_pm1());
    }
    return out;
}

double delta_h(const Graph& g, const Coupling& c, const SpinConfig& s, int vertex) {
    double sum = 0.0;
    for (const auto& [nb, e] : g.adj[vertex]) sum += c[e] * s[vertex] * s[nb];
    return 2.0 * sum;
}

double delta_h(const Graph& g, const Coupling& c, const SpinConfig& s, int vertex,
               const BoundaryCondition& bc) {
    if (bc.is_pinned(vertex)) throw std::invalid_argument("delta_h: vertex is pinned");
    return delta_h(g, c, s, vertex);
}

namespace {

// Flip decision at a ring. Ties resolve by setting the spin to the coin
// value (equivalent in law to flipping on heads, and the version for which
// the dynamics is monotone in both the initial spins and the coins).
bool flip_decision(double dh, int coin, int8_t sigma_v, bool continuous, double tie_eps) {
    if (continuous) {
        if (std::abs(dh) < tie_eps)
            throw std::runtime_error(
                "glauber: |dH| below tie tolerance with continuous couplings "
                "(degenerate coupling instance)");
        return dh < 0.0;
    }
    if (dh < 0.0) return true;
    if (dh == 0.0) return coin != sigma_v;
    return false;
}

std::vector<uint64_t> default_keys(int n, const GlauberOptions& opts) {
    if (!opts.clock_keys.empty()) {
        if (static_cast<int>(opts.clock_keys.size()) != n)
            throw std::invalid_argument("glauber: clock_keys size mismatch");
        return opts.clock_keys;
    }
    std::vector<uint64_t> keys(n);
    for (int v = 0; v < n; ++v) keys[v] = static_cast<uint64_t>(v);
    return keys;
}

double abs_j_sum(const Coupling& c) {
    double s = 0;
    for (int e = 0; e < c.edge_count(); ++e) s += std::abs(c[e]);
    return s;
}

SpinConfig apply_bc(SpinConfig s, const BoundaryCondition& bc) {
    if (!bc.pinned.empty())
        for (size_t v = 0; v < s.size(); ++v)
            if (bc.pinned[v]) s[v] = bc.value[v];
    return s;
}

}  // namespace

RunRecord run_glauber(const Graph& g, const Coupling& c, const SpinConfig& sigma0,
                      const BoundaryCondition& bc, double horizon, uint64_t seed,
                      const GlauberOptions& opts) {
    if (!(horizon > 0)) throw std::invalid_argument("run_glauber: horizon > 0 required");
    if (static_cast<int>(sigma0.size()) != g.n)
        throw std::invalid_argument("run_glauber: sigma0 size mismatch");
    const bool continuous = c.desc.continuous();

    RunRecord rec;
    rec.horizon = horizon;
    rec.seed = seed;
    rec.stats.assign(g.n, {});
    SpinConfig s = apply_bc(sigma0, bc);
    double h = total_energy(g, c, s);
    rec.initial_energy = h;
    if (opts.energy_trace) rec.energy_trace.push_back({0.0, h});

    // clocks only for unpinned vertices
    std::vector<int> active;
    for (int v = 0; v < g.n; ++v)
        if (!bc.is_pinned(v)) active.push_back(v);
    const auto keys_all = default_keys(g.n, opts);
    std::vector<uint64_t> keys;
    for (int v : active) keys.push_back(keys_all[v]);
    EventStream stream(seed, keys);

    for (;;) {
        const auto ring = stream.next();
        if (ring.time > horizon) break;
        const int v = active[ring.clock];
        auto& st = rec.stats[v];
        ++st.rings;
        const double dh = delta_h(g, c, s, v);
        const bool tie = !continuous && dh == 0.0;
        if (tie) ++st.tie_rings;
        if (!flip_decision(dh, ring.coin, s[v], continuous, opts.tie_eps)) continue;
        s[v] = static_cast<int8_t>(-s[v]);
        h += dh;
        ++st.flips;
        st.last_flip_time = ring.time;
        ++rec.total_flips;
        if (dh < 0.0) {
            ++st.reducing_flips;
            ++rec.total_reducing;
        }
        if (opts.log_flip_events) rec.events.push_back({ring.time, v, dh});
        if (opts.energy_trace) rec.energy_trace.push_back({ring.time, h});
    }
    rec.final_spins = std::move(s);
    rec.final_energy = h;

    // finite-graph bound: energy-reducing flips cannot exceed the energy span
    // over the minimal reduction (2 for constant couplings)
    const double span = 2.0 * abs_j_sum(c);
    if (!continuous && rec.total_reducing > static_cast<uint64_t>(span / 2.0 + 1e-9))
        throw std::logic_error("run_glauber: energy-reducing flip bound violated");
    if (rec.final_energy > rec.initial_energy + 1e-9)
        throw std::logic_error("run_glauber: energy increased");
    return rec;
}

MonotonePair run_coupled_monotone(const Graph& g, const Coupling& c, const SpinConfig& low0,
                                  const SpinConfig& high0, const BoundaryCondition& bc_low,
                                  const BoundaryCondition& bc_high, double horizon, uint64_t seed,
                                  const GlauberOptions& opts) {
    if (c.desc.kind != CouplingDescriptor::ConstantPlusOne)
        throw std::invalid_argument("run_coupled_monotone: ferromagnetic (+1) couplings required");
    if (bc_low.pinned != bc_high.pinned)
        throw std::invalid_argument("run_coupled_monotone: boundary sets must coincide");
    SpinConfig lo = apply_bc(low0, bc_low), hi = apply_bc(high0, bc_high);
    for (int v = 0; v < g.n; ++v)
        if (lo[v] > hi[v])
            throw std::invalid_argument("run_coupled_monotone: low <= high required pointwise");

    MonotonePair out;
    for (RunRecord* r : {&out.low, &out.high}) {
        r->horizon = horizon;
        r->seed = seed;
        r->stats.assign(g.n, {});
    }
    out.low.initial_energy = total_energy(g, c, lo);
    out.high.initial_energy = total_energy(g, c, hi);
    double hlo = out.low.initial_energy, hhi = out.high.initial_energy;
    if (opts.energy_trace) {
        out.low.energy_trace.push_back({0.0, hlo});
        out.high.energy_trace.push_back({0.0, hhi});
    }

    std::vector<int> active;
    for (int v = 0; v < g.n; ++v)
        if (!bc_low.is_pinned(v)) active.push_back(v);
    const auto keys_all = default_keys(g.n, opts);
    std::vector<uint64_t> keys;
    for (int v : active) keys.push_back(keys_all[v]);
    EventStream stream(seed, keys);  // the one shared stream

    for (;;) {
        const auto ring = stream.next();
        if (ring.time > horizon) break;
        const int v = active[ring.clock];
        // process both configurations on the same ring and coin
        auto step = [&](SpinConfig& s, double& h, RunRecord& rec) {
            auto& st = rec.stats[v];
            ++st.rings;
            const double dh = delta_h(g, c, s, v);
            if (dh == 0.0) ++st.tie_rings;
            if (!flip_decision(dh, ring.coin, s[v], false, opts.tie_eps)) return;
            s[v] = static_cast<int8_t>(-s[v]);
            h += dh;
            ++st.flips;
            st.last_flip_time = ring.time;
            ++rec.total_flips;
            if (dh < 0.0) {
                ++st.reducing_flips;
                ++rec.total_reducing;
            }
            if (opts.log_flip_events) rec.events.push_back({ring.time, v, dh});
            if (opts.energy_trace) rec.energy_trace.push_back({ring.time, h});
        };
        step(lo, hlo, out.low);
        step(hi, hhi, out.high);
        for (int u = 0; u < g.n; ++u)
            if (lo[u] > hi[u]) ++out.order_violations;
    }
    out.low.final_spins = std::move(lo);
    out.high.final_spins = std::move(hi);
    out.low.final_energy = hlo;
    out.high.final_energy = hhi;
    return out;
}

FreezeReport classify_freezing(const Graph& g, const RunRecord& rec, double trailing_fraction) {
    if (!(trailing_fraction > 0 && trailing_fraction < 1))
        throw std::invalid_argument("classify_freezing: trailing fraction in (0,1) required");
    const double cutoff = rec.horizon * (1.0 - trailing_fraction);
    FreezeReport rep;
    std::vector<uint8_t> active_mask(g.n, 0);
    for (int v = 0; v < g.n; ++v)
        if (rec.stats[v].last_flip_time > cutoff) {
            active_mask[v] = 1;
            rep.active.push_back(v);
        }
    if (rep.active.empty()) {
        rep.cls = FreezeClass::AllQuiet;
        if (g.has_levels()) {
            bool slice_constant = true;
            for (const auto& e : g.edges)
                if (g.level[e.u] == g.level[e.v] &&
                    rec.final_spins[e.u] != rec.final_spins[e.v])
                    slice_constant = false;
            // in-slice edges only witness connected slices; check directly
            std::map<int, int8_t> slice_sign;
            for (int v = 0; v < g.n; ++v) {
                auto [it, fresh] = slice_sign.insert({g.level[v], rec.final_spins[v]});
                if (!fresh && it->second != rec.final_spins[v]) slice_constant = false;
            }
            if (slice_constant) rep.cls = FreezeClass::AllQuietSliceConstant;
        }
    } else {
        rep.cls = FreezeClass::Active;
        rep.active_components = induced_components(g, active_mask);
    }
    return rep;
}

bool is_psf_estimate(const Graph& g, const Coupling& c, std::span<const int> subset, int trials,
                     double horizon, uint64_t seed) {
    if (subset.empty()) throw std::invalid_argument("is_psf_estimate: empty subset");
    std::vector<uint8_t> in_subset(g.n, 0);
    for (int v : subset) in_subset[v] = 1;
    for (int trial = 0; trial < trials; ++trial) {
        const int8_t sign = trial % 2 == 0 ? +1 : -1;
        const uint64_t rs = replica_seed(seed, static_cast<uint64_t>(trial));
        RngStream init(purpose_seed(rs, Purpose::InitSpins));
        SpinConfig s(g.n);
        for (int v = 0; v < g.n; ++v)
            s[v] = in_subset[v] ? sign : static_cast<int8_t>(init.coin_pm1());
        GlauberOptions opts;
        opts.log_flip_events = false;
        opts.energy_trace = false;
        auto rec = run_glauber(g, c, s, BoundaryCondition::none(), horizon, rs, opts);
        for (int v : subset)
            if (rec.stats[v].flips > 0) return false;
    }
    return true;
}

bool strongly_freezing_event(const Graph& g, const SpinConfig& s, int d) {
    for (int sign : {+1, -1}) {
        bool all = true;
        for (int v = 0; v < g.n && all; ++v) {
            int bal = 0;
            for (const auto& [nb, e] : g.adj[v]) {
                (void)e;
                bal += s[nb] == sign ? 1 : -1;
            }
            if (bal < d + 1) all = false;
        }
        if (all) return true;
    }
    return false;
}

void write_run_counters_csv(std::ostream& out, const RunRecord& rec) {
    out << "vertex,flips,energy_reducing_flips,last_flip_time,final_spin\n";
    for (size_t v = 0; v < rec.stats.size(); ++v) {
        const auto& st = rec.stats[v];
        out << v << ',' << st.flips << ',' << st.reducing_flips << ',' << st.last_flip_time << ','
            << int(rec.final_spins[v]) << '\n';
    }
}

void write_run_events_csv(std::ostream& out, const RunRecord& rec) {
    out << "time,vertex,energy_delta\n";
    for (const auto& ev : rec.events) out << ev.t << ',' << ev.v << ',' << ev.dh << '\n';
}

void write_run_summary_json(std::ostream& out, const Graph& g, const RunRecord& rec,
                            double trailing_fraction) {
    auto rep = classify_freezing(g, rec, trailing_fraction);
    nlohmann::json j;
    j["classification"] = rep.cls == FreezeClass::AllQuiet                ? "all-quiet"
                          : rep.cls == FreezeClass::AllQuietSliceConstant ? "all-quiet-slice-constant"
                                                                          : "active";
    j["classification_is_heuristic"] = true;
    j["trailing_fraction"] = trailing_fraction;
    j["active_vertices"] = rep.active;
    j["initial_energy"] = rec.initial_energy;
    j["final_energy"] = rec.final_energy;
    j["total_flips"] = rec.total_flips;
    j["energy_reducing_flips"] = rec.total_reducing;
    j["seed"] = rec.seed;
    j["horizon"] = rec.horizon;
    out << j.dump(2) << '\n';
}

}  // namespace spinlab

#include "spinlab/experiments.hpp"

#include "spinlab/disorder.hpp"
#include "spinlab/geometry.hpp"
#include "spinlab/glauber.hpp"
#include "spinlab/graph.hpp"
#include "spinlab/groundstate.hpp"
#include "spinlab/loop_dynamics.hpp"
#include "spinlab/planar.hpp"
#include "spinlab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace spinlab {

namespace {

struct Params {
    uint64_t master = 0;
    int replicas = 0;
    double horizon = 0;
    int jobs = 1;
};

// deterministic replica map: results are indexed, aggregation is sequential
template <typename Fn>
void replica_map(int replicas, int jobs, Fn&& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int r = 0; r < replicas; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= replicas) return;
                fn(r);
            }
        });
    for (auto& th : pool) th.join();
}

SpinConfig random_spins(int n, uint64_t seed) {
    RngStream rng(purpose_seed(seed, Purpose::InitSpins));
    SpinConfig s(n);
    for (auto& x : s) x = static_cast<int8_t>(rng.coin_pm1());
    return s;
}

void check(ExperimentResult& res, bool ok, const std::string& what) {
    if (!ok) res.failures.push_back(what);
}

std::string csv_of_rows(const std::string& header,
                        const std::vector<std::string>& rows) {
    std::string out = header + "\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
}

// the non-freezing example: shared-clique-pair cylinder over [-2..2] with the
// five-slice initial configuration
struct CliqueCylinderExample {
    Graph g;
    SpinConfig sigma0;
    int shared = -1;

    explicit CliqueCylinderExample(int n = 4) {
        auto pair = build_shared_clique_pair(n);
        g = build_cylinder(pair, -2, 2);
        sigma0.assign(g.n, 0);
        for (int v = 0; v < g.n; ++v) {
            if (g.level[v] < 0) sigma0[v] = -1;
            else if (g.level[v] > 0) sigma0[v] = +1;
            else sigma0[v] = g.slice_pos[v] < n ? -1 : +1;
            if (g.level[v] == 0 && g.slice_pos[v] == pair.special_vertex) shared = v;
        }
    }
};

// ---------------------------------------------------------------------------
// 1. nonfreezing-cylinder
// ---------------------------------------------------------------------------
ExperimentResult exp_nonfreezing_cylinder(const Params& p) {
    ExperimentResult res;
    CliqueCylinderExample ex;
    auto c = sample_couplings(ex.g, CouplingDescriptor::constant_plus_one(), 0);
    std::vector<uint64_t> shared_flips(p.replicas, 0);
    std::vector<uint8_t> ok_frozen(p.replicas, 0), ok_ties(p.replicas, 0);
    GlauberOptions opts;
    opts.log_flip_events = false;
    opts.energy_trace = false;
    replica_map(p.replicas, p.jobs, [&](int r) {
        const uint64_t rs = replica_seed(p.master, r);
        auto rec = run_glauber(ex.g, c, ex.sigma0, BoundaryCondition::none(), p.horizon, rs, opts);
        bool frozen = true;
        for (int v = 0; v < ex.g.n; ++v)
            if (v != ex.shared && rec.stats[v].flips > 0) frozen = false;
        ok_frozen[r] = frozen;
        ok_ties[r] = rec.stats[ex.shared].tie_rings == rec.stats[ex.shared].rings;
        shared_flips[r] = rec.stats[ex.shared].flips;
    });
    double mean = 0;
    std::vector<std::string> rows;
    for (int r = 0; r < p.replicas; ++r) {
        mean += double(shared_flips[r]);
        check(res, ok_frozen[r], "non-shared vertex flipped in replica " + std::to_string(r));
        check(res, ok_ties[r], "shared vertex saw a non-tie ring in replica " + std::to_string(r));
        rows.push_back(std::to_string(r) + "," + std::to_string(shared_flips[r]));
    }
    mean /= p.replicas;
    check(res, mean >= 40.0 && mean <= 60.0, "mean shared-vertex flips outside [40,60]");
    res.summary["mean_shared_vertex_flips"] = mean;
    res.summary["replicas"] = p.replicas;
    res.summary["horizon"] = p.horizon;
    res.artifacts["runs.csv"] = csv_of_rows("replica,shared_vertex_flips", rows);
    return res;
}

// ---------------------------------------------------------------------------
// 2. evenTree-tie
// ---------------------------------------------------------------------------
ExperimentResult exp_even_tree_tie(const Params& p) {
    ExperimentResult res;
    auto tree = build_regular_tree(4, 2);
    auto c = sample_couplings(tree, CouplingDescriptor::constant_plus_one(), 0);
    std::vector<int> leaves;
    std::vector<int8_t> vals;
    for (int v = 5; v < tree.n; ++v) {
        leaves.push_back(v);
        vals.push_back((v - 5) / 3 < 2 ? +1 : -1);
    }
    auto bc = BoundaryCondition::pin(tree.n, leaves, vals);
    GlauberOptions opts;
    opts.log_flip_events = false;
    opts.energy_trace = false;
    std::vector<uint64_t> root_flips(p.replicas, 0);
    std::vector<uint8_t> ok_children(p.replicas, 0), ok_ties(p.replicas, 0);
    replica_map(p.replicas, p.jobs, [&](int r) {
        const uint64_t rs = replica_seed(p.master, r);
        SpinConfig s0(tree.n, +1);
        for (int child = 1; child <= 4; ++child) s0[child] = child <= 2 ? +1 : -1;
        RngStream init(purpose_seed(rs, Purpose::InitSpins));
        s0[0] = static_cast<int8_t>(init.coin_pm1());
        auto rec = run_glauber(tree, c, s0, bc, p.horizon, rs, opts);
        bool kids = true;
        for (int child = 1; child <= 4; ++child)
            if (rec.stats[child].flips > 0) kids = false;
        ok_children[r] = kids;
        ok_ties[r] = rec.stats[0].tie_rings == rec.stats[0].rings;
        root_flips[r] = rec.stats[0].flips;
    });
    int flipped = 0;
    std::vector<std::string> rows;
    for (int r = 0; r < p.replicas; ++r) {
        if (root_flips[r] >= 1) ++flipped;
        check(res, ok_children[r], "root neighbor flipped in replica " + std::to_string(r));
        check(res, ok_ties[r], "root saw a non-tie ring in replica " + std::to_string(r));
        rows.push_back(std::to_string(r) + "," + std::to_string(root_flips[r]));
    }
    check(res, flipped >= (p.replicas * 95) / 100, "root flipped in fewer than 95% of replicas");
    res.summary["replicas_with_root_flip"] = flipped;
    res.summary["replicas"] = p.replicas;
    res.artifacts["runs.csv"] = csv_of_rows("replica,root_flips", rows);
    return res;
}

// ---------------------------------------------------------------------------
// 3. monotone-coupling
// ---------------------------------------------------------------------------
ExperimentResult exp_monotone_coupling(const Params& p) {
    ExperimentResult res;
    auto t = build_square_window(6, 6, BoundaryMode::Periodic);
    auto c = sample_couplings(t.graph, CouplingDescriptor::constant_plus_one(), 0);
    GlauberOptions opts;
    opts.log_flip_events = false;
    opts.energy_trace = false;
    std::vector<uint64_t> violations(p.replicas, 0);
    replica_map(p.replicas, p.jobs, [&](int r) {
        const uint64_t rs = replica_seed(p.master, r);
        RngStream rng(purpose_seed(rs, Purpose::InitSpins));
        SpinConfig hi(t.graph.n), lo(t.graph.n);
        for (int v = 0; v < t.graph.n; ++v) {
            hi[v] = static_cast<int8_t>(rng.coin_pm1());
            lo[v] = rng.bernoulli(0.35) ? static_cast<int8_t>(-1) : hi[v];
            if (lo[v] > hi[v]) lo[v] = hi[v];
        }
        auto mp = run_coupled_monotone(t.graph, c, lo, hi, BoundaryCondition::none(),
                                       BoundaryCondition::none(), p.horizon, rs, opts);
        violations[r] = mp.order_violations;
    });
    uint64_t total = 0;
    for (auto v : violations) total += v;
    check(res, total == 0, "pointwise-order violations observed");
    res.summary["ordered_pairs"] = p.replicas;
    res.summary["order_violations"] = total;
    return res;
}

// ---------------------------------------------------------------------------
// 4. freeze-in-slices
// ---------------------------------------------------------------------------
ExperimentResult exp_freeze_in_slices(const Params& p) {
    ExperimentResult res;
    struct Case {
        const char* label;
        Graph g;
        int lo_hi[2];
    };
    std::vector<Case> cases;
    cases.push_back({"K4x[0..10]", build_cylinder(complete_graph(4), 0, 10), {1, 9}});
    cases.push_back({"C5x[0..12]", build_cylinder(cycle_graph(5), 0, 12), {1, 11}});
    GlauberOptions opts;
    opts.log_flip_events = false;
    opts.energy_trace = false;
    int case_idx = 0;
    for (auto& cs : cases) {
        auto c = sample_couplings(cs.g, CouplingDescriptor::constant_plus_one(), 0);
        std::vector<int> pinned;
        for (int v = 0; v < cs.g.n; ++v)
            if (cs.g.level[v] <= cs.lo_hi[0] || cs.g.level[v] >= cs.lo_hi[1]) pinned.push_back(v);
        std::vector<uint8_t> ok(p.replicas, 0);
        replica_map(p.replicas, p.jobs, [&](int r) {
            const uint64_t rs = replica_seed(p.master, 1000 * case_idx + r);
            RngStream rng(purpose_seed(rs, Purpose::InitSpins));
            const int8_t lo_sign = static_cast<int8_t>(rng.coin_pm1());
            const int8_t hi_sign = static_cast<int8_t>(rng.coin_pm1());
            std::vector<int8_t> vals;
            for (int v : pinned) vals.push_back(cs.g.level[v] <= cs.lo_hi[0] ? lo_sign : hi_sign);
            auto bc = BoundaryCondition::pin(cs.g.n, pinned, vals);
            SpinConfig s0(cs.g.n);
            for (auto& x : s0) x = static_cast<int8_t>(rng.coin_pm1());
            auto rec = run_glauber(cs.g, c, s0, bc, p.horizon, rs, opts);
            auto rep = classify_freezing(cs.g, rec, 0.2);
            ok[r] = rep.cls == FreezeClass::AllQuietSliceConstant;
        });
        int good = 0;
        for (auto o : ok) good += o;
        check(res, good == p.replicas,
              std::string(cs.label) + ": not all replicas froze in slices (" +
                  std::to_string(good) + "/" + std::to_string(p.replicas) + ")");
        res.summary[cs.label] = good;
        ++case_idx;
    }
    res.summary["replicas_per_case"] = p.replicas;
    res.summary["horizon"] = p.horizon;
    res.summary["trailing_fraction"] = 0.2;
    return res;
}

// ---------------------------------------------------------------------------
// 5. unsat-forest
// ---------------------------------------------------------------------------
ExperimentResult exp_unsat_forest(const Params& p) {
    ExperimentResult res;
    auto w = build_square_window(4, 4, BoundaryMode::Free);
    int unique = 0, forests = 0, frustration_ok = 0;
    std::vector<std::string> rows;
    for (int i = 0; i < p.replicas; ++i) {
        auto c = sample_couplings(w.graph, CouplingDescriptor::gaussian(1.0),
                                  replica_seed(p.master, i));
        auto r = enumerate_ground_states(w.graph, c);
        if (!r.degenerate) ++unique;
        bool forest_all = true, frustr_all = true;
        for (const auto& m : r.minimizers) {
            auto uns = unsatisfied_subgraph(w, c, m);
            if (!uns.forest) forest_all = false;
            auto fr = plaquette_frustration_check(w, c);
            for (int f : fr.frustrated_faces) {
                int unsat_here = 0;
                for (int e : w.face_edges(f))
                    if (c[e] * m[w.graph.edges[e].u] * m[w.graph.edges[e].v] < 0) ++unsat_here;
                if (unsat_here < 1) frustr_all = false;
            }
        }
        forests += forest_all;
        frustration_ok += frustr_all;
        rows.push_back(std::to_string(i) + "," + std::to_string(r.minimizers.size()) + "," +
                       std::to_string(forest_all));
    }
    check(res, unique == p.replicas, "a degenerate minimizer appeared");
    check(res, forests == p.replicas, "a cyclic unsatisfied dual set appeared");
    check(res, frustration_ok == p.replicas, "a frustrated face with no unsatisfied edge");
    res.summary["instances"] = p.replicas;
    res.summary["unique_minimizers"] = unique;
    res.summary["acyclic_unsat_sets"] = forests;
    res.artifacts["runs.csv"] = csv_of_rows("instance,minimizers,unsat_forest", rows);
    return res;
}

// ---------------------------------------------------------------------------
// 6. fixed-edge-consistency
// ---------------------------------------------------------------------------
ExperimentResult exp_fixed_edge_consistency(const Params& p) {
    ExperimentResult res;
    auto w = build_square_window(3, 3, BoundaryMode::Free);
    int fixed_edges_seen = 0;
    for (int i = 0; i < p.replicas; ++i) {
        auto c = sample_couplings(w.graph, CouplingDescriptor::gaussian(1.0),
                                  replica_seed(p.master, i));
        auto r = enumerate_ground_states(w.graph, c);
        for (int e = 0; e < c.edge_count(); ++e) {
            if (!is_fixed_edge(w.graph, c, e)) continue;
            ++fixed_edges_seen;
            for (const auto& m : r.minimizers)
                if (c[e] * m[w.graph.edges[e].u] * m[w.graph.edges[e].v] <= 0)
                    res.failures.push_back("unsatisfied fixed edge in instance " +
                                           std::to_string(i));
        }
    }
    res.summary["instances"] = p.replicas;
    res.summary["fixed_edges_checked"] = fixed_edges_seen;
    check(res, fixed_edges_seen > 0, "no fixed edges encountered");
    return res;
}

// ---------------------------------------------------------------------------
// 7. torus-unique-gsp
// ---------------------------------------------------------------------------
ExperimentResult exp_torus_unique_gsp(const Params& p) {
    (void)p;
    ExperimentResult res;
    for (auto [dim, energy] : {std::pair{3, -18.0}, {4, -32.0}}) {
        auto t = build_square_window(dim, dim, BoundaryMode::Periodic);
        auto c = sample_couplings(t.graph, CouplingDescriptor::constant_plus_one(), 0);
        auto r = check_torus_unique_gsp(t, c);
        const std::string label = std::to_string(dim) + "x" + std::to_string(dim);
        check(res, r.min_energy == energy, label + ": wrong minimal energy");
        check(res, r.minimizers.size() == 1, label + ": minimizer not unique mod flip");
        check(res, !r.minimizers.empty() && r.minimizers[0] == SpinConfig(dim * dim, +1),
              label + ": minimizer not monochromatic");
        res.summary[label + "_energy"] = r.min_energy;
        res.summary[label + "_minimizers_mod_flip"] = r.minimizers.size();
    }
    return res;
}

// ---------------------------------------------------------------------------
// 8. loop-gw-budget
// ---------------------------------------------------------------------------
ExperimentResult exp_loop_gw_budget(const Params& p) {
    ExperimentResult res;
    auto w = build_square_window(8, 8, BoundaryMode::Free);
    auto ens = build_loop_ensemble(w, 8);
    auto sched = make_frequency_schedule(ens, 10.0);
    const double tau = 0.5 / sched.checks.sum_nfs;
    const int vertex = w.reference_cell();
    std::vector<int> sizes(p.replicas, 0);
    replica_map(p.replicas, p.jobs, [&](int r) {
        auto d = dependency_cluster(w, ens, sched, tau, replica_seed(p.master, r), vertex);
        sizes[r] = static_cast<int>(d.vertices.size());
    });
    double mean = 0;
    int biggest = 0;
    for (int s : sizes) {
        mean += s;
        biggest = std::max(biggest, s);
    }
    mean /= p.replicas;
    check(res, biggest <= w.graph.n, "cluster exceeded the window");
    check(res, mean <= 2.4, "mean cluster size above the GW budget bound 2.4");
    res.summary["clusters"] = p.replicas;
    res.summary["tau_times_sum_nfs"] = 0.5;
    res.summary["mean_cluster_size"] = mean;
    res.summary["max_cluster_size"] = biggest;
    return res;
}

// ---------------------------------------------------------------------------
// 9. loop-terminal-gsp
// ---------------------------------------------------------------------------
ExperimentResult exp_loop_terminal_gsp(const Params& p) {
    ExperimentResult res;
    auto w = build_square_window(8, 8, BoundaryMode::Free);
    auto ens = build_loop_ensemble(w, 8);
    auto sched = make_frequency_schedule(ens, 10.0);
    auto c = sample_couplings(w.graph, CouplingDescriptor::constant_plus_one(), 0);
    std::vector<uint8_t> quiet(p.replicas, 0), clean(p.replicas, 0), monotone(p.replicas, 0);
    replica_map(p.replicas, p.jobs, [&](int r) {
        const uint64_t rs = replica_seed(p.master, r);
        auto rec = run_loop_dynamics(w, ens, sched, c, random_spins(w.graph.n, rs), p.horizon, rs);
        bool q = true;
        double h = rec.initial_energy;
        bool mono = true;
        for (const auto& ev : rec.events) {
            if (ev.action == LoopAction::Flip) {
                h -= 2 * ev.h;
                if (ev.t > 0.8 * rec.horizon) q = false;
            }
            if (h > rec.initial_energy + 1e-9) mono = false;
        }
        quiet[r] = q;
        monotone[r] = mono;
        if (q) {
            int residual = 0;
            for (const auto& loop : ens.loops)
                if (loop_hamiltonian(w, c, loop, rec.final_spins) > 0) ++residual;
            clean[r] = residual == 0;
        }
    });
    int nq = 0, nc = 0;
    for (int r = 0; r < p.replicas; ++r) {
        nq += quiet[r];
        nc += quiet[r] && clean[r];
        check(res, monotone[r], "energy increased in replica " + std::to_string(r));
        if (quiet[r]) check(res, clean[r], "quiet replica with a positive loop");
    }
    check(res, nq >= (p.replicas * 45) / 50,
          "fewer than 45/50-scaled quiet replicas: " + std::to_string(nq));
    res.summary["replicas"] = p.replicas;
    res.summary["quiet_replicas"] = nq;
    res.summary["quiet_and_lmax_local_ground_state"] = nc;
    res.summary["horizon"] = p.horizon;
    res.summary["l_max"] = 8;
    res.summary["quiet_means"] = "no energy-reducing flip in the trailing 20% of time";
    return res;
}

// ---------------------------------------------------------------------------
// 10. loop-count-oracles
// ---------------------------------------------------------------------------
// independent depth-first cycle enumeration on the face grid
struct CycleOracle {
    const PlanarWindow& w;
    int max_len;
    std::set<std::vector<int>> cycles;
    std::vector<int> path;
    std::vector<uint8_t> on_path;

    CycleOracle(const PlanarWindow& w_, int ml) : w(w_), max_len(ml), on_path(w_.face_count(), 0) {}

    std::vector<int> face_neighbors(int f) const {
        std::vector<int> nb;
        const int x = w.fx(f), y = w.fy(f);
        if (x + 1 < w.faces_x) nb.push_back(w.face_id(x + 1, y));
        if (x - 1 >= 0) nb.push_back(w.face_id(x - 1, y));
        if (y + 1 < w.faces_y) nb.push_back(w.face_id(x, y + 1));
        if (y - 1 >= 0) nb.push_back(w.face_id(x, y - 1));
        return nb;
    }
    int dual_edge_of(int fa, int fb) const {
        const int ax = w.fx(fa), ay = w.fy(fa), bx = w.fx(fb), by = w.fy(fb);
        int e;
        if (ay == by) {
            const int x = std::max(ax, bx);
            e = w.graph.edge_index(w.vertex_id(x, ay), w.vertex_id(x, ay + 1));
        } else {
            const int y = std::max(ay, by);
            e = w.graph.edge_index(w.vertex_id(ax, y), w.vertex_id(ax + 1, y));
        }
        return w.dual_of_primal[e];
    }
    void dfs(int start, int v) {
        for (int nb : face_neighbors(v)) {
            if (nb == start && path.size() >= 3) {
                if (path[1] < path.back()) continue;
                std::vector<int> es;
                for (size_t i = 0; i < path.size(); ++i)
                    es.push_back(dual_edge_of(path[i], path[(i + 1) % path.size()]));
                std::sort(es.begin(), es.end());
                cycles.insert(es);
                continue;
            }
            if (nb <= start || on_path[nb]) continue;
            if (static_cast<int>(path.size()) + 1 > max_len) continue;
            path.push_back(nb);
            on_path[nb] = 1;
            dfs(start, nb);
            on_path[nb] = 0;
            path.pop_back();
        }
    }
    void run() {
        for (int s = 0; s < w.face_count(); ++s) {
            path = {s};
            on_path[s] = 1;
            dfs(s, s);
            on_path[s] = 0;
        }
    }
};

ExperimentResult exp_loop_count_oracles(const Params& p) {
    (void)p;
    ExperimentResult res;
    // plaquette counts: one loop per dual-lattice cell on several windows
    for (auto [W, H] : {std::pair{5, 5}, {6, 4}, {8, 8}}) {
        auto w = build_square_window(W, H, BoundaryMode::Free);
        auto loops = enumerate_dual_loops(w, 4);
        CycleOracle oracle(w, 4);
        oracle.run();
        const auto label = std::to_string(W) + "x" + std::to_string(H);
        check(res, loops.size() == size_t((W - 2) * (H - 2)),
              label + ": plaquette count != (W-2)(H-2)");
        check(res, loops.size() == oracle.cycles.size(), label + ": plaquette oracle mismatch");
        res.summary["plaquettes_" + label] = loops.size();
    }
    // through-cell counts and translation types on 8x8
    auto w = build_square_window(8, 8, BoundaryMode::Free);
    auto loops = enumerate_dual_loops(w, 8);
    {
        CycleOracle oracle(w, 8);
        oracle.run();
        std::set<std::vector<int>> impl;
        for (const auto& l : loops) impl.insert(l.dual_edges);
        check(res, impl.size() == loops.size(), "duplicate loops in the enumeration");
        check(res, impl == oracle.cycles, "length<=8 enumeration differs from the DFS oracle");
    }
    const int ref = w.reference_cell();
    int len6 = 0, upto8 = 0;
    std::set<std::vector<std::pair<int, int>>> shapes;
    for (const auto& l : loops) {
        const bool through = std::binary_search(l.cells.begin(), l.cells.end(), ref);
        if (through) {
            ++upto8;
            if (l.length() == 6) ++len6;
        }
        if (l.length() == 8) {
            std::vector<std::pair<int, int>> cs;
            for (int cell : l.cells) cs.push_back({w.vx(cell), w.vy(cell)});
            int mx = cs[0].first, my = cs[0].second;
            for (auto [x, y] : cs) {
                mx = std::min(mx, x);
                my = std::min(my, y);
            }
            for (auto& [x, y] : cs) {
                x -= mx;
                y -= my;
            }
            std::sort(cs.begin(), cs.end());
            shapes.insert(cs);
        }
    }
    check(res, len6 == 4, "length-6 loops through a fixed cell != 4");
    check(res, upto8 == 27, "length<=8 loops through a fixed cell != 27");
    check(res, shapes.size() == 7, "perimeter-8 shapes up to translation != 7");
    res.summary["through_cell_len6"] = len6;
    res.summary["through_cell_upto8"] = upto8;
    res.summary["perimeter8_translation_types"] = shapes.size();
    return res;
}

// ---------------------------------------------------------------------------
// 11. cross-lemma
// ---------------------------------------------------------------------------
ExperimentResult exp_cross_lemma(const Params& p) {
    ExperimentResult res;
    int checked = 0, violations = 0;
    uint64_t seed = 0;
    while (checked < p.replicas && seed < 50'000) {
        auto saw = sample_self_avoiding_path(64, 64, 600, mix_seed(p.master, seed++));
        RngStream rng(mix_seed(p.master, 100'000 + seed));
        for (int trial = 0; trial < 60 && checked < p.replicas; ++trial) {
            const auto pa = saw.verts[rng.below(saw.verts.size())];
            const auto qa = saw.verts[rng.below(saw.verts.size())];
            const int n = 1 + static_cast<int>(rng.below(2));
            const int m = 1 + static_cast<int>(rng.below(2));
            auto r = check_cross_lemma(saw, pa, qa, n, m);
            if (!r.precondition_ok) continue;
            ++checked;
            if (!r.holds) ++violations;
        }
    }
    check(res, checked == p.replicas, "could not assemble enough valid instances");
    check(res, violations == 0, "cross-lemma violations found");
    res.summary["instances"] = checked;
    res.summary["violations"] = violations;
    return res;
}

// ---------------------------------------------------------------------------
// 12. mass-transport
// ---------------------------------------------------------------------------
ExperimentResult exp_mass_transport(const Params& p) {
    ExperimentResult res;
    // column forest: exact equality for f = 1_{k<=3}
    auto col = sample_directed_forest(64, 64, 1.0, p.master);
    std::vector<double> f13(8, 0.0);
    f13[0] = f13[1] = f13[2] = 1.0;
    auto e13 = mt_estimate(col, f13, 8);
    check(res, e13.lhs == 3.0 && e13.rhs == 3.0, "column forest estimate not exact");
    res.summary["column_lhs"] = e13.lhs;
    res.summary["column_rhs"] = e13.rhs;

    // directed sampler at 512^2, margin 8, 10 seeds: one expected root at
    // each tree distance n <= 5
    const int seeds = 10;
    std::vector<EstimatorRow> rows;
    std::vector<std::vector<double>> rhs_by_n(5);
    for (int s = 0; s < seeds; ++s) {
        auto f = sample_directed_forest(512, 512, 0.5, replica_seed(p.master, s));
        for (int n = 1; n <= 5; ++n) {
            std::vector<double> fv(8, 0.0);
            fv[n - 1] = 1.0;
            rhs_by_n[n - 1].push_back(mt_estimate(f, fv, 8).rhs);
        }
    }
    for (int n = 1; n <= 5; ++n) {
        double mean = 0;
        for (double v : rhs_by_n[n - 1]) mean += v;
        mean /= seeds;
        double var = 0;
        for (double v : rhs_by_n[n - 1]) var += (v - mean) * (v - mean);
        const double se = std::sqrt(var / seeds / std::max(1, seeds - 1));
        rows.push_back({double(n), mean, se, seeds});
        check(res, std::abs(mean - 1.0) <= 0.05,
              "mean rhs at n=" + std::to_string(n) + " outside 1 +- 0.05");
        res.summary["rhs_n" + std::to_string(n)] = mean;
    }
    std::ostringstream csv;
    write_estimator_csv(csv, rows);
    res.artifacts["estimates.csv"] = csv.str();
    return res;
}

// ---------------------------------------------------------------------------
// 13. perturbation-margin
// ---------------------------------------------------------------------------
ExperimentResult exp_perturbation_margin(const Params& p) {
    ExperimentResult res;
    auto w = build_square_window(6, 6, BoundaryMode::Free);
    auto ens = build_loop_ensemble(w, 8);
    auto sched = make_frequency_schedule(ens, 10.0);
    std::vector<int> replay_failures(p.replicas, 0), witnesses(p.replicas, 0),
        slack(p.replicas, 0), infinite(p.replicas, 0);
    replica_map(p.replicas, p.jobs, [&](int r) {
        const uint64_t rs = replica_seed(p.master, r);
        auto c = sample_couplings(w.graph, CouplingDescriptor::gaussian(1.0), rs);
        SpinConfig s0 = random_spins(w.graph.n, rs);
        auto rec = run_loop_dynamics(w, ens, sched, c, s0, p.horizon, rs);
        auto base = flip_sequence(rec);
        RngStream pick(purpose_seed(rs, Purpose::Scratch, 99));
        for (int k = 0; k < 10; ++k) {
            const int edge = static_cast<int>(pick.below(w.graph.edge_count()));
            const double eps = perturbation_margin(rec, ens, edge);
            auto replay = [&](double delta) {
                auto mod = c;
                mod.j[edge] += delta;
                return flip_sequence(run_loop_dynamics(w, ens, sched, mod, s0, p.horizon, rs));
            };
            if (!std::isfinite(eps)) {
                ++infinite[r];
                if (replay(1.0) != base) ++replay_failures[r];
                continue;
            }
            if (replay(eps / 2) != base) ++replay_failures[r];
            if (replay(-eps / 2) != base) ++replay_failures[r];
            // probing past the margin: a sign boundary shows up as a changed
            // sequence in one direction, otherwise the margin was slack
            if (replay(1.1 * eps) != base || replay(-1.1 * eps) != base) ++witnesses[r];
            else ++slack[r];
        }
    });
    int fail = 0, wit = 0, slk = 0, inf = 0;
    for (int r = 0; r < p.replicas; ++r) {
        fail += replay_failures[r];
        wit += witnesses[r];
        slk += slack[r];
        inf += infinite[r];
    }
    check(res, fail == 0, "identical-replay failures inside the margin");
    res.summary["runs"] = p.replicas;
    res.summary["edges_per_run"] = 10;
    res.summary["replay_failures"] = fail;
    res.summary["margin_witnesses"] = wit;
    res.summary["margin_slack"] = slk;
    res.summary["edges_never_on_rung_loops"] = inf;
    return res;
}

// ---------------------------------------------------------------------------
// 14. strongly-freezing-estimate
// ---------------------------------------------------------------------------
ExperimentResult exp_strongly_freezing(const Params& p) {
    ExperimentResult res;
    const int d = 2;
    const std::vector<int> ns{10, 20, 40, 80};
    std::vector<double> phat(ns.size()), se(ns.size());
    for (size_t i = 0; i < ns.size(); ++i) {
        auto kn = complete_graph(ns[i]);
        int hits = 0;
        RngStream rng(purpose_seed(replica_seed(p.master, i), Purpose::InitSpins));
        for (int s = 0; s < p.replicas; ++s) {
            SpinConfig spins(ns[i]);
            for (auto& x : spins) x = static_cast<int8_t>(rng.coin_pm1());
            if (strongly_freezing_event(kn, spins, d)) ++hits;
        }
        phat[i] = double(hits) / p.replicas;
        se[i] = std::sqrt(phat[i] * (1 - phat[i]) / p.replicas);
        res.summary["p_n" + std::to_string(ns[i])] = phat[i];
    }
    for (size_t i = 1; i < ns.size(); ++i) {
        const double slackband = 2.0 * std::sqrt(se[i] * se[i] + se[i - 1] * se[i - 1]);
        check(res, phat[i] >= phat[i - 1] - slackband,
              "estimate not monotone within 2 standard errors at n=" + std::to_string(ns[i]));
    }
    res.summary["samples_per_n"] = p.replicas;
    res.summary["d"] = d;
    return res;
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------
struct Entry {
    ExperimentInfo info;
    int default_replicas;
    double default_horizon;
    ExperimentResult (*fn)(const Params&);
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries{
        {{"nonfreezing-cylinder",
          "shared-clique cylinder: only the shared vertex moves, always on ties",
          "~1 s"},
         200, 100.0, exp_nonfreezing_cylinder},
        {{"evenTree-tie",
          "even-degree tree with half/half pinned boundary keeps the root tied and flipping",
          "<1 s"},
         100, 100.0, exp_even_tree_tie},
        {{"monotone-coupling",
          "ordered pairs stay ordered under a shared event stream on the 6x6 torus", "~2 s"},
         1000, 20.0, exp_monotone_coupling},
        {{"freeze-in-slices",
          "K_4 and C_5 cylinders with pinned monochromatic end pairs freeze in slices", "~10 s"},
         50, 10'000.0, exp_freeze_in_slices},
        {{"unsat-forest",
          "exact 4x4 minimizers: unique, acyclic unsatisfied dual sets, frustrated faces covered",
          "~1 s"},
         100, 0.0, exp_unsat_forest},
        {{"fixed-edge-consistency", "fixed edges are satisfied in every exact minimizer", "<1 s"},
         100, 0.0, exp_fixed_edge_consistency},
        {{"torus-unique-gsp",
          "J=+1 tori minimize exactly at the monochromatic pair (-18 / -32)", "<1 s"},
         1, 0.0, exp_torus_unique_gsp},
        {{"loop-gw-budget",
          "dependency clusters stay within the subcritical branching budget", "<1 s"},
         1000, 0.0, exp_loop_gw_budget},
        {{"loop-terminal-gsp",
          "long loop-dynamics runs end in l_max-local ground states, energy non-increasing",
          "~5 s"},
         50, 1e21, exp_loop_terminal_gsp},
        {{"loop-count-oracles",
          "loop enumeration equals the DFS cycle oracle; pinned small counts hold exactly",
          "<1 s"},
         1, 0.0, exp_loop_count_oracles},
        {{"cross-lemma", "snails of perpendicularly intersecting crosses share a vertex", "~5 s"},
         1000, 0.0, exp_cross_lemma},
        {{"mass-transport",
          "one expected root at each tree distance on the directed forest (512^2, margin 8)",
          "~5 s"},
         1, 0.0, exp_mass_transport},
        {{"perturbation-margin",
          "coupling changes below the margin replay identically; larger probes find witnesses",
          "~5 s"},
         50, 3e20, exp_perturbation_margin},
        {{"strongly-freezing-estimate",
          "the all-vertices-(d+1)-majority probability grows with n on complete graphs", "<1 s"},
         10'000, 0.0, exp_strongly_freezing},
    };
    return entries;
}

}  // namespace

std::vector<ExperimentInfo> list_experiments() {
    std::vector<ExperimentInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
}

bool experiment_exists(const std::string& name) {
    for (const auto& e : registry())
        if (e.info.name == name) return true;
    return false;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    for (const auto& e : registry()) {
        if (e.info.name != cfg.name) continue;
        Params p;
        p.master = cfg.master_seed;
        p.replicas = cfg.replicas > 0 ? cfg.replicas : e.default_replicas;
        p.horizon = cfg.horizon > 0 ? cfg.horizon : e.default_horizon;
        p.jobs = std::max(1, cfg.jobs);
        ExperimentResult res = e.fn(p);
        res.name = cfg.name;
        res.pass = res.failures.empty();
        res.summary["experiment"] = cfg.name;
        res.summary["master_seed"] = p.master;
        res.summary["pass"] = res.pass;
        if (!res.failures.empty()) res.summary["failures"] = res.failures;
        if (!cfg.out_dir.empty()) write_result_files(res, cfg.out_dir);
        return res;
    }
    throw std::invalid_argument("unknown experiment: " + cfg.name);
}

ExperimentConfig parse_config_text(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        line = line.substr(start);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        key = trim(key);
        value = trim(value);
        if (key == "experiment.name") cfg.name = value;
        else if (key == "experiment.replicas") cfg.replicas = std::stoi(value);
        else if (key == "experiment.jobs") cfg.jobs = std::stoi(value);
        else if (key == "dynamics.horizon") cfg.horizon = std::stod(value);
        else if (key == "seed.master") cfg.master_seed = std::stoull(value);
        else if (key == "output.dir") cfg.out_dir = value;
        else throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" +
                                      key + "'");
    }
    if (cfg.name.empty()) throw std::runtime_error("config: experiment.name is required");
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config_text(in);
}

void write_result_files(const ExperimentResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(out_dir) / res.name;
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "summary.json");
        out << res.summary.dump(2) << '\n';
    }
    for (const auto& [name, contents] : res.artifacts) {
        std::ofstream out(dir / name);
        out << contents;
    }
}

}  // namespace spinlab

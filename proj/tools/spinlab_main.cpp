// spinlab command line: reproducible experiments plus direct access to the
// graph/ground-state/loop/geometry machinery.
#include "CLI11.hpp"

#include "spinlab/disorder.hpp"
#include "spinlab/experiments.hpp"
#include "spinlab/geometry.hpp"
#include "spinlab/glauber.hpp"
#include "spinlab/groundstate.hpp"
#include "spinlab/loop_dynamics.hpp"
#include "spinlab/planar.hpp"

#include <fstream>
#include <iostream>

using namespace spinlab;

namespace {

BoundaryMode mode_of(const std::string& s) {
    if (s == "free") return BoundaryMode::Free;
    if (s == "periodic") return BoundaryMode::Periodic;
    throw CLI::ValidationError("--mode must be free or periodic");
}

CouplingDescriptor coupling_of(const std::string& s, double param) {
    if (s == "constant") return CouplingDescriptor::constant_plus_one();
    if (s == "gaussian") return CouplingDescriptor::gaussian(param);
    if (s == "uniform") return CouplingDescriptor::uniform_symmetric(param);
    if (s == "exponential") return CouplingDescriptor::positive_exponential(param);
    throw CLI::ValidationError("--coupling must be constant|gaussian|uniform|exponential");
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw CLI::ValidationError("cannot open output file: " + path);
    return file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spinlab: zero-temperature spin dynamics and ground-state laboratory"};
    app.require_subcommand(1);

    // ---- list ----
    auto* list = app.add_subcommand("list", "list runnable experiments");

    // ---- run ----
    auto* run = app.add_subcommand("run", "run a named experiment");
    std::string run_name, config_path, out_dir;
    uint64_t seed = 20240817;
    int replicas = -1, jobs = 1;
    double horizon = -1;
    run->add_option("name", run_name, "experiment name (see `spinlab list`)");
    run->add_option("--config", config_path, "key=value config file");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--replicas", replicas, "replica count override");
    run->add_option("--horizon", horizon, "horizon override");
    run->add_option("--jobs", jobs, "parallel replica workers");
    run->add_option("--out", out_dir, "output directory for summary.json and CSVs");

    // ---- graph ----
    auto* graph = app.add_subcommand("graph", "build a graph window and print it");
    std::string gkind = "window", gout;
    int gw = 8, gh = 8, gdeg = 4, gdepth = 3, glo = 0, ghi = 5, gn = 4;
    std::string gmode = "free", gslice = "complete";
    graph->add_option("--kind", gkind, "window|tree|cylinder|clique-pair");
    graph->add_option("--width", gw);
    graph->add_option("--height", gh);
    graph->add_option("--mode", gmode, "free|periodic (window)");
    graph->add_option("--degree", gdeg, "tree degree");
    graph->add_option("--depth", gdepth, "tree depth");
    graph->add_option("--slice", gslice, "cylinder slice: complete|cycle|path");
    graph->add_option("--n", gn, "slice size / clique size");
    graph->add_option("--low", glo, "cylinder low level");
    graph->add_option("--high", ghi, "cylinder high level");
    graph->add_option("--out", gout, "output file (default stdout)");

    // ---- gsp ----
    auto* gsp = app.add_subcommand("gsp", "exact ground-state operations");
    gsp->require_subcommand(1);
    auto* gsp_enum = gsp->add_subcommand("enumerate", "exhaustive scan on a window");
    int ew = 4, eh = 4;
    std::string emode = "free", ecoupling = "gaussian", eout;
    double eparam = 1.0;
    uint64_t eseed = 1;
    gsp_enum->add_option("--width", ew);
    gsp_enum->add_option("--height", eh);
    gsp_enum->add_option("--mode", emode);
    gsp_enum->add_option("--coupling", ecoupling);
    gsp_enum->add_option("--param", eparam);
    gsp_enum->add_option("--seed", eseed);
    gsp_enum->add_option("--out", eout);
    auto* gsp_verify = gsp->add_subcommand("verify", "K-local check of a spin string");
    std::string vgraph, vcouplings, vspins;
    int vk = 3;
    gsp_verify->add_option("--graph", vgraph, "graph file")->required();
    gsp_verify->add_option("--couplings", vcouplings, "couplings file")->required();
    gsp_verify->add_option("--spins", vspins, "+-+... spin string")->required();
    gsp_verify->add_option("--k", vk, "subset size bound");
    auto* gsp_tree = gsp->add_subcommand("tree-flip", "flip construction on a tree ball");
    int tdeg = 3, tdepth = 6;
    double tpercentile = 0.05;
    uint64_t tseed = 1;
    int tk = 6;
    gsp_tree->add_option("--degree", tdeg);
    gsp_tree->add_option("--depth", tdepth);
    gsp_tree->add_option("--percentile", tpercentile, "light-edge |J| percentile for h");
    gsp_tree->add_option("--seed", tseed);
    gsp_tree->add_option("--k", tk, "verification level");
    auto* gsp_torus = gsp->add_subcommand("torus-check", "J=+1 torus minimizers");
    int xdim = 4;
    gsp_torus->add_option("--dim", xdim, "torus side (<= 5)");

    // ---- loops ----
    auto* loops_cmd = app.add_subcommand("loops", "enumerate dual loops on a window");
    int lw = 8, lh = 8, lmax = 8;
    std::string lout;
    bool ltypes = false;
    loops_cmd->add_option("--width", lw);
    loops_cmd->add_option("--height", lh);
    loops_cmd->add_option("--max-length", lmax);
    loops_cmd->add_flag("--types", ltypes, "print the congruence type table instead");
    loops_cmd->add_option("--out", lout);

    // ---- geometry ----
    auto* geo = app.add_subcommand("geometry", "directed-forest sampling and estimators");
    int fw = 128, fh = 128, fmargin = 8, fbox = 0;
    double fp = 0.5;
    uint64_t fseed = 1;
    std::string fout, festimate;
    geo->add_option("--width", fw);
    geo->add_option("--height", fh);
    geo->add_option("--p", fp, "probability the parent step goes up");
    geo->add_option("--seed", fseed);
    geo->add_option("--margin", fmargin, "core margin for the mass-transport estimate");
    geo->add_option("--box", fbox, "when > 0: print e_n for this box halfwidth");
    geo->add_option("--estimate", festimate, "mt: print the mass-transport row for f=1_{k<=margin}");
    geo->add_option("--out", fout, "write the forest to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& info : list_experiments())
                std::cout << info.name << "\t" << info.budget << "\t" << info.checks << "\n";
            return 0;
        }
        if (*run) {
            ExperimentConfig cfg;
            if (!config_path.empty()) cfg = parse_config_file(config_path);
            if (!run_name.empty()) cfg.name = run_name;
            if (cfg.name.empty()) throw std::runtime_error("run: experiment name required");
            if (run->count("--seed")) cfg.master_seed = seed;
            if (replicas > 0) cfg.replicas = replicas;
            if (horizon > 0) cfg.horizon = horizon;
            if (jobs > 1) cfg.jobs = jobs;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            auto res = run_experiment(cfg);
            std::cout << res.summary.dump(2) << "\n";
            if (!res.pass)
                for (const auto& f : res.failures) std::cerr << "FAIL: " << f << "\n";
            return res.pass ? 0 : 1;
        }
        if (*graph) {
            std::ofstream file;
            auto& out = open_or_stdout(file, gout);
            if (gkind == "window") {
                write_window(out, build_square_window(gw, gh, mode_of(gmode)));
            } else if (gkind == "tree") {
                write_graph(out, build_regular_tree(gdeg, gdepth));
            } else if (gkind == "cylinder") {
                Graph slice = gslice == "complete" ? complete_graph(gn)
                              : gslice == "cycle"  ? cycle_graph(gn)
                                                   : path_graph(gn);
                write_graph(out, build_cylinder(slice, glo, ghi));
            } else if (gkind == "clique-pair") {
                write_graph(out, build_shared_clique_pair(gn));
            } else {
                throw std::runtime_error("unknown graph kind: " + gkind);
            }
            return 0;
        }
        if (*gsp_enum) {
            auto w = build_square_window(ew, eh, mode_of(emode));
            auto c = sample_couplings(w.graph, coupling_of(ecoupling, eparam), eseed);
            auto report = enumerate_ground_states(w.graph, c);
            std::ofstream file;
            auto& out = open_or_stdout(file, eout);
            write_groundstate_report_json(out, w.graph, report);
            return 0;
        }
        if (*gsp_verify) {
            std::ifstream gin(vgraph);
            if (!gin) throw std::runtime_error("cannot open " + vgraph);
            auto g = read_graph(gin);
            std::ifstream cin_(vcouplings);
            if (!cin_) throw std::runtime_error("cannot open " + vcouplings);
            auto c = read_couplings(cin_, g);
            if (static_cast<int>(vspins.size()) != g.n)
                throw std::runtime_error("spin string length mismatch");
            SpinConfig s(g.n);
            for (int v = 0; v < g.n; ++v) s[v] = vspins[v] == '+' ? +1 : -1;
            auto verdict = verify_local_ground_state(g, c, s, vk);
            if (verdict.pass) {
                std::cout << "pass\n";
                return 0;
            }
            std::cout << "witness:";
            for (int v : verdict.witness) std::cout << ' ' << v;
            std::cout << " boundary_sum=" << verdict.witness_boundary_sum << "\n";
            return 1;
        }
        if (*gsp_tree) {
            auto tree = build_regular_tree(tdeg, tdepth);
            auto c = sample_couplings(tree, CouplingDescriptor::gaussian(1.0), tseed);
            std::vector<double> mags;
            for (int e = 0; e < c.edge_count(); ++e) mags.push_back(std::abs(c[e]));
            std::sort(mags.begin(), mags.end());
            const double h = mags[static_cast<size_t>(tpercentile * (mags.size() - 1))];
            auto cfg = construct_tree_flip_gsp(tree, c, h);
            if (!cfg) {
                std::cout << "absent\n";
                return 1;
            }
            std::vector<uint8_t> skip(tree.n, 0);
            for (int v = 0; v < tree.n; ++v)
                if (tree.boundary_flag[v]) skip[v] = 1;
            auto verdict = verify_local_ground_state(tree, c, *cfg, tk, skip);
            std::cout << (verdict.pass ? "constructed and verified at K=" : "constructed, FAILED at K=")
                      << tk << "\n";
            return verdict.pass ? 0 : 1;
        }
        if (*gsp_torus) {
            auto t = build_square_window(xdim, xdim, BoundaryMode::Periodic);
            auto c = sample_couplings(t.graph, CouplingDescriptor::constant_plus_one(), 0);
            auto r = check_torus_unique_gsp(t, c);
            write_groundstate_report_json(std::cout, t.graph, r);
            const bool mono = r.minimizers.size() == 1 &&
                              r.minimizers[0] == SpinConfig(t.graph.n, +1);
            return mono ? 0 : 1;
        }
        if (*loops_cmd) {
            auto w = build_square_window(lw, lh, BoundaryMode::Free);
            auto ens = build_loop_ensemble(w, lmax);
            std::ofstream file;
            auto& out = open_or_stdout(file, lout);
            if (ltypes) {
                out << "key\tlength\tspan\tn_at_origin\ttruncated\n";
                for (const auto& t : ens.types)
                    out << t.key << '\t' << t.length << '\t' << t.span << '\t'
                        << t.members_at_origin << '\t' << (t.truncated ? 1 : 0) << '\n';
            } else {
                write_loops(out, w, ens.loops);
            }
            return 0;
        }
        if (*geo) {
            auto f = sample_directed_forest(fw, fh, fp, fseed);
            if (!fout.empty()) {
                std::ofstream file(fout);
                write_forest(file, f);
            }
            if (festimate == "mt") {
                std::vector<double> fv(fmargin, 1.0);
                auto est = mt_estimate(f, fv, fmargin);
                std::cout << "lhs=" << est.lhs << " rhs=" << est.rhs
                          << " core=" << est.core_size << "\n";
            }
            if (fbox > 0)
                std::cout << "e_n(" << fbox << ")=" << count_boundary_path_edges(f, fbox) << "\n";
            if (fout.empty() && festimate.empty() && fbox == 0) write_forest(std::cout, f);
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}

// Reproducible named experiments binding all modules: configuration, replica
// seeding, deterministic parallel execution, and result emission.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace spinlab {

struct ExperimentConfig {
    std::string name;
    uint64_t master_seed = 20240817;
    int replicas = -1;    // -1 = experiment default
    double horizon = -1;  // -1 = experiment default
    int jobs = 1;
    std::string out_dir;  // empty = no files written
};

struct ExperimentResult {
    std::string name;
    bool pass = false;
    nlohmann::json summary;  // deterministic bytes: no timestamps
    std::vector<std::string> failures;
    std::map<std::string, std::string> artifacts;  // filename -> contents (CSV etc.)
};

struct ExperimentInfo {
    std::string name;
    std::string checks;  // what the experiment verifies
    std::string budget;  // rough runtime estimate
};

std::vector<ExperimentInfo> list_experiments();
bool experiment_exists(const std::string& name);

// Runs the named experiment over replica seeds derived from the master seed;
// deterministic for a fixed (config, master seed) regardless of --jobs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Flat key=value config text; unknown keys are rejected. Recognized keys:
//   experiment.name, experiment.replicas, experiment.jobs,
//   dynamics.horizon, seed.master, output.dir
ExperimentConfig parse_config_text(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Writes summary.json plus the result's artifacts under out_dir.
void write_result_files(const ExperimentResult& res, const std::string& out_dir);

}  // namespace spinlab

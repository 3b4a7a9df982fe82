#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include <mbps/dataset.hpp>
#include <mbps/harness/config.hpp>
#include <mbps/opt/cmaes.hpp>

namespace mbps::harness {

struct EpisodeResult {
    int episode = 0;
    double reward = 0.0;
    double best_so_far = 0.0;
    bool aborted = false;
    Eigen::VectorXd theta;
    Eigen::VectorXd phi; // empty when the variant has no identification
    int discrete_index = -1;
    bool model_fallback = false;
    std::vector<opt::CmaTracePoint> trace;

    // wall-clock per phase; kept out of results.json so reruns are
    // bit-identical
    double learn_seconds = 0.0;
    double optimize_seconds = 0.0;
    double episode_seconds = 0.0;
};

struct RunResults {
    std::string variant;
    std::string prior;
    int replicate = 0;
    std::uint64_t master_seed = 0;
    std::vector<EpisodeResult> episodes;
    TransitionDataset data{pendubot::kStateDim, pendubot::kActionDim};
    double interaction_seconds = 0.0;
    double solve_threshold = 0.0;
    int episodes_to_solve = -1; // -1: never reached the threshold
    bool failed = false;
    std::string error;
};

// One replicate of the episode loop: optimize on the prior model (or draw a
// random policy when there is none), run it on the system, then alternate
// model learning / policy optimization / execution.
RunResults run_experiment(const ExperimentConfig& cfg, int replicate);

nlohmann::json results_to_json(const RunResults& r);
RunResults results_from_json(const nlohmann::json& j);

std::string run_directory(const ExperimentConfig& cfg, int replicate);

// Writes config.json, results.json, transitions.csv, cma_trace.csv and
// timing.json under the replicate's directory.
void write_run(const ExperimentConfig& cfg, const RunResults& results);

} // namespace mbps::harness

#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include <mbps/model/learning.hpp>
#include <mbps/opt/cmaes.hpp>
#include <mbps/policy/nn_policy.hpp>
#include <mbps/search/policy_search.hpp>
#include <mbps/system/pendubot.hpp>

namespace mbps::harness {

// Declarative description of one experiment scenario. Serializes to JSON;
// serialize -> parse -> serialize is byte-identical.
struct ExperimentConfig {
    std::string variant = "blackdrops";
    std::string prior = "none";
    int episodes = 26;
    int replicates = 1;
    std::uint64_t master_seed = 1;
    int workers = 0; // 0 = all cores
    std::string output_dir = "results";

    // real system
    pendubot::Params system_params;
    Eigen::Vector4d noise_sd = Eigen::Vector4d::Zero();
    double dt = 0.05;
    int horizon = 50;
    int substeps = 10;
    double u_max = pendubot::kTorqueLimit;

    pendubot::RewardConfig reward;
    int policy_hidden = 10;

    // model rollouts
    int rollouts_per_eval = 2;
    std::string propagation = "sample";

    // policy optimization
    opt::CmaConfig cma;

    // model learning
    int rprop_iterations = 300;
    int rprop_restarts = 3;
    int warm_iterations = 100;
    int max_outer_evals = 50;
    double outer_rel_tol = 1e-4;
    std::string score_rule = "sum";
    int mi_max_evals = 2000;
    double prior_lower_scale = 0.1;
    double prior_upper_scale = 4.0;

    // solve bookkeeping; oracle_reward < 0 means unknown
    double oracle_reward = -1.0;
    double solve_fraction = 0.9;

    void validate() const;
    double solve_threshold() const;

    model::ModelMode mode() const;
    bool needs_prior() const { return variant != "blackdrops"; }
    pendubot::Params prior_params() const;
    model::TunableMeanPrior make_prior() const;
    pendubot::EpisodeConfig episode_config() const;
    search::RolloutConfig rollout_config() const;
    policy::PolicyArch policy_arch() const;
    model::ModelLearnConfig model_config() const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    void save(const std::string& path) const;
};

} // namespace mbps::harness

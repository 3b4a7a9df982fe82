#pragma once

#include <cstdint>

#include <Eigen/Core>

#include <mbps/model/dynamics_model.hpp>
#include <mbps/opt/cmaes.hpp>
#include <mbps/policy/nn_policy.hpp>
#include <mbps/system/pendubot.hpp>

namespace mbps::search {

struct RolloutConfig {
    int horizon = 50;
    int rollouts_per_eval = 2;
    enum class Propagation { sample, mean } propagation = Propagation::sample;
    pendubot::RewardConfig reward;
    double u_max = pendubot::kTorqueLimit;
    Eigen::VectorXd init_state; // empty selects the hanging start

    // absurd-state guard: abort the rollout rather than query the prior there
    double omega_limit = pendubot::kOmegaLimit;
    double theta_limit = 4.0 * std::numbers::pi;
};

struct RolloutResult {
    double total_reward = 0.0;
    bool aborted = false;
    int steps = 0;
};

// Chain sampled (or mean) one-step predictions for `horizon` steps under the
// policy and accumulate rewards. Deterministic in (model, theta, seed).
RolloutResult rollout_model(const model::FittedDynamicsModel& model,
    const Eigen::VectorXd& theta, const policy::PolicyArch& arch,
    const RolloutConfig& cfg, std::uint64_t seed);

struct PolicySearchResult {
    Eigen::VectorXd theta;
    double score = 0.0;
    opt::CmaResult cma;
};

// Black-box policy optimization on the model: every CMA-ES evaluation is the
// mean of rollouts_per_eval Monte-Carlo rollouts, seeded per candidate so
// results do not depend on worker count or scheduling.
PolicySearchResult optimize_policy(const model::FittedDynamicsModel& model,
    const policy::PolicyArch& arch, const opt::CmaConfig& cma_cfg,
    const RolloutConfig& rollout_cfg, std::uint64_t master_seed);

} // namespace mbps::search

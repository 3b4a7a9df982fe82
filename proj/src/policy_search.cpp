#include <mbps/search/policy_search.hpp>

#include <cmath>

namespace mbps::search {

RolloutResult rollout_model(const model::FittedDynamicsModel& model,
    const Eigen::VectorXd& theta, const policy::PolicyArch& arch,
    const RolloutConfig& cfg, std::uint64_t seed)
{
    const int e = model.state_dim();
    Rng rng(seed);
    Eigen::VectorXd x = cfg.init_state.size() == e
        ? cfg.init_state
        : Eigen::VectorXd(pendubot::State::hanging().vec());

    RolloutResult res;
    const bool sample
        = cfg.propagation == RolloutConfig::Propagation::sample;
    for (int t = 0; t < cfg.horizon; ++t) {
        // guard before handing the state to the prior simulator
        if (!x.allFinite()
            || x.head(2).lpNorm<Eigen::Infinity>() > cfg.theta_limit
            || x.tail(2).lpNorm<Eigen::Infinity>() > cfg.omega_limit) {
            res.aborted = true;
            return res;
        }
        Eigen::VectorXd u = policy::act(theta, arch, x);
        u = u.cwiseMax(-cfg.u_max).cwiseMin(cfg.u_max);

        Eigen::VectorXd delta = sample ? model.sample_delta(x, u, rng)
                                       : model.predict_delta(x, u).mean;
        x += delta;
        res.total_reward += pendubot::reward(
            pendubot::State::from_vec(x.head<4>()), cfg.reward);
        res.steps = t + 1;
    }
    return res;
}

PolicySearchResult optimize_policy(const model::FittedDynamicsModel& model,
    const policy::PolicyArch& arch, const opt::CmaConfig& cma_cfg,
    const RolloutConfig& rollout_cfg, std::uint64_t master_seed)
{
    const int rollouts = std::max(1, rollout_cfg.rollouts_per_eval);
    opt::PopulationObjective objective
        = [&](const Eigen::VectorXd& theta, int generation, int candidate) {
              double acc = 0.0;
              for (int r = 0; r < rollouts; ++r) {
                  const std::uint64_t seed = seed_hash({master_seed,
                      static_cast<std::uint64_t>(generation),
                      static_cast<std::uint64_t>(candidate),
                      static_cast<std::uint64_t>(r)});
                  acc += rollout_model(model, theta, arch, rollout_cfg, seed)
                             .total_reward;
              }
              return acc / rollouts;
          };

    opt::CmaConfig cfg = cma_cfg;
    cfg.seed = seed_hash({master_seed, 0xc3a5u});
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(arch.param_count());
    auto cma = opt::cmaes_maximize(x0, objective, cfg);

    PolicySearchResult res;
    res.theta = cma.best_x;
    res.score = cma.best_score;
    res.cma = std::move(cma);
    return res;
}

} // namespace mbps::search

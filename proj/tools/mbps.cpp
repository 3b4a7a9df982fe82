#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <mbps/harness/curves.hpp>
#include <mbps/harness/experiment.hpp>
#include <mbps/par.hpp>
#include <mbps/search/policy_search.hpp>

using namespace mbps;

namespace {

int cmd_run(const std::string& config_path, int replicate, long seed_override,
    int workers_override)
{
    auto cfg = harness::ExperimentConfig::load(config_path);
    if (seed_override >= 0)
        cfg.master_seed = static_cast<std::uint64_t>(seed_override);
    if (workers_override > 0)
        cfg.workers = workers_override;
    par::set_workers(cfg.workers);
    cfg.cma.record_trace = true;

    int failures = 0;
    const int first = replicate >= 0 ? replicate : 0;
    const int last = replicate >= 0 ? replicate : cfg.replicates - 1;
    for (int r = first; r <= last; ++r) {
        auto results = harness::run_experiment(cfg, r);
        harness::write_run(cfg, results);
        if (results.failed) {
            ++failures;
            std::cout << cfg.variant << "/" << cfg.prior << " rep " << r
                      << ": FAILED (" << results.error << ")\n";
            continue;
        }
        double best = 0.0;
        for (const auto& e : results.episodes)
            best = std::max(best, e.reward);
        std::printf("%s/%s rep %d: best reward %.3f over %d episodes"
                    " (solved at episode %d)\n",
            cfg.variant.c_str(), cfg.prior.c_str(), r, best,
            static_cast<int>(results.episodes.size()), results.episodes_to_solve);
    }
    return failures == 0 ? 0 : 2;
}

int cmd_plot(const std::string& dir)
{
    auto files = harness::emit_curves(dir);
    for (const auto& f : files)
        std::cout << f << "\n";
    return 0;
}

int cmd_oracle(const std::string& config_path, long budget, long seed,
    const std::string& out_path)
{
    auto cfg = harness::ExperimentConfig::load(config_path);
    par::set_workers(cfg.workers);

    // the real dynamics, wrapped as a zero-variance parametric model
    auto prior = pendubot::make_prior(cfg.system_params, cfg.dt, cfg.substeps);
    auto model = model::FittedDynamicsModel::make_parametric(prior,
        prior.space.initial, pendubot::kStateDim, pendubot::kActionDim);

    opt::CmaConfig cma = cfg.cma;
    if (budget > 0)
        cma.max_evals = budget;
    auto rollout = cfg.rollout_config();
    rollout.rollouts_per_eval = 1; // deterministic model

    auto found = search::optimize_policy(model, cfg.policy_arch(), cma, rollout,
        static_cast<std::uint64_t>(seed));

    // re-check on the true system
    auto arch = cfg.policy_arch();
    auto theta = found.theta;
    auto rec = pendubot::run_episode(
        [&](const Eigen::Vector4d& x) { return policy::act(theta, arch, x)(0); },
        cfg.system_params, cfg.episode_config(), 0);

    nlohmann::json j;
    j["oracle_reward"] = rec.cumulative;
    j["model_score"] = found.score;
    j["evaluations"] = found.cma.evals;
    nlohmann::json th = nlohmann::json::array();
    for (int i = 0; i < theta.size(); ++i)
        th.push_back(theta(i));
    j["theta"] = th;
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        os << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Model-based policy search on the pendubot with tunable "
                 "simulator priors"};
    app.require_subcommand(1);

    std::string config_path, results_dir, out_path;
    int replicate = -1;
    long seed = -1;
    int workers = 0;
    long budget = 0;

    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("--config", config_path, "Config JSON")->required();
    run->add_option("--replicate", replicate, "Run only this replicate index");
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--workers", workers, "Worker threads (0 = all cores)");

    auto* plot = app.add_subcommand("plot", "Aggregate runs into curve CSVs");
    plot->add_option("--dir", results_dir, "Results directory")->required();

    auto* oracle = app.add_subcommand("oracle-reward",
        "Best achievable episode reward: optimize directly on the true dynamics");
    oracle->add_option("--config", config_path, "Config JSON")->required();
    oracle->add_option("--budget", budget, "CMA-ES evaluation budget");
    oracle->add_option("--seed", seed, "Optimizer seed")->default_val(12345);
    oracle->add_option("--out", out_path, "Also write the result JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, replicate, seed, workers);
        if (plot->parsed())
            return cmd_plot(results_dir);
        if (oracle->parsed())
            return cmd_oracle(config_path, budget, seed, out_path);
    }
    catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}

#include <mbps/harness/experiment.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include <mbps/model/learning.hpp>
#include <mbps/par.hpp>
#include <mbps/rng.hpp>
#include <mbps/search/policy_search.hpp>

namespace mbps::harness {

using nlohmann::json;

namespace {

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0)
            .count();
    }

    pendubot::Policy make_policy(const Eigen::VectorXd& theta,
        const policy::PolicyArch& arch)
    {
        return [theta, arch](const Eigen::Vector4d& x) {
            return policy::act(theta, arch, x)(0);
        };
    }

    json vector_to_json(const Eigen::VectorXd& v)
    {
        json a = json::array();
        for (int i = 0; i < v.size(); ++i)
            a.push_back(v(i));
        return a;
    }

    Eigen::VectorXd vector_from_json(const json& a)
    {
        Eigen::VectorXd v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            v(i) = a[i].get<double>();
        return v;
    }

} // namespace

RunResults run_experiment(const ExperimentConfig& cfg, int replicate)
{
    cfg.validate();
    RunResults out;
    out.variant = cfg.variant;
    out.prior = cfg.prior;
    out.replicate = replicate;
    out.master_seed = cfg.master_seed;
    out.solve_threshold = cfg.solve_threshold();

    const std::uint64_t rep_seed
        = seed_hash({cfg.master_seed, static_cast<std::uint64_t>(replicate)});
    const auto arch = cfg.policy_arch();
    const auto episode_cfg = cfg.episode_config();
    const auto rollout_cfg = cfg.rollout_config();
    const auto mode = cfg.mode();

    std::optional<model::TunableMeanPrior> prior;
    if (cfg.needs_prior())
        prior = cfg.make_prior();

    try {
        double best = -std::numeric_limits<double>::infinity();
        for (int ep = 1; ep <= cfg.episodes; ++ep) {
            EpisodeResult er;
            er.episode = ep;

            model::FittedDynamicsModel dyn_model;
            bool have_model = false;

            auto t0 = std::chrono::steady_clock::now();
            if (ep == 1) {
                if (prior) {
                    // policy for the first episode comes from the prior alone
                    dyn_model = model::FittedDynamicsModel::make_parametric(
                        *prior, prior->space.initial, pendubot::kStateDim,
                        pendubot::kActionDim);
                    have_model = true;
                }
            }
            else {
                model::ModelLearnConfig ml = cfg.model_config();
                ml.seed = seed_hash({rep_seed, 0x33u, static_cast<std::uint64_t>(ep)});
                model::IdentificationDiagnostics diag;
                dyn_model = model::learn_model(out.data,
                    prior ? &*prior : nullptr, mode, ml, &diag);
                have_model = true;
            }
            er.learn_seconds = seconds_since(t0);

            t0 = std::chrono::steady_clock::now();
            if (have_model) {
                opt::CmaConfig cma = cfg.cma;
                auto found = search::optimize_policy(dyn_model, arch, cma,
                    rollout_cfg,
                    seed_hash({rep_seed, 0x22u, static_cast<std::uint64_t>(ep)}));
                er.theta = found.theta;
                er.trace = std::move(found.cma.trace);
                if (dyn_model.has_prior()) {
                    er.phi = dyn_model.phi();
                    er.discrete_index = dyn_model.discrete_index();
                }
                er.model_fallback = dyn_model.fallback();
            }
            else {
                // no prior to optimize against: random initial policy
                Rng rng(seed_hash({rep_seed, 0x11u}));
                er.theta = rng.normal_vector(arch.param_count());
            }
            er.optimize_seconds = seconds_since(t0);

            t0 = std::chrono::steady_clock::now();
            auto record = pendubot::run_episode(make_policy(er.theta, arch),
                cfg.system_params, episode_cfg,
                seed_hash({rep_seed, 0x44u, static_cast<std::uint64_t>(ep)}));
            er.episode_seconds = seconds_since(t0);

            record.append_to(out.data);
            er.reward = record.cumulative;
            er.aborted = record.aborted;
            best = std::max(best, er.reward);
            er.best_so_far = best;
            if (out.episodes_to_solve < 0 && er.reward >= out.solve_threshold)
                out.episodes_to_solve = ep;
            out.episodes.push_back(std::move(er));
        }
    }
    catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
    }
    out.interaction_seconds
        = static_cast<double>(out.episodes.size()) * cfg.dt * cfg.horizon;
    return out;
}

json results_to_json(const RunResults& r)
{
    json j;
    j["variant"] = r.variant;
    j["prior"] = r.prior;
    j["replicate"] = r.replicate;
    j["master_seed"] = r.master_seed;
    j["interaction_seconds"] = r.interaction_seconds;
    j["solve_threshold"] = r.solve_threshold;
    j["episodes_to_solve"] = r.episodes_to_solve;
    j["failed"] = r.failed;
    j["error"] = r.error;
    json eps = json::array();
    for (const auto& e : r.episodes) {
        json je;
        je["episode"] = e.episode;
        je["reward"] = e.reward;
        je["best_so_far"] = e.best_so_far;
        je["aborted"] = e.aborted;
        je["theta"] = vector_to_json(e.theta);
        je["phi"] = vector_to_json(e.phi);
        je["discrete_index"] = e.discrete_index;
        je["model_fallback"] = e.model_fallback;
        eps.push_back(std::move(je));
    }
    j["episodes"] = std::move(eps);
    return j;
}

RunResults results_from_json(const json& j)
{
    RunResults r;
    r.variant = j.at("variant").get<std::string>();
    r.prior = j.at("prior").get<std::string>();
    r.replicate = j.at("replicate").get<int>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.interaction_seconds = j.at("interaction_seconds").get<double>();
    r.solve_threshold = j.at("solve_threshold").get<double>();
    r.episodes_to_solve = j.at("episodes_to_solve").get<int>();
    r.failed = j.at("failed").get<bool>();
    r.error = j.at("error").get<std::string>();
    for (const auto& je : j.at("episodes")) {
        EpisodeResult e;
        e.episode = je.at("episode").get<int>();
        e.reward = je.at("reward").get<double>();
        e.best_so_far = je.at("best_so_far").get<double>();
        e.aborted = je.at("aborted").get<bool>();
        e.theta = vector_from_json(je.at("theta"));
        e.phi = vector_from_json(je.at("phi"));
        e.discrete_index = je.at("discrete_index").get<int>();
        e.model_fallback = je.value("model_fallback", false);
        r.episodes.push_back(std::move(e));
    }
    return r;
}

std::string run_directory(const ExperimentConfig& cfg, int replicate)
{
    char rep[16];
    std::snprintf(rep, sizeof(rep), "rep_%03d", replicate);
    return cfg.output_dir + "/" + cfg.variant + "_" + cfg.prior + "/" + rep;
}

void write_run(const ExperimentConfig& cfg, const RunResults& results)
{
    namespace fs = std::filesystem;
    const std::string dir = run_directory(cfg, results.replicate);
    fs::create_directories(dir);

    cfg.save(dir + "/config.json");
    {
        std::ofstream os(dir + "/results.json");
        os << results_to_json(results).dump(2) << "\n";
    }
    results.data.save_csv(dir + "/transitions.csv");
    {
        std::ofstream os(dir + "/cma_trace.csv");
        os << "episode,generation,evals,best\n";
        char buf[64];
        for (const auto& e : results.episodes)
            for (const auto& p : e.trace) {
                std::snprintf(buf, sizeof(buf), "%d,%d,%ld,%.17g\n", e.episode,
                    p.generation, p.evals, p.best);
                os << buf;
            }
    }
    {
        json t;
        double learn = 0.0, opt_s = 0.0, run_s = 0.0;
        json per = json::array();
        for (const auto& e : results.episodes) {
            per.push_back({{"episode", e.episode},
                {"learn_seconds", e.learn_seconds},
                {"optimize_seconds", e.optimize_seconds},
                {"episode_seconds", e.episode_seconds}});
            learn += e.learn_seconds;
            opt_s += e.optimize_seconds;
            run_s += e.episode_seconds;
        }
        t["episodes"] = std::move(per);
        t["total_learn_seconds"] = learn;
        t["total_optimize_seconds"] = opt_s;
        t["total_episode_seconds"] = run_s;
        std::ofstream os(dir + "/timing.json");
        os << t.dump(2) << "\n";
    }
}

} // namespace mbps::harness

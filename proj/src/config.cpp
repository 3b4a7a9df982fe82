#include <mbps/harness/config.hpp>

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mbps::harness {

using nlohmann::json;

void ExperimentConfig::validate() const
{
    static const std::set<std::string> variants{
        "blackdrops", "blackdrops_prior", "blackdrops_mi", "blackdrops_gpmi"};
    static const std::set<std::string> priors{
        "none", "useful", "tunable", "misleading", "partial"};
    if (!variants.count(variant))
        throw std::invalid_argument("config: unknown variant '" + variant + "'");
    if (!priors.count(prior))
        throw std::invalid_argument("config: unknown prior '" + prior + "'");
    if (variant == "blackdrops" && prior != "none")
        throw std::invalid_argument("config: variant blackdrops requires prior=none");
    if (variant != "blackdrops" && prior == "none")
        throw std::invalid_argument(
            "config: variant " + variant + " requires a prior");
    if (episodes < 1 || replicates < 1)
        throw std::invalid_argument("config: episodes and replicates must be >= 1");
    if (horizon < 1 || dt <= 0.0 || substeps < 1)
        throw std::invalid_argument("config: bad episode timing");
    if (propagation != "sample" && propagation != "mean")
        throw std::invalid_argument("config: propagation must be sample|mean");
    system_params.validate();
    model::score_rule_from_string(score_rule);
}

double ExperimentConfig::solve_threshold() const
{
    if (oracle_reward <= 0.0)
        return std::numeric_limits<double>::infinity();
    return solve_fraction * oracle_reward;
}

model::ModelMode ExperimentConfig::mode() const
{
    if (variant == "blackdrops")
        return model::ModelMode::gp_only;
    if (variant == "blackdrops_prior")
        return model::ModelMode::gp_fixed_prior;
    if (variant == "blackdrops_mi")
        return model::ModelMode::mi_only;
    return model::ModelMode::gp_mi;
}

pendubot::Params ExperimentConfig::prior_params() const
{
    return pendubot::Params::by_name(prior);
}

model::TunableMeanPrior ExperimentConfig::make_prior() const
{
    return pendubot::make_prior(prior_params(), dt, substeps,
        prior_lower_scale, prior_upper_scale);
}

pendubot::EpisodeConfig ExperimentConfig::episode_config() const
{
    pendubot::EpisodeConfig e;
    e.steps = horizon;
    e.dt = dt;
    e.substeps = substeps;
    e.u_max = u_max;
    e.noise_sd = noise_sd;
    e.reward = reward;
    return e;
}

search::RolloutConfig ExperimentConfig::rollout_config() const
{
    search::RolloutConfig r;
    r.horizon = horizon;
    r.rollouts_per_eval = rollouts_per_eval;
    r.propagation = propagation == "mean"
        ? search::RolloutConfig::Propagation::mean
        : search::RolloutConfig::Propagation::sample;
    r.reward = reward;
    r.u_max = u_max;
    return r;
}

policy::PolicyArch ExperimentConfig::policy_arch() const
{
    return {pendubot::kStateDim, policy_hidden, pendubot::kActionDim, u_max};
}

model::ModelLearnConfig ExperimentConfig::model_config() const
{
    model::ModelLearnConfig m;
    m.kernel_opt.rprop.iterations = rprop_iterations;
    m.kernel_opt.restarts = rprop_restarts;
    m.warm_iterations = warm_iterations;
    m.max_outer_evals = max_outer_evals;
    m.outer_rel_tol = outer_rel_tol;
    m.score_rule = model::score_rule_from_string(score_rule);
    m.mi_max_evals = mi_max_evals;
    return m;
}

json ExperimentConfig::to_json() const
{
    json j;
    j["variant"] = variant;
    j["prior"] = prior;
    j["episodes"] = episodes;
    j["replicates"] = replicates;
    j["master_seed"] = master_seed;
    j["workers"] = workers;
    j["output_dir"] = output_dir;

    j["system"]["params"] = {{"m1", system_params.m1}, {"m2", system_params.m2},
        {"l1", system_params.l1}, {"l2", system_params.l2},
        {"b1", system_params.b1}, {"b2", system_params.b2}};
    j["system"]["noise_sd"]
        = {noise_sd(0), noise_sd(1), noise_sd(2), noise_sd(3)};
    j["system"]["dt"] = dt;
    j["system"]["horizon"] = horizon;
    j["system"]["substeps"] = substeps;
    j["system"]["u_max"] = u_max;

    j["reward"]["sigma_c"] = reward.sigma_c;
    j["reward"]["metric"]
        = reward.metric == pendubot::RewardConfig::Metric::tip ? "tip" : "angle";
    j["reward"]["l1"] = reward.l1;
    j["reward"]["l2"] = reward.l2;

    j["policy"]["hidden"] = policy_hidden;

    j["rollout"]["rollouts_per_eval"] = rollouts_per_eval;
    j["rollout"]["propagation"] = propagation;

    j["cma"]["sigma0"] = cma.sigma0;
    j["cma"]["lambda0"] = cma.lambda0;
    j["cma"]["max_evals"] = cma.max_evals;
    j["cma"]["lower"] = cma.lower;
    j["cma"]["upper"] = cma.upper;
    j["cma"]["bipop"] = cma.bipop;
    j["cma"]["max_restarts"] = cma.max_restarts;
    j["cma"]["top_k_reeval"] = cma.top_k_reeval;
    j["cma"]["reeval_rounds"] = cma.reeval_rounds;

    j["model"]["rprop_iterations"] = rprop_iterations;
    j["model"]["rprop_restarts"] = rprop_restarts;
    j["model"]["warm_iterations"] = warm_iterations;
    j["model"]["max_outer_evals"] = max_outer_evals;
    j["model"]["outer_rel_tol"] = outer_rel_tol;
    j["model"]["score_rule"] = score_rule;
    j["model"]["mi_max_evals"] = mi_max_evals;
    j["model"]["prior_lower_scale"] = prior_lower_scale;
    j["model"]["prior_upper_scale"] = prior_upper_scale;

    j["solve"]["oracle_reward"] = oracle_reward;
    j["solve"]["fraction"] = solve_fraction;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    ExperimentConfig c;
    c.variant = j.value("variant", c.variant);
    c.prior = j.value("prior", c.prior);
    c.episodes = j.value("episodes", c.episodes);
    c.replicates = j.value("replicates", c.replicates);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.workers = j.value("workers", c.workers);
    c.output_dir = j.value("output_dir", c.output_dir);

    if (j.contains("system")) {
        const auto& s = j.at("system");
        if (s.contains("params")) {
            const auto& p = s.at("params");
            c.system_params.m1 = p.value("m1", c.system_params.m1);
            c.system_params.m2 = p.value("m2", c.system_params.m2);
            c.system_params.l1 = p.value("l1", c.system_params.l1);
            c.system_params.l2 = p.value("l2", c.system_params.l2);
            c.system_params.b1 = p.value("b1", c.system_params.b1);
            c.system_params.b2 = p.value("b2", c.system_params.b2);
        }
        if (s.contains("noise_sd")) {
            const auto& n = s.at("noise_sd");
            for (int i = 0; i < 4; ++i)
                c.noise_sd(i) = n.at(i).get<double>();
        }
        c.dt = s.value("dt", c.dt);
        c.horizon = s.value("horizon", c.horizon);
        c.substeps = s.value("substeps", c.substeps);
        c.u_max = s.value("u_max", c.u_max);
    }
    if (j.contains("reward")) {
        const auto& r = j.at("reward");
        c.reward.sigma_c = r.value("sigma_c", c.reward.sigma_c);
        c.reward.metric = r.value("metric", std::string("tip")) == "angle"
            ? pendubot::RewardConfig::Metric::angle
            : pendubot::RewardConfig::Metric::tip;
        c.reward.l1 = r.value("l1", c.reward.l1);
        c.reward.l2 = r.value("l2", c.reward.l2);
    }
    if (j.contains("policy"))
        c.policy_hidden = j.at("policy").value("hidden", c.policy_hidden);
    if (j.contains("rollout")) {
        const auto& r = j.at("rollout");
        c.rollouts_per_eval = r.value("rollouts_per_eval", c.rollouts_per_eval);
        c.propagation = r.value("propagation", c.propagation);
    }
    if (j.contains("cma")) {
        const auto& k = j.at("cma");
        c.cma.sigma0 = k.value("sigma0", c.cma.sigma0);
        c.cma.lambda0 = k.value("lambda0", c.cma.lambda0);
        c.cma.max_evals = k.value("max_evals", c.cma.max_evals);
        c.cma.lower = k.value("lower", c.cma.lower);
        c.cma.upper = k.value("upper", c.cma.upper);
        c.cma.bipop = k.value("bipop", c.cma.bipop);
        c.cma.max_restarts = k.value("max_restarts", c.cma.max_restarts);
        c.cma.top_k_reeval = k.value("top_k_reeval", c.cma.top_k_reeval);
        c.cma.reeval_rounds = k.value("reeval_rounds", c.cma.reeval_rounds);
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        c.rprop_iterations = m.value("rprop_iterations", c.rprop_iterations);
        c.rprop_restarts = m.value("rprop_restarts", c.rprop_restarts);
        c.warm_iterations = m.value("warm_iterations", c.warm_iterations);
        c.max_outer_evals = m.value("max_outer_evals", c.max_outer_evals);
        c.outer_rel_tol = m.value("outer_rel_tol", c.outer_rel_tol);
        c.score_rule = m.value("score_rule", c.score_rule);
        c.mi_max_evals = m.value("mi_max_evals", c.mi_max_evals);
        c.prior_lower_scale = m.value("prior_lower_scale", c.prior_lower_scale);
        c.prior_upper_scale = m.value("prior_upper_scale", c.prior_upper_scale);
    }
    if (j.contains("solve")) {
        c.oracle_reward = j.at("solve").value("oracle_reward", c.oracle_reward);
        c.solve_fraction = j.at("solve").value("fraction", c.solve_fraction);
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("config: cannot open " + path);
    json j = json::parse(is);
    return from_json(j);
}

void ExperimentConfig::save(const std::string& path) const
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("config: cannot write " + path);
    os << to_json().dump(2) << "\n";
}

} // namespace mbps::harness

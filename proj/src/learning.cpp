#include <mbps/model/learning.hpp>

#include <cmath>
#include <stdexcept>

#include <mbps/par.hpp>

namespace mbps::model {

std::string to_string(ScoreRule rule)
{
    switch (rule) {
    case ScoreRule::sum:
        return "sum";
    case ScoreRule::product:
        return "product";
    case ScoreRule::harmonic:
        return "harmonic";
    }
    return "unknown";
}

ScoreRule score_rule_from_string(const std::string& s)
{
    if (s == "sum")
        return ScoreRule::sum;
    if (s == "product")
        return ScoreRule::product;
    if (s == "harmonic")
        return ScoreRule::harmonic;
    throw std::invalid_argument("unknown score rule: " + s);
}

double combine_scores(const Eigen::VectorXd& logliks, ScoreRule rule)
{
    switch (rule) {
    case ScoreRule::sum:
        return logliks.sum();
    case ScoreRule::product:
        return logliks.array().exp().prod();
    case ScoreRule::harmonic: {
        const double denom = (-logliks.array()).exp().sum();
        return logliks.size() / denom;
    }
    }
    return -std::numeric_limits<double>::infinity();
}

namespace {

    // Clamp a continuous phi into its box.
    Eigen::VectorXd clamp_phi(const Eigen::VectorXd& phi,
        const PriorParameterSpace& space)
    {
        return phi.cwiseMax(space.lower).cwiseMin(space.upper);
    }

    std::vector<gp::FittedGP> fit_dimension_gps(const TransitionDataset& data,
        const TunableMeanPrior* prior, const Eigen::VectorXd& phi,
        const std::vector<gp::KernelHyperParams>& hps)
    {
        const int e = data.state_dim();
        Eigen::MatrixXd mean_vals;
        if (prior)
            mean_vals = prior->evaluate_all(data.inputs(), phi);
        else
            mean_vals = Eigen::MatrixXd::Zero(data.size(), e);

        std::vector<gp::FittedGP> gps(e);
        par::parallel_for(e, [&](int i) {
            gp::ScalarMeanFn mean;
            if (prior) {
                const TunableMeanPrior p = *prior;
                const Eigen::VectorXd ph = phi;
                mean = [p, ph, i](const Eigen::VectorXd& x) {
                    return p.eval(x, ph)(i);
                };
            }
            else {
                mean = gp::zero_mean();
            }
            gps[i] = gp::FittedGP::fit(data.inputs(), data.target_column(i),
                mean_vals.col(i), std::move(mean), hps[i]);
        });
        return gps;
    }

} // namespace

ModelEvalResult evaluate_model(const Eigen::VectorXd& phi,
    const TransitionDataset& data, const TunableMeanPrior& prior,
    const ModelLearnConfig& cfg, const gp::LikelihoodWorkspace* workspace,
    const std::vector<gp::KernelHyperParams>* warm_start)
{
    if (data.empty())
        throw std::invalid_argument("evaluate_model: empty dataset");

    std::optional<gp::LikelihoodWorkspace> local_ws;
    if (!workspace) {
        local_ws.emplace(data.inputs());
        workspace = &*local_ws;
    }

    const int e = data.state_dim();
    const Eigen::MatrixXd mean_vals = prior.evaluate_all(data.inputs(), phi);

    ModelEvalResult res;
    res.dim_logliks = Eigen::VectorXd::Constant(
        e, -std::numeric_limits<double>::infinity());
    res.hyperparams.resize(e);
    std::vector<char> failed(e, 0);

    par::parallel_for(e, [&](int i) {
        const Eigen::VectorXd residuals
            = data.target_column(i) - mean_vals.col(i);

        gp::KernelOptConfig opt_cfg = cfg.kernel_opt;
        opt_cfg.seed = seed_hash({cfg.seed, 0xd1f5u, static_cast<std::uint64_t>(i)});
        gp::KernelHyperParams init;
        if (warm_start) {
            init = (*warm_start)[i];
            opt_cfg.restarts = 1;
            if (cfg.warm_iterations > 0)
                opt_cfg.rprop.iterations = cfg.warm_iterations;
        }
        else {
            init = gp::initial_hyperparams(data.inputs(), residuals);
        }

        auto out = gp::optimize_kernel(*workspace, residuals, init, opt_cfg);
        if (out.all_failed) {
            failed[i] = 1;
            return;
        }
        res.hyperparams[i] = out.hp;
        res.dim_logliks(i) = out.loglik;
    });

    for (int i = 0; i < e; ++i)
        if (failed[i])
            return res; // score stays -inf

    res.ok = true;
    res.score = combine_scores(res.dim_logliks, cfg.score_rule);
    return res;
}

FittedDynamicsModel gp_mi(const TransitionDataset& data,
    const TunableMeanPrior& prior, const ModelLearnConfig& cfg,
    IdentificationDiagnostics* diag)
{
    if (data.empty())
        throw std::invalid_argument("gp_mi: empty dataset");
    prior.space.validate();

    const gp::LikelihoodWorkspace ws(data.inputs());

    Eigen::VectorXd best_phi;
    double best_score = -std::numeric_limits<double>::infinity();
    std::vector<gp::KernelHyperParams> best_hps;
    int best_index = -1;
    int outer_evals = 0;

    if (prior.space.kind == PriorParameterSpace::Kind::discrete) {
        const int n = static_cast<int>(prior.space.candidates.size());
        std::vector<ModelEvalResult> results(n);
        // exhaustive, each candidate exactly once
        par::parallel_for(n, [&](int c) {
            results[c] = evaluate_model(
                prior.space.candidates[c], data, prior, cfg, &ws, nullptr);
        });
        outer_evals = n;
        for (int c = 0; c < n; ++c) {
            if (diag)
                diag->candidate_scores.push_back(results[c].score);
            if (results[c].ok && results[c].score > best_score) {
                best_score = results[c].score;
                best_phi = prior.space.candidates[c];
                best_hps = results[c].hyperparams;
                best_index = c;
            }
        }
    }
    else {
        std::vector<gp::KernelHyperParams> warm;
        opt::BoxObjective score_fn = [&](const Eigen::VectorXd& phi) {
            auto res = evaluate_model(clamp_phi(phi, prior.space), data, prior,
                cfg, &ws, warm.empty() ? nullptr : &warm);
            ++outer_evals;
            if (res.ok) {
                warm = res.hyperparams;
                if (res.score > best_score) {
                    best_score = res.score;
                    best_phi = clamp_phi(phi, prior.space);
                    best_hps = res.hyperparams;
                }
            }
            return res.score;
        };

        opt::LocalSearchConfig ls;
        ls.max_evals = cfg.max_outer_evals;
        ls.init_scale = cfg.outer_init_scale;
        ls.rel_tol = cfg.outer_rel_tol;
        auto run = opt::subplex_maximize(score_fn, prior.space.initial,
            prior.space.lower, prior.space.upper, ls);
        if (diag)
            diag->best_trace = run.best_trace;
    }

    if (diag)
        diag->outer_evaluations = outer_evals;

    if (!std::isfinite(best_score)) {
        // identification failed everywhere: fall back to the prior as-is
        auto model = learn_model(data, &prior, ModelMode::gp_fixed_prior, cfg);
        model.mark_fallback();
        return model;
    }

    auto gps = fit_dimension_gps(data, &prior, best_phi, best_hps);
    auto model = FittedDynamicsModel::make_gp(ModelMode::gp_mi, prior, best_phi,
        std::move(gps), data.state_dim(), data.action_dim());
    model.set_discrete_index(best_index);
    return model;
}

double identification_mse(const Eigen::VectorXd& phi,
    const TransitionDataset& data, const TunableMeanPrior& prior)
{
    const Eigen::MatrixXd mean_vals = prior.evaluate_all(data.inputs(), phi);
    return (data.targets() - mean_vals).squaredNorm() / double(data.size());
}

FittedDynamicsModel mi_mse(const TransitionDataset& data,
    const TunableMeanPrior& prior, const ModelLearnConfig& cfg,
    IdentificationDiagnostics* diag)
{
    if (data.empty())
        throw std::invalid_argument("mi_mse: empty dataset");
    prior.space.validate();

    Eigen::VectorXd best_phi;
    double best = -std::numeric_limits<double>::infinity();
    int best_index = -1;
    int outer_evals = 0;

    if (prior.space.kind == PriorParameterSpace::Kind::discrete) {
        const int n = static_cast<int>(prior.space.candidates.size());
        std::vector<double> scores(n);
        par::parallel_for(n, [&](int c) {
            scores[c] = -identification_mse(prior.space.candidates[c], data, prior);
        });
        outer_evals = n;
        for (int c = 0; c < n; ++c) {
            if (diag)
                diag->candidate_scores.push_back(scores[c]);
            if (scores[c] > best) {
                best = scores[c];
                best_phi = prior.space.candidates[c];
                best_index = c;
            }
        }
    }
    else {
        opt::BoxObjective fn = [&](const Eigen::VectorXd& phi) {
            ++outer_evals;
            return -identification_mse(clamp_phi(phi, prior.space), data, prior);
        };
        opt::LocalSearchConfig ls;
        ls.max_evals = cfg.mi_max_evals;
        ls.init_scale = cfg.outer_init_scale;
        ls.rel_tol = cfg.mi_rel_tol;
        auto run = opt::subplex_maximize(fn, prior.space.initial,
            prior.space.lower, prior.space.upper, ls);
        best_phi = run.best_x;
        best = run.best_value;
        if (diag)
            diag->best_trace = run.best_trace;
    }

    if (diag)
        diag->outer_evaluations = outer_evals;

    auto model = FittedDynamicsModel::make_parametric(prior, best_phi,
        data.state_dim(), data.action_dim());
    model.set_discrete_index(best_index);
    return model;
}

FittedDynamicsModel learn_model(const TransitionDataset& data,
    const TunableMeanPrior* prior, ModelMode mode, const ModelLearnConfig& cfg,
    IdentificationDiagnostics* diag)
{
    if (data.empty())
        throw std::invalid_argument("learn_model: empty dataset");
    if (mode != ModelMode::gp_only && !prior)
        throw std::invalid_argument("learn_model: mode requires a prior");

    switch (mode) {
    case ModelMode::gp_mi:
        return gp_mi(data, *prior, cfg, diag);
    case ModelMode::mi_only:
        return mi_mse(data, *prior, cfg, diag);
    case ModelMode::gp_only:
    case ModelMode::gp_fixed_prior: {
        const int e = data.state_dim();
        Eigen::VectorXd phi;
        Eigen::MatrixXd mean_vals;
        if (mode == ModelMode::gp_fixed_prior) {
            phi = prior->space.kind == PriorParameterSpace::Kind::discrete
                ? prior->space.candidates.front()
                : prior->space.initial;
            mean_vals = prior->evaluate_all(data.inputs(), phi);
        }
        else {
            mean_vals = Eigen::MatrixXd::Zero(data.size(), e);
        }

        const gp::LikelihoodWorkspace ws(data.inputs());
        std::vector<gp::KernelHyperParams> hps(e);
        par::parallel_for(e, [&](int i) {
            const Eigen::VectorXd residuals
                = data.target_column(i) - mean_vals.col(i);
            gp::KernelOptConfig opt_cfg = cfg.kernel_opt;
            opt_cfg.seed
                = seed_hash({cfg.seed, 0xa9c3u, static_cast<std::uint64_t>(i)});
            auto out = gp::optimize_kernel(ws, residuals,
                gp::initial_hyperparams(data.inputs(), residuals), opt_cfg);
            hps[i] = out.hp;
        });

        std::optional<TunableMeanPrior> p;
        if (mode == ModelMode::gp_fixed_prior)
            p = *prior;
        auto gps = fit_dimension_gps(data,
            mode == ModelMode::gp_fixed_prior ? prior : nullptr, phi, hps);
        return FittedDynamicsModel::make_gp(mode, std::move(p), std::move(phi),
            std::move(gps), e, data.action_dim());
    }
    }
    throw std::logic_error("learn_model: unreachable");
}

} // namespace mbps::model

#pragma once

#include <optional>
#include <limits>
#include <vector>

#include <mbps/dataset.hpp>
#include <mbps/gp/likelihood.hpp>
#include <mbps/model/dynamics_model.hpp>
#include <mbps/model/prior.hpp>
#include <mbps/opt/nelder_mead.hpp>

namespace mbps::model {

// How the per-dimension marginal likelihoods combine into the outer score.
// `sum` adds the log-likelihoods (default, numerically stable); `product`
// multiplies the plain densities and `harmonic` takes their harmonic mean,
// both of which degrade over many points.
enum class ScoreRule { sum, product, harmonic };

std::string to_string(ScoreRule rule);
ScoreRule score_rule_from_string(const std::string& s);

// Combine per-dimension log-likelihoods under a rule. product and harmonic
// work on the plain densities, so they saturate once exp(loglik) leaves the
// representable range; that failure mode is why sum is the default.
double combine_scores(const Eigen::VectorXd& dim_logliks, ScoreRule rule);

struct ModelLearnConfig {
    gp::KernelOptConfig kernel_opt; // cold-start inner optimization
    int warm_iterations = 100;      // Rprop budget once warm-started
    int max_outer_evals = 50;
    double outer_rel_tol = 1e-4;
    double outer_init_scale = 0.1; // simplex scale, fraction of bound range
    ScoreRule score_rule = ScoreRule::sum;

    // model identification (MSE) outer search
    int mi_max_evals = 2000;
    double mi_rel_tol = 1e-10;

    std::uint64_t seed = 0x51a3bd72c9e8f014ULL;
};

struct ModelEvalResult {
    double score = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd dim_logliks;
    std::vector<gp::KernelHyperParams> hyperparams;
    bool ok = false;
};

// Algorithm: fix phi, optimize each dimension's kernel by Rprop, score the
// combination of the per-dimension likelihoods. `workspace` and `warm_start`
// are optional reuse handles for repeated calls on the same dataset.
ModelEvalResult evaluate_model(const Eigen::VectorXd& phi,
    const TransitionDataset& data, const TunableMeanPrior& prior,
    const ModelLearnConfig& cfg,
    const gp::LikelihoodWorkspace* workspace = nullptr,
    const std::vector<gp::KernelHyperParams>* warm_start = nullptr);

struct IdentificationDiagnostics {
    int outer_evaluations = 0;
    std::vector<double> candidate_scores; // discrete spaces only
    std::vector<double> best_trace;
};

// Nested identification: derivative-free outer search over phi (exhaustive
// for discrete spaces), Rprop inner search over kernel hyperparameters.
FittedDynamicsModel gp_mi(const TransitionDataset& data,
    const TunableMeanPrior& prior, const ModelLearnConfig& cfg,
    IdentificationDiagnostics* diag = nullptr);

// Mean-squared-error identification over the same space; the result has no
// GP residual and zero predictive variance.
FittedDynamicsModel mi_mse(const TransitionDataset& data,
    const TunableMeanPrior& prior, const ModelLearnConfig& cfg,
    IdentificationDiagnostics* diag = nullptr);

double identification_mse(const Eigen::VectorXd& phi,
    const TransitionDataset& data, const TunableMeanPrior& prior);

// Dispatch on mode; `prior` may be null only for gp_only.
FittedDynamicsModel learn_model(const TransitionDataset& data,
    const TunableMeanPrior* prior, ModelMode mode, const ModelLearnConfig& cfg,
    IdentificationDiagnostics* diag = nullptr);

} // namespace mbps::model

#pragma once

#include <functional>
#include <stdexcept>

#include <Eigen/Core>

#include <mbps/gp/kernel.hpp>

namespace mbps::gp {

struct FitFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ScalarMeanFn = std::function<double(const Eigen::VectorXd&)>;

ScalarMeanFn zero_mean();

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

// Exact GP regression for one output dimension with an arbitrary fixed mean
// function. Immutable after fit(); concurrent predict() calls are safe.
class FittedGP {
public:
    FittedGP() = default;

    // Throws FitFailure if K + sigma_n^2 I stays non-positive-definite after
    // jitter escalation. The mean is evaluated at every training input.
    static FittedGP fit(const Eigen::MatrixXd& inputs,
        const Eigen::VectorXd& targets, ScalarMeanFn mean,
        const KernelHyperParams& hp);

    // Same, with the mean values at the training inputs already computed
    // (shared prior evaluations across output dimensions).
    static FittedGP fit(const Eigen::MatrixXd& inputs,
        const Eigen::VectorXd& targets, const Eigen::VectorXd& mean_at_inputs,
        ScalarMeanFn mean, const KernelHyperParams& hp);

    Prediction predict(const Eigen::VectorXd& query) const;
    Prediction predict_given_mean(const Eigen::VectorXd& query,
        double mean_at_query) const;

    int size() const { return static_cast<int>(_inputs.rows()); }
    int input_dim() const { return static_cast<int>(_inputs.cols()); }
    bool fitted() const { return size() > 0; }

    const Eigen::MatrixXd& inputs() const { return _inputs; }
    const KernelHyperParams& hyperparams() const { return _hp; }
    const Eigen::MatrixXd& chol_factor() const { return _chol; }
    const Eigen::VectorXd& alpha() const { return _alpha; }
    double jitter() const { return _jitter; }
    double noise_variance() const { return _hp.noise_var(); }
    double mean_at(const Eigen::VectorXd& query) const { return _mean(query); }

private:
    Eigen::MatrixXd _inputs;
    Eigen::MatrixXd _scaled; // inputs with each column divided by its lengthscale
    Eigen::VectorXd _scaled_sqnorm;
    KernelHyperParams _hp;
    ScalarMeanFn _mean;
    Eigen::MatrixXd _chol; // lower factor of K + sigma_n^2 I + jitter I
    Eigen::VectorXd _alpha;
    double _jitter = 0.0;

    void kernel_vector(const Eigen::VectorXd& query, Eigen::VectorXd& out) const;
};

// Prior prediction for an empty dataset: mean M(query), variance sigma_f^2.
Prediction predict_prior(const ScalarMeanFn& mean, const KernelHyperParams& hp,
    const Eigen::VectorXd& query);

// Dense kernel matrix (no noise, no jitter), parallel over columns.
void kernel_matrix(const Eigen::MatrixXd& inputs, const KernelHyperParams& hp,
    Eigen::MatrixXd& out);

} // namespace mbps::gp

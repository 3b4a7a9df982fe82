#pragma once

#include <Eigen/Core>

#include <mbps/gp/kernel.hpp>
#include <mbps/policy/nn_policy.hpp>

namespace mbps::reference {

// Naive serial implementations kept as oracles for the optimized parallel
// paths. They trade speed for being obviously correct: explicit loops,
// direct matrix inversion, no factorization reuse.

// Entry-by-entry kernel matrix via kernel_eval.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs,
    const gp::KernelHyperParams& hp);

// GP posterior through an explicit inverse of K + sigma_n^2 I (+ the same
// base jitter the fitted path uses).
struct DirectPrediction {
    double mean;
    double variance;
};
DirectPrediction gp_predict_direct(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& residuals, const gp::KernelHyperParams& hp,
    const Eigen::VectorXd& query);

// Log marginal likelihood via explicit inverse and determinant.
double log_marginal_likelihood_direct(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& residuals, const gp::KernelHyperParams& hp);

// Scalar-loop forward pass of the tanh policy network.
Eigen::VectorXd nn_forward(const Eigen::VectorXd& theta,
    const policy::PolicyArch& arch, const Eigen::VectorXd& x);

} // namespace mbps::reference

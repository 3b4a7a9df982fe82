#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include <mbps/gp/gp.hpp>
#include <mbps/gp/kernel.hpp>
#include <mbps/opt/rprop.hpp>

namespace mbps::gp {

// Per-dimension squared distance matrices for one input set. Built once and
// shared across hyperparameter evaluations and output dimensions.
class LikelihoodWorkspace {
public:
    explicit LikelihoodWorkspace(const Eigen::MatrixXd& inputs);

    int size() const { return static_cast<int>(_inputs.rows()); }
    int input_dim() const { return static_cast<int>(_inputs.cols()); }
    const Eigen::MatrixXd& inputs() const { return _inputs; }
    const Eigen::MatrixXd& sq_dist(int dim) const { return _sq_dist[dim]; }

    void kernel_matrix(const KernelHyperParams& hp, Eigen::MatrixXd& out) const;

private:
    Eigen::MatrixXd _inputs;
    std::vector<Eigen::MatrixXd> _sq_dist;
};

struct LikelihoodEval {
    double value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad; // w.r.t. [log ls..., log sigma_f, log sigma_n]
    bool ok = false;      // false: Cholesky failed, value is the -inf sentinel
};

// Log marginal likelihood of the residuals (targets minus mean) under the
// kernel, with the analytic gradient in log space when requested.
LikelihoodEval log_marginal_likelihood(const LikelihoodWorkspace& ws,
    const Eigen::VectorXd& residuals, const KernelHyperParams& hp,
    bool want_grad = true);

// Convenience form matching the (data, mean, hp) contract.
LikelihoodEval log_marginal_likelihood(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets, const ScalarMeanFn& mean,
    const KernelHyperParams& hp, bool want_grad = true);

struct KernelOptConfig {
    opt::RpropConfig rprop;
    int restarts = 3;          // total starts, the first from the given init
    double restart_sd = 0.7;   // log-space perturbation of the init
    std::uint64_t seed = 0x6b7a1d9f2c3e4a55ULL;
};

struct KernelOptResult {
    KernelHyperParams hp;
    double loglik = -std::numeric_limits<double>::infinity();
    bool all_failed = false; // every start hit the -inf sentinel; hp == init
    int evaluations = 0;
};

// Rprop maximization of the marginal likelihood over kernel hyperparameters.
KernelOptResult optimize_kernel(const LikelihoodWorkspace& ws,
    const Eigen::VectorXd& residuals, const KernelHyperParams& init,
    const KernelOptConfig& cfg);

KernelOptResult optimize_kernel(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets, const ScalarMeanFn& mean,
    const KernelHyperParams& init, const KernelOptConfig& cfg);

} // namespace mbps::gp

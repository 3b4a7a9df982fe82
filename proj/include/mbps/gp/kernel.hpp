#pragma once

#include <Eigen/Core>

namespace mbps::gp {

// Squared-exponential ARD kernel hyperparameters, stored in log space so
// every effective value stays strictly positive.
struct KernelHyperParams {
    Eigen::VectorXd log_lengthscales; // one per input dimension
    double log_signal_sd = 0.0;
    double log_noise_sd = -4.6051701859880914; // log(0.01)

    int input_dim() const { return static_cast<int>(log_lengthscales.size()); }
    Eigen::ArrayXd lengthscales() const { return log_lengthscales.array().exp(); }
    double signal_sd() const { return std::exp(log_signal_sd); }
    double signal_var() const { return std::exp(2.0 * log_signal_sd); }
    double noise_sd() const { return std::exp(log_noise_sd); }
    double noise_var() const { return std::exp(2.0 * log_noise_sd); }

    // Flat layout [log ls..., log sigma_f, log sigma_n] used by optimizers
    // and gradients.
    Eigen::VectorXd pack() const;
    static KernelHyperParams unpack(const Eigen::VectorXd& v);

    static KernelHyperParams defaults(int input_dim);
};

// Data-scaled starting point: lengthscales from per-dimension input spread,
// signal from target spread, noise at 1% of signal.
KernelHyperParams initial_hyperparams(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets);

double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
    const KernelHyperParams& hp);

// Relative jitter added to the diagonal before factorizing, and the cap the
// escalation (x10 per retry) is allowed to reach.
inline constexpr double kJitterRel = 1e-8;
inline constexpr double kJitterRelMax = 1e-2;

} // namespace mbps::gp

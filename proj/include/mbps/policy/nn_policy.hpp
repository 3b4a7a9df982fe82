#pragma once

#include <Eigen/Core>

namespace mbps::policy {

// One-hidden-layer tanh network with a tanh-squashed, scaled output.
struct PolicyArch {
    int n_in = 4;
    int n_hidden = 10;
    int n_out = 1;
    double u_max = 3.5;

    int param_count() const
    {
        return (n_in + 1) * n_hidden + (n_hidden + 1) * n_out;
    }
};

// u = u_max * tanh(W2 tanh(W1 x + b1) + b2). theta packs
// [W1 row-major, b1, W2 row-major, b2].
Eigen::VectorXd act(const Eigen::VectorXd& theta, const PolicyArch& arch,
    const Eigen::VectorXd& x);

} // namespace mbps::policy

#include <mbps/gp/reference.hpp>

#include <cmath>

#include <Eigen/Dense>

namespace mbps::reference {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs,
    const gp::KernelHyperParams& hp)
{
    const int t = static_cast<int>(inputs.rows());
    Eigen::MatrixXd k(t, t);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
            k(i, j) = gp::kernel_eval(
                inputs.row(i).transpose(), inputs.row(j).transpose(), hp);
    return k;
}

DirectPrediction gp_predict_direct(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& residuals, const gp::KernelHyperParams& hp,
    const Eigen::VectorXd& query)
{
    const int t = static_cast<int>(inputs.rows());
    Eigen::MatrixXd kn = kernel_matrix(inputs, hp);
    kn.diagonal().array() += hp.noise_var() + gp::kJitterRel * hp.signal_var();
    Eigen::MatrixXd kn_inv = kn.inverse();

    Eigen::VectorXd kvec(t);
    for (int i = 0; i < t; ++i)
        kvec(i) = gp::kernel_eval(inputs.row(i).transpose(), query, hp);

    DirectPrediction p;
    p.mean = kvec.dot(kn_inv * residuals);
    p.variance = hp.signal_var() - kvec.dot(kn_inv * kvec);
    return p;
}

double log_marginal_likelihood_direct(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& residuals, const gp::KernelHyperParams& hp)
{
    const int t = static_cast<int>(inputs.rows());
    Eigen::MatrixXd kn = kernel_matrix(inputs, hp);
    kn.diagonal().array() += hp.noise_var() + gp::kJitterRel * hp.signal_var();
    const double logdet = std::log(kn.determinant());
    return -0.5 * residuals.dot(kn.inverse() * residuals) - 0.5 * logdet
        - 0.5 * t * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd nn_forward(const Eigen::VectorXd& theta,
    const policy::PolicyArch& arch, const Eigen::VectorXd& x)
{
    int at = 0;
    std::vector<double> hidden(arch.n_hidden, 0.0);
    for (int i = 0; i < arch.n_hidden; ++i)
        for (int j = 0; j < arch.n_in; ++j)
            hidden[i] += theta(at++) * x(j);
    for (int i = 0; i < arch.n_hidden; ++i)
        hidden[i] = std::tanh(hidden[i] + theta(at + i));
    at += arch.n_hidden;

    Eigen::VectorXd out(arch.n_out);
    for (int i = 0; i < arch.n_out; ++i) {
        double acc = 0.0;
        for (int j = 0; j < arch.n_hidden; ++j)
            acc += theta(at++) * hidden[j];
        out(i) = acc;
    }
    for (int i = 0; i < arch.n_out; ++i)
        out(i) = arch.u_max * std::tanh(out(i) + theta(at + i));
    return out;
}

} // namespace mbps::reference

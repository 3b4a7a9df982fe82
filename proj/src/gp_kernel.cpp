#include <mbps/gp/kernel.hpp>

#include <cmath>
#include <stdexcept>

namespace mbps::gp {

Eigen::VectorXd KernelHyperParams::pack() const
{
    Eigen::VectorXd v(input_dim() + 2);
    v.head(input_dim()) = log_lengthscales;
    v(input_dim()) = log_signal_sd;
    v(input_dim() + 1) = log_noise_sd;
    return v;
}

KernelHyperParams KernelHyperParams::unpack(const Eigen::VectorXd& v)
{
    if (v.size() < 3)
        throw std::invalid_argument("KernelHyperParams::unpack: vector too short");
    KernelHyperParams hp;
    hp.log_lengthscales = v.head(v.size() - 2);
    hp.log_signal_sd = v(v.size() - 2);
    hp.log_noise_sd = v(v.size() - 1);
    return hp;
}

KernelHyperParams KernelHyperParams::defaults(int input_dim)
{
    KernelHyperParams hp;
    hp.log_lengthscales = Eigen::VectorXd::Zero(input_dim);
    return hp;
}

KernelHyperParams initial_hyperparams(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets)
{
    const int d = static_cast<int>(inputs.cols());
    const int t = static_cast<int>(inputs.rows());
    KernelHyperParams hp = KernelHyperParams::defaults(d);
    if (t >= 2) {
        Eigen::RowVectorXd mean = inputs.colwise().mean();
        Eigen::VectorXd sd
            = ((inputs.rowwise() - mean).colwise().squaredNorm() / double(t - 1))
                  .cwiseSqrt()
                  .transpose();
        for (int j = 0; j < d; ++j)
            hp.log_lengthscales(j) = sd(j) > 1e-12 ? std::log(sd(j)) : 0.0;
        double ymean = targets.mean();
        double ysd = std::sqrt(
            (targets.array() - ymean).square().sum() / double(t - 1));
        hp.log_signal_sd = ysd > 1e-12 ? std::log(ysd) : 0.0;
    }
    hp.log_noise_sd = hp.log_signal_sd + std::log(0.01);
    return hp;
}

double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
    const KernelHyperParams& hp)
{
    if (a.size() != b.size() || a.size() != hp.input_dim())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    if (!a.allFinite() || !b.allFinite())
        throw std::invalid_argument("kernel_eval: non-finite input");
    const Eigen::ArrayXd ls = hp.lengthscales();
    const double d2 = ((a - b).array() / ls).square().sum();
    return hp.signal_var() * std::exp(-0.5 * d2);
}

} // namespace mbps::gp

#include <mbps/policy/nn_policy.hpp>

#include <stdexcept>

namespace mbps::policy {

Eigen::VectorXd act(const Eigen::VectorXd& theta, const PolicyArch& arch,
    const Eigen::VectorXd& x)
{
    if (theta.size() != arch.param_count())
        throw std::invalid_argument("policy::act: wrong parameter count");
    if (x.size() != arch.n_in)
        throw std::invalid_argument("policy::act: wrong input size");

    using MatMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
        Eigen::Dynamic, Eigen::RowMajor>>;
    const double* p = theta.data();
    MatMap w1(p, arch.n_hidden, arch.n_in);
    p += arch.n_hidden * arch.n_in;
    Eigen::Map<const Eigen::VectorXd> b1(p, arch.n_hidden);
    p += arch.n_hidden;
    MatMap w2(p, arch.n_out, arch.n_hidden);
    p += arch.n_out * arch.n_hidden;
    Eigen::Map<const Eigen::VectorXd> b2(p, arch.n_out);

    Eigen::VectorXd hidden = ((w1 * x + b1).array().tanh()).matrix();
    return arch.u_max * ((w2 * hidden + b2).array().tanh()).matrix();
}

} // namespace mbps::policy

#include <mbps/gp/gp.hpp>

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <mbps/par.hpp>

namespace mbps::gp {

ScalarMeanFn zero_mean()
{
    return [](const Eigen::VectorXd&) { return 0.0; };
}

namespace {

    // Scale each input dimension by 1/lengthscale; squared distances then
    // reduce to sqnorms and one matrix product.
    Eigen::MatrixXd scale_inputs(const Eigen::MatrixXd& x,
        const KernelHyperParams& hp)
    {
        Eigen::ArrayXd inv_ls = hp.lengthscales().inverse();
        return x.array().rowwise() * inv_ls.transpose();
    }

} // namespace

void kernel_matrix(const Eigen::MatrixXd& inputs, const KernelHyperParams& hp,
    Eigen::MatrixXd& out)
{
    const int t = static_cast<int>(inputs.rows());
    const double sf2 = hp.signal_var();
    Eigen::MatrixXd scaled = scale_inputs(inputs, hp);
    Eigen::VectorXd sq = scaled.rowwise().squaredNorm();
    out.noalias() = scaled * scaled.transpose();
    par::parallel_for(t, [&](int j) {
        out.col(j) = (sf2
            * (-0.5
                * (sq.array() + sq(j) - 2.0 * out.col(j).array()).max(0.0))
                  .exp())
                         .matrix();
    });
}

FittedGP FittedGP::fit(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets, ScalarMeanFn mean,
    const KernelHyperParams& hp)
{
    Eigen::VectorXd mean_vals(inputs.rows());
    for (int i = 0; i < inputs.rows(); ++i)
        mean_vals(i) = mean(inputs.row(i).transpose());
    return fit(inputs, targets, mean_vals, std::move(mean), hp);
}

FittedGP FittedGP::fit(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets, const Eigen::VectorXd& mean_at_inputs,
    ScalarMeanFn mean, const KernelHyperParams& hp)
{
    const int t = static_cast<int>(inputs.rows());
    if (t == 0)
        throw std::invalid_argument("FittedGP::fit: empty dataset");
    if (inputs.cols() != hp.input_dim())
        throw std::invalid_argument("FittedGP::fit: dimension mismatch");
    if (targets.size() != t || mean_at_inputs.size() != t)
        throw std::invalid_argument("FittedGP::fit: target size mismatch");

    FittedGP gp;
    gp._inputs = inputs;
    gp._hp = hp;
    gp._mean = std::move(mean);
    gp._scaled = scale_inputs(inputs, hp);
    gp._scaled_sqnorm = gp._scaled.rowwise().squaredNorm();

    Eigen::MatrixXd k(t, t);
    kernel_matrix(inputs, hp, k);

    const double sf2 = hp.signal_var();
    const double sn2 = hp.noise_var();
    Eigen::VectorXd residuals = targets - mean_at_inputs;

    if (!k.allFinite() || !residuals.allFinite())
        throw FitFailure("FittedGP::fit: non-finite kernel matrix or residuals");

    double jitter = kJitterRel * sf2;
    Eigen::LLT<Eigen::MatrixXd> llt;
    while (true) {
        Eigen::MatrixXd kn = k;
        kn.diagonal().array() += sn2 + jitter;
        llt.compute(kn);
        if (llt.info() == Eigen::Success) {
            gp._chol = llt.matrixL();
            break;
        }
        jitter *= 10.0;
        if (jitter > kJitterRelMax * sf2 * (1.0 + 1e-12))
            throw FitFailure("FittedGP::fit: matrix not positive definite after "
                             "jitter escalation (t="
                + std::to_string(t)
                + ", log_sf=" + std::to_string(hp.log_signal_sd)
                + ", log_sn=" + std::to_string(hp.log_noise_sd) + ")");
    }
    gp._jitter = jitter;
    gp._alpha = llt.solve(residuals);
    return gp;
}

void FittedGP::kernel_vector(const Eigen::VectorXd& query,
    Eigen::VectorXd& out) const
{
    Eigen::ArrayXd inv_ls = _hp.lengthscales().inverse();
    Eigen::VectorXd qs = (query.array() * inv_ls).matrix();
    const double qnorm = qs.squaredNorm();
    out.noalias() = _scaled * qs;
    out = (_hp.signal_var()
        * (-0.5 * (_scaled_sqnorm.array() + qnorm - 2.0 * out.array()).max(0.0))
              .exp())
              .matrix();
}

Prediction FittedGP::predict_given_mean(const Eigen::VectorXd& query,
    double mean_at_query) const
{
    if (query.size() != input_dim())
        throw std::invalid_argument("FittedGP::predict: dimension mismatch");

    thread_local Eigen::VectorXd k;
    kernel_vector(query, k);

    Prediction p;
    p.mean = mean_at_query + k.dot(_alpha);

    thread_local Eigen::VectorXd v;
    v = k;
    _chol.triangularView<Eigen::Lower>().solveInPlace(v);
    p.variance = std::max(0.0, _hp.signal_var() - v.squaredNorm());
    return p;
}

Prediction FittedGP::predict(const Eigen::VectorXd& query) const
{
    if (!fitted())
        throw std::logic_error("FittedGP::predict: not fitted");
    return predict_given_mean(query, _mean(query));
}

Prediction predict_prior(const ScalarMeanFn& mean, const KernelHyperParams& hp,
    const Eigen::VectorXd& query)
{
    if (query.size() != hp.input_dim())
        throw std::invalid_argument("predict_prior: dimension mismatch");
    return {mean(query), hp.signal_var()};
}

} // namespace mbps::gp

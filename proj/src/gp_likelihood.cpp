#include <mbps/gp/likelihood.hpp>

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <mbps/par.hpp>
#include <mbps/rng.hpp>

namespace mbps::gp {

LikelihoodWorkspace::LikelihoodWorkspace(const Eigen::MatrixXd& inputs)
    : _inputs(inputs)
{
    const int t = size();
    const int d = input_dim();
    _sq_dist.resize(d);
    for (int k = 0; k < d; ++k) {
        _sq_dist[k].resize(t, t);
        const auto col = inputs.col(k);
        par::parallel_for(t, [&, k](int j) {
            _sq_dist[k].col(j) = (col.array() - col(j)).square().matrix();
        });
    }
}

void LikelihoodWorkspace::kernel_matrix(const KernelHyperParams& hp,
    Eigen::MatrixXd& out) const
{
    const int t = size();
    const int d = input_dim();
    const Eigen::ArrayXd inv2 = hp.lengthscales().square().inverse();
    const double sf2 = hp.signal_var();
    out.resize(t, t);
    par::parallel_for(t, [&](int j) {
        Eigen::ArrayXd acc = _sq_dist[0].col(j).array() * inv2(0);
        for (int k = 1; k < d; ++k)
            acc += _sq_dist[k].col(j).array() * inv2(k);
        out.col(j) = (sf2 * (-0.5 * acc).exp()).matrix();
    });
}

LikelihoodEval log_marginal_likelihood(const LikelihoodWorkspace& ws,
    const Eigen::VectorXd& residuals, const KernelHyperParams& hp,
    bool want_grad)
{
    const int t = ws.size();
    const int d = ws.input_dim();
    LikelihoodEval out;
    if (t == 0 || residuals.size() != t)
        throw std::invalid_argument("log_marginal_likelihood: bad residual size");
    if (hp.input_dim() != d)
        throw std::invalid_argument("log_marginal_likelihood: dimension mismatch");

    const double sf2 = hp.signal_var();
    const double sn2 = hp.noise_var();
    const double jitter = kJitterRel * sf2;

    Eigen::MatrixXd kn;
    ws.kernel_matrix(hp, kn);
    kn.diagonal().array() += sn2 + jitter;
    if (!kn.allFinite())
        return out; // -inf sentinel

    Eigen::LLT<Eigen::MatrixXd> llt(kn);
    if (llt.info() != Eigen::Success)
        return out;

    Eigen::VectorXd alpha = llt.solve(residuals);
    const Eigen::MatrixXd& l = llt.matrixLLT();
    double logdet = 0.0;
    for (int i = 0; i < t; ++i)
        logdet += std::log(l(i, i));

    out.value = -0.5 * residuals.dot(alpha) - logdet
        - 0.5 * t * std::log(2.0 * std::numbers::pi);
    if (!std::isfinite(out.value)) {
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.ok = true;
    if (!want_grad)
        return out;

    // P = alpha alpha^T - K~^{-1}; d/dpsi = 0.5 tr(P dK~/dpsi)
    Eigen::MatrixXd p = llt.solve(Eigen::MatrixXd::Identity(t, t));
    p.noalias() -= alpha * alpha.transpose();
    p = -p;

    const double trace_p = p.trace();
    // elementwise P*(K + jitter I); the noise part of the diagonal enters
    // only through the sigma_n term below
    kn.diagonal().array() -= sn2;
    Eigen::MatrixXd pk = p.cwiseProduct(kn);

    out.grad.resize(d + 2);
    const Eigen::ArrayXd inv2 = hp.lengthscales().square().inverse();
    for (int k = 0; k < d; ++k)
        out.grad(k) = 0.5 * inv2(k) * pk.cwiseProduct(ws.sq_dist(k)).sum();
    out.grad(d) = pk.sum();            // d/d log sigma_f
    out.grad(d + 1) = sn2 * trace_p;   // d/d log sigma_n
    return out;
}

LikelihoodEval log_marginal_likelihood(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets, const ScalarMeanFn& mean,
    const KernelHyperParams& hp, bool want_grad)
{
    Eigen::VectorXd residuals(targets.size());
    for (int i = 0; i < inputs.rows(); ++i)
        residuals(i) = targets(i) - mean(inputs.row(i).transpose());
    LikelihoodWorkspace ws(inputs);
    return log_marginal_likelihood(ws, residuals, hp, want_grad);
}

KernelOptResult optimize_kernel(const LikelihoodWorkspace& ws,
    const Eigen::VectorXd& residuals, const KernelHyperParams& init,
    const KernelOptConfig& cfg)
{
    opt::GradObjective obj = [&](const Eigen::VectorXd& packed) {
        auto ev = log_marginal_likelihood(
            ws, residuals, KernelHyperParams::unpack(packed), true);
        return opt::GradEval{ev.value, ev.grad, ev.ok};
    };

    KernelOptResult res;
    res.hp = init;

    const Eigen::VectorXd x0 = init.pack();
    for (int r = 0; r < std::max(1, cfg.restarts); ++r) {
        Eigen::VectorXd start = x0;
        if (r > 0) {
            Rng rng(seed_hash({cfg.seed, static_cast<std::uint64_t>(r)}));
            start += cfg.restart_sd * rng.normal_vector(static_cast<int>(x0.size()));
        }
        auto run = opt::rprop_maximize(obj, start, cfg.rprop);
        res.evaluations += run.evaluations;
        if (run.ok && run.best_value > res.loglik) {
            res.loglik = run.best_value;
            res.hp = KernelHyperParams::unpack(run.best_x);
        }
    }
    res.all_failed = !std::isfinite(res.loglik);
    return res;
}

KernelOptResult optimize_kernel(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& targets, const ScalarMeanFn& mean,
    const KernelHyperParams& init, const KernelOptConfig& cfg)
{
    Eigen::VectorXd residuals(targets.size());
    for (int i = 0; i < inputs.rows(); ++i)
        residuals(i) = targets(i) - mean(inputs.row(i).transpose());
    LikelihoodWorkspace ws(inputs);
    return optimize_kernel(ws, residuals, init, cfg);
}

} // namespace mbps::gp

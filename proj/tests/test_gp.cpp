#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include <mbps/gp/gp.hpp>
#include <mbps/gp/likelihood.hpp>
#include <mbps/gp/reference.hpp>
#include <mbps/rng.hpp>

using namespace mbps;

namespace {

Eigen::MatrixXd random_inputs(Rng& rng, int t, int d, double scale = 2.0)
{
    Eigen::MatrixXd x(t, d);
    for (int i = 0; i < t; ++i)
        x.row(i) = (scale * rng.normal_vector(d)).transpose();
    return x;
}

double rel_err(double got, double want)
{
    return std::abs(got - want) / std::max(std::abs(want), 1e-12);
}

} // namespace

TEST_CASE("single-point fit has the closed-form alpha")
{
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(2);
    hp.log_signal_sd = std::log(1.3);
    hp.log_noise_sd = std::log(0.2);
    Eigen::MatrixXd x(1, 2);
    x << 0.4, -0.7;
    Eigen::VectorXd y(1);
    y << 2.0;
    auto mean = [](const Eigen::VectorXd&) { return 0.5; };

    auto fit = gp::FittedGP::fit(x, y, mean, hp);
    const double expected = (2.0 - 0.5)
        / (hp.signal_var() + hp.noise_var() + gp::kJitterRel * hp.signal_var());
    CHECK(fit.alpha()(0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero residuals give zero alpha")
{
    Rng rng(3);
    Eigen::MatrixXd x = random_inputs(rng, 15, 3);
    Eigen::VectorXd y(15);
    auto mean = [](const Eigen::VectorXd& v) { return 0.3 * v(0) - v(2); };
    for (int i = 0; i < 15; ++i)
        y(i) = mean(x.row(i).transpose());

    auto fit = gp::FittedGP::fit(x, y, mean, gp::KernelHyperParams::defaults(3));
    CHECK(fit.alpha().lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("cholesky factor reconstructs the kernel matrix")
{
    Rng rng(5);
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(5);
    hp.log_lengthscales = rng.normal_vector(5) * 0.3;
    hp.log_signal_sd = 0.2;
    hp.log_noise_sd = std::log(0.05);

    Eigen::MatrixXd x = random_inputs(rng, 20, 5);
    Eigen::VectorXd y = rng.normal_vector(20);
    auto fit = gp::FittedGP::fit(x, y, gp::zero_mean(), hp);

    Eigen::MatrixXd expected = reference::kernel_matrix(x, hp);
    expected.diagonal().array() += hp.noise_var() + fit.jitter();
    const Eigen::MatrixXd rebuilt
        = fit.chol_factor() * fit.chol_factor().transpose();
    CHECK((rebuilt - expected).lpNorm<Eigen::Infinity>() < 1e-9);

    // lower-triangular with strictly positive diagonal
    CHECK(fit.chol_factor().diagonal().minCoeff() > 0.0);
    for (int i = 0; i < 20; ++i)
        for (int j = i + 1; j < 20; ++j)
            CHECK(fit.chol_factor()(i, j) == 0.0);
}

TEST_CASE("predict matches the direct-inversion oracle")
{
    Rng rng(9);
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(5);
    hp.log_lengthscales = rng.normal_vector(5) * 0.2;
    hp.log_signal_sd = -0.1;
    hp.log_noise_sd = std::log(0.1);

    Eigen::MatrixXd x = random_inputs(rng, 30, 5);
    Eigen::VectorXd y = rng.normal_vector(30);
    auto fit = gp::FittedGP::fit(x, y, gp::zero_mean(), hp);

    for (int q = 0; q < 10; ++q) {
        Eigen::VectorXd query = 2.0 * rng.normal_vector(5);
        auto got = fit.predict(query);
        auto want = reference::gp_predict_direct(x, y, hp, query);
        CHECK(rel_err(got.mean, want.mean) < 1e-6);
        CHECK(rel_err(got.variance, std::max(want.variance, 0.0)) < 1e-6);
    }
}

TEST_CASE("prior reversion far from data and for the empty dataset")
{
    Rng rng(13);
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(3);
    hp.log_signal_sd = std::log(0.7);
    auto mean = [](const Eigen::VectorXd& v) { return 2.0 + v(1); };

    Eigen::MatrixXd x = random_inputs(rng, 25, 3, 1.0);
    Eigen::VectorXd y(25);
    for (int i = 0; i < 25; ++i)
        y(i) = mean(x.row(i).transpose()) + 0.3 * rng.normal();
    auto fit = gp::FittedGP::fit(x, y, mean, hp);

    Eigen::VectorXd far = Eigen::VectorXd::Constant(3, 100.0); // >> 10 lengthscales
    auto p = fit.predict(far);
    CHECK(std::abs(p.mean - mean(far)) <= 1e-6 * hp.signal_sd());
    CHECK(p.variance >= 0.99 * hp.signal_var());
    CHECK(p.variance <= hp.signal_var() * (1.0 + 1e-12));

    auto prior = gp::predict_prior(mean, hp, far);
    CHECK(prior.mean == mean(far));
    CHECK(prior.variance == hp.signal_var());
}

TEST_CASE("posterior mean interpolates the targets as noise floors out")
{
    Rng rng(17);
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(2);
    hp.log_noise_sd = std::log(1e-6);
    Eigen::MatrixXd x = random_inputs(rng, 20, 2, 3.0);
    Eigen::VectorXd y = rng.normal_vector(20);
    auto mean = [](const Eigen::VectorXd& v) { return 0.1 * v(0); };
    auto fit = gp::FittedGP::fit(x, y, mean, hp);

    for (int i = 0; i < 20; ++i) {
        auto p = fit.predict(x.row(i).transpose());
        CHECK(rel_err(p.mean, y(i)) < 1e-4);
        // residual-consistency
        const double mi = mean(x.row(i).transpose());
        CHECK(std::abs(p.mean - y(i)) <= std::abs(y(i) - mi) + 1e-6);
        CHECK(p.variance >= 0.0);
    }
}

TEST_CASE("likelihood closed form for one noise-dominated point")
{
    // sigma_f^2 + sigma_n^2 = 1
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(2);
    hp.log_signal_sd = std::log(0.8);
    hp.log_noise_sd = std::log(0.6);
    Eigen::MatrixXd x(1, 2);
    x << 0.0, 0.0;
    Eigen::VectorXd r(1);
    r << 0.0;

    gp::LikelihoodWorkspace ws(x);
    auto ev = gp::log_marginal_likelihood(ws, r, hp, false);
    REQUIRE(ev.ok);
    CHECK(ev.value
        == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-6));
}

TEST_CASE("likelihood agrees with the direct oracle")
{
    Rng rng(21);
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(3);
    hp.log_lengthscales = rng.normal_vector(3) * 0.3;
    hp.log_signal_sd = 0.1;
    hp.log_noise_sd = std::log(0.2);
    Eigen::MatrixXd x = random_inputs(rng, 18, 3);
    Eigen::VectorXd r = rng.normal_vector(18);

    gp::LikelihoodWorkspace ws(x);
    auto ev = gp::log_marginal_likelihood(ws, r, hp, false);
    const double want = reference::log_marginal_likelihood_direct(x, r, hp);
    REQUIRE(ev.ok);
    CHECK(ev.value == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("likelihood gradient matches central finite differences")
{
    Rng rng(23);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + static_cast<int>(rng.next_u64() % 3); // 2..4
        const int t = 5 + static_cast<int>(rng.next_u64() % 21); // 5..25
        gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(d);
        hp.log_lengthscales = rng.normal_vector(d) * 0.4;
        hp.log_signal_sd = 0.3 * rng.normal();
        hp.log_noise_sd = std::log(0.05 + 0.3 * rng.uniform());

        Eigen::MatrixXd x = random_inputs(rng, t, d);
        Eigen::VectorXd r = rng.normal_vector(t);
        gp::LikelihoodWorkspace ws(x);

        auto ev = gp::log_marginal_likelihood(ws, r, hp, true);
        REQUIRE(ev.ok);

        const double eps = 1e-5;
        Eigen::VectorXd packed = hp.pack();
        for (int k = 0; k < packed.size(); ++k) {
            Eigen::VectorXd lo = packed, hi = packed;
            lo(k) -= eps;
            hi(k) += eps;
            const double flo = gp::log_marginal_likelihood(
                ws, r, gp::KernelHyperParams::unpack(lo), false)
                                   .value;
            const double fhi = gp::log_marginal_likelihood(
                ws, r, gp::KernelHyperParams::unpack(hi), false)
                                   .value;
            const double fd = (fhi - flo) / (2.0 * eps);
            const double denom
                = std::max({std::abs(fd), 1e-6 * ev.grad.lpNorm<Eigen::Infinity>(), 1e-10});
            worst = std::max(worst, std::abs(ev.grad(k) - fd) / denom);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("scaling nonzero residuals decreases the likelihood")
{
    Rng rng(29);
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(2);
    Eigen::MatrixXd x = random_inputs(rng, 12, 2);
    Eigen::VectorXd r = rng.normal_vector(12);
    gp::LikelihoodWorkspace ws(x);
    const double base = gp::log_marginal_likelihood(ws, r, hp, false).value;
    const double scaled
        = gp::log_marginal_likelihood(ws, Eigen::VectorXd(10.0 * r), hp, false)
              .value;
    CHECK(scaled < base);
}

TEST_CASE("rprop returns the start when the gradient is already zero")
{
    Eigen::VectorXd c(3);
    c << 1.0, -2.0, 0.5;
    opt::GradObjective f = [&](const Eigen::VectorXd& v) {
        return opt::GradEval{-(v - c).squaredNorm(), -2.0 * (v - c), true};
    };
    opt::RpropConfig cfg;
    auto res = opt::rprop_maximize(f, c, cfg);
    CHECK(res.ok);
    CHECK(std::abs(res.best_value - 0.0) <= 1e-8);
    CHECK((res.best_x - c).norm() <= 1e-8);
}

TEST_CASE("rprop best-so-far trace is non-decreasing")
{
    Rng rng(31);
    Eigen::VectorXd c = rng.normal_vector(4);
    opt::GradObjective f = [&](const Eigen::VectorXd& v) {
        return opt::GradEval{-(v - c).squaredNorm(), -2.0 * (v - c), true};
    };
    auto res = opt::rprop_maximize(f, Eigen::VectorXd::Zero(4), opt::RpropConfig{});
    for (std::size_t i = 1; i < res.best_trace.size(); ++i)
        CHECK(res.best_trace[i] >= res.best_trace[i - 1]);
    CHECK(res.best_value > -1e-6);
}

TEST_CASE("optimize_kernel never returns something worse than the init")
{
    Rng rng(37);
    Eigen::MatrixXd x = random_inputs(rng, 30, 2);
    Eigen::VectorXd y(30);
    for (int i = 0; i < 30; ++i)
        y(i) = std::sin(x(i, 0)) + 0.1 * rng.normal();

    gp::KernelHyperParams init = gp::initial_hyperparams(x, y);
    gp::LikelihoodWorkspace ws(x);
    gp::KernelOptConfig cfg;
    cfg.rprop.iterations = 100;
    auto out = gp::optimize_kernel(ws, y, init, cfg);
    const double at_init = gp::log_marginal_likelihood(ws, y, init, false).value;
    CHECK(out.loglik >= at_init - 1e-12);
    CHECK_FALSE(out.all_failed);
}

TEST_CASE("optimize_kernel recovers lengthscales of a known GP")
{
    Rng rng(41);
    const int t = 200, d = 2;
    const double true_ls = 0.7, true_sf = 1.0, true_sn = 0.05;

    Eigen::MatrixXd x = random_inputs(rng, t, d, 1.5);
    gp::KernelHyperParams truth = gp::KernelHyperParams::defaults(d);
    truth.log_lengthscales.setConstant(std::log(true_ls));
    truth.log_signal_sd = std::log(true_sf);
    truth.log_noise_sd = std::log(true_sn);

    Eigen::MatrixXd k = reference::kernel_matrix(x, truth);
    k.diagonal().array() += true_sn * true_sn + 1e-10;
    Eigen::MatrixXd l = Eigen::LLT<Eigen::MatrixXd>(k).matrixL();
    Eigen::VectorXd y = l * rng.normal_vector(t);

    gp::LikelihoodWorkspace ws(x);
    gp::KernelOptConfig cfg;
    auto out = gp::optimize_kernel(ws, y, gp::initial_hyperparams(x, y), cfg);
    REQUIRE_FALSE(out.all_failed);
    for (int j = 0; j < d; ++j) {
        const double ls = std::exp(out.hp.log_lengthscales(j));
        CHECK(ls > true_ls / 2.0);
        CHECK(ls < true_ls * 2.0);
    }
}

TEST_CASE("optimize_kernel flags a start where every evaluation fails")
{
    Rng rng(43);
    Eigen::MatrixXd x = random_inputs(rng, 5, 2);
    Eigen::VectorXd y = rng.normal_vector(5);
    gp::KernelHyperParams init = gp::KernelHyperParams::defaults(2);
    init.log_signal_sd = 800.0; // signal variance overflows to inf

    gp::LikelihoodWorkspace ws(x);
    gp::KernelOptConfig cfg;
    cfg.rprop.iterations = 10;
    auto out = gp::optimize_kernel(ws, y, init, cfg);
    CHECK(out.all_failed);
    CHECK(out.hp.log_signal_sd == init.log_signal_sd);
}

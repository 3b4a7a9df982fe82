#include <doctest.h>

#include <cmath>

#include <mbps/opt/cmaes.hpp>
#include <mbps/opt/nelder_mead.hpp>
#include <mbps/rng.hpp>

using namespace mbps;

TEST_CASE("nelder-mead climbs a concave quadratic")
{
    Eigen::VectorXd c(3);
    c << 0.4, -0.8, 1.2;
    opt::BoxObjective f
        = [&](const Eigen::VectorXd& x) { return -(x - c).squaredNorm(); };
    opt::LocalSearchConfig cfg;
    cfg.max_evals = 400;
    cfg.rel_tol = 1e-12;
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -5.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 5.0);
    auto res =
        opt::nelder_mead_maximize(f, Eigen::VectorXd::Zero(3), lo, hi, cfg);
    CHECK((res.best_x - c).norm() < 1e-3);
    CHECK(res.evaluations <= cfg.max_evals);
    for (std::size_t i = 1; i < res.best_trace.size(); ++i)
        CHECK(res.best_trace[i] >= res.best_trace[i - 1]);
}

TEST_CASE("nelder-mead respects the box")
{
    Eigen::VectorXd c(2);
    c << 3.0, 3.0; // optimum outside the box
    opt::BoxObjective f
        = [&](const Eigen::VectorXd& x) { return -(x - c).squaredNorm(); };
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 1.0);
    opt::LocalSearchConfig cfg;
    cfg.max_evals = 300;
    auto res = opt::nelder_mead_maximize(f, Eigen::VectorXd::Zero(2), lo, hi, cfg);
    CHECK((res.best_x.array() <= 1.0 + 1e-12).all());
    CHECK((res.best_x.array() >= -1.0 - 1e-12).all());
    CHECK((res.best_x - hi).norm() < 0.05);
}

TEST_CASE("subplex refines to tight accuracy")
{
    Eigen::VectorXd c(4);
    c << 0.55, 0.51, 0.48, 0.62;
    opt::BoxObjective f
        = [&](const Eigen::VectorXd& x) { return -(x - c).squaredNorm(); };
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(4, 0.05);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(4, 2.0);
    opt::LocalSearchConfig cfg;
    cfg.max_evals = 2000;
    cfg.rel_tol = 1e-13;
    Eigen::VectorXd x0 = Eigen::VectorXd::Constant(4, 0.9);
    auto res = opt::subplex_maximize(f, x0, lo, hi, cfg);
    CHECK((res.best_x - c).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("cma-es solves the deterministic 10-d sphere")
{
    Rng rng(17);
    Eigen::VectorXd c = rng.normal_vector(10);
    opt::PopulationObjective f
        = [&](const Eigen::VectorXd& x, int, int) { return -(x - c).squaredNorm(); };
    opt::CmaConfig cfg;
    cfg.max_evals = 5000;
    cfg.sigma0 = 2.0;
    cfg.seed = 1;
    auto res = opt::cmaes_maximize(Eigen::VectorXd::Zero(10), f, cfg);
    CHECK((res.best_x - c).norm() <= 1e-6);
    CHECK(res.evals <= cfg.max_evals);
}

TEST_CASE("cma-es handles additive noise on the sphere")
{
    Rng rng(23);
    Eigen::VectorXd c = rng.normal_vector(10);
    opt::PopulationObjective f
        = [&](const Eigen::VectorXd& x, int gen, int cand) {
              Rng noise(seed_hash({77u, static_cast<std::uint64_t>(gen),
                  static_cast<std::uint64_t>(cand)}));
              return -(x - c).squaredNorm() + 0.1 * noise.normal();
          };
    opt::CmaConfig cfg;
    cfg.max_evals = 5000;
    cfg.sigma0 = 2.0;
    cfg.seed = 5;
    // noisy-objective configuration: a large population averages the noise,
    // longer re-evaluation settles the final pick
    cfg.lambda0 = 96;
    cfg.reeval_rounds = 15;
    auto res = opt::cmaes_maximize(Eigen::VectorXd::Zero(10), f, cfg);
    CHECK((res.best_x - c).norm() <= 0.1);
}

TEST_CASE("cma-es is invariant to constant fitness shifts")
{
    Rng rng(29);
    Eigen::VectorXd c = rng.normal_vector(6);
    auto base = [&](const Eigen::VectorXd& x) { return -(x - c).squaredNorm(); };
    opt::CmaConfig cfg;
    // a short run keeps fitness gaps far above the resolution a constant
    // shift can eat in floating point
    cfg.max_evals = 600;
    cfg.seed = 9;

    opt::PopulationObjective f0
        = [&](const Eigen::VectorXd& x, int, int) { return base(x); };
    opt::PopulationObjective f1
        = [&](const Eigen::VectorXd& x, int, int) { return base(x) + 1000.0; };
    auto a = opt::cmaes_maximize(Eigen::VectorXd::Zero(6), f0, cfg);
    auto b = opt::cmaes_maximize(Eigen::VectorXd::Zero(6), f1, cfg);
    CHECK((a.best_x - b.best_x).norm() == 0.0);
    CHECK(b.best_score == doctest::Approx(a.best_score + 1000.0));
}

TEST_CASE("bipop bookkeeping never exceeds the budget")
{
    Rng rng(31);
    Eigen::VectorXd c = rng.normal_vector(5);
    // highly multimodal, forces restarts
    opt::PopulationObjective f = [&](const Eigen::VectorXd& x, int, int) {
        return -(x - c).squaredNorm()
            - 2.0 * (1.0 - std::cos(3.0 * (x - c).sum()));
    };
    for (long budget : {300L, 1000L, 4000L}) {
        opt::CmaConfig cfg;
        cfg.max_evals = budget;
        cfg.seed = 13;
        cfg.record_trace = true;
        auto res = opt::cmaes_maximize(Eigen::VectorXd::Zero(5), f, cfg);
        CHECK(res.evals <= budget);
        CHECK(res.best_x.size() == 5);
        for (std::size_t i = 1; i < res.trace.size(); ++i) {
            CHECK(res.trace[i].best >= res.trace[i - 1].best);
            CHECK(res.trace[i].evals <= budget);
        }
    }
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include <mbps/dataset.hpp>
#include <mbps/gp/kernel.hpp>
#include <mbps/rng.hpp>

using namespace mbps;

TEST_CASE("seed_hash separates streams and is stable")
{
    const auto a = seed_hash({1, 2, 3});
    CHECK(a == seed_hash({1, 2, 3}));
    CHECK(a != seed_hash({1, 2, 4}));
    CHECK(a != seed_hash({3, 2, 1}));
}

TEST_CASE("rng normal moments are sane")
{
    Rng rng(42);
    double sum = 0.0, sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("kernel at zero distance equals signal variance")
{
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(3);
    Eigen::VectorXd a(3);
    a << 0.3, -1.2, 2.0;
    CHECK(gp::kernel_eval(a, a, hp) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kernel closed form and symmetry")
{
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(1);
    Eigen::VectorXd a(1), b(1);
    a << 0.0;
    b << 1.0;
    CHECK(gp::kernel_eval(a, b, hp)
        == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

    Rng rng(7);
    gp::KernelHyperParams hp4 = gp::KernelHyperParams::defaults(4);
    hp4.log_lengthscales = rng.normal_vector(4);
    hp4.log_signal_sd = 0.3;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x = rng.normal_vector(4), y = rng.normal_vector(4);
        CHECK(gp::kernel_eval(x, y, hp4)
            == doctest::Approx(gp::kernel_eval(y, x, hp4)).epsilon(1e-14));
    }
}

TEST_CASE("kernel rejects dimension mismatch")
{
    gp::KernelHyperParams hp = gp::KernelHyperParams::defaults(2);
    Eigen::VectorXd a(2), b(3);
    a.setZero();
    b.setZero();
    CHECK_THROWS_AS(gp::kernel_eval(a, b, hp), std::invalid_argument);
}

TEST_CASE("dataset validates inputs")
{
    TransitionDataset data(4, 1);
    Eigen::VectorXd x(4), u(1), dx(4);
    x.setZero();
    u.setZero();
    dx.setZero();
    data.append(x, u, dx);
    CHECK(data.size() == 1);

    Eigen::VectorXd bad(3);
    bad.setZero();
    CHECK_THROWS_AS(data.append(bad, u, dx), std::invalid_argument);

    x(1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(data.append(x, u, dx), std::invalid_argument);
    CHECK(data.size() == 1);
}

TEST_CASE("dataset csv round-trip is exact")
{
    Rng rng(11);
    TransitionDataset data(4, 1);
    for (int i = 0; i < 37; ++i)
        data.append(rng.normal_vector(4) * 3.7, rng.normal_vector(1),
            rng.normal_vector(4) * 0.01);

    std::stringstream ss;
    data.write_csv(ss);
    auto back = TransitionDataset::read_csv(ss);
    REQUIRE(back.size() == data.size());
    CHECK((back.inputs() - data.inputs()).norm() == 0.0);
    CHECK((back.targets() - data.targets()).norm() == 0.0);
}

TEST_CASE("dataset csv requires a header")
{
    std::stringstream empty;
    CHECK_THROWS(TransitionDataset::read_csv(empty));

    std::stringstream bad("a,b,c\n1,2,3\n");
    CHECK_THROWS(TransitionDataset::read_csv(bad));
}

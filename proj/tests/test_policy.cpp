#include <doctest.h>

#include <cmath>

#include <mbps/gp/reference.hpp>
#include <mbps/policy/nn_policy.hpp>
#include <mbps/rng.hpp>

using namespace mbps;

TEST_CASE("pendubot network has 61 parameters")
{
    policy::PolicyArch arch;
    CHECK(arch.param_count() == 61);
}

TEST_CASE("zero weights give zero torque")
{
    policy::PolicyArch arch;
    Rng rng(1);
    const Eigen::VectorXd theta = Eigen::VectorXd::Zero(arch.param_count());
    for (int i = 0; i < 10; ++i)
        CHECK(policy::act(theta, arch, rng.normal_vector(4))(0) == 0.0);
}

TEST_CASE("output stays within the torque bound")
{
    policy::PolicyArch arch;
    Rng rng(2);
    for (int i = 0; i < 100000; ++i) {
        const Eigen::VectorXd theta = 5.0 * rng.normal_vector(arch.param_count());
        const Eigen::VectorXd x = 10.0 * rng.normal_vector(4);
        const double u = policy::act(theta, arch, x)(0);
        CHECK(std::abs(u) <= arch.u_max);
    }
}

TEST_CASE("forward pass matches the loop oracle")
{
    policy::PolicyArch arch;
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Eigen::VectorXd theta = rng.normal_vector(arch.param_count());
        const Eigen::VectorXd x = rng.normal_vector(4);
        const double got = policy::act(theta, arch, x)(0);
        const double want = reference::nn_forward(theta, arch, x)(0);
        CHECK(std::abs(got - want) < 1e-12);
    }
}

TEST_CASE("act is deterministic and Lipschitz in the input")
{
    policy::PolicyArch arch;
    Rng rng(4);
    const Eigen::VectorXd theta = rng.normal_vector(arch.param_count());
    const Eigen::VectorXd x = rng.normal_vector(4);
    CHECK(policy::act(theta, arch, x)(0) == policy::act(theta, arch, x)(0));

    // u_max * ||W2||_F * ||W1||_F bounds the input Lipschitz constant
    const auto w1 = theta.head(40);
    const auto w2 = theta.segment(50, 10);
    const double lip = arch.u_max * w1.norm() * w2.norm();
    for (int i = 0; i < 200; ++i) {
        const Eigen::VectorXd a = rng.normal_vector(4);
        const Eigen::VectorXd b = a + 0.1 * rng.normal_vector(4);
        const double du
            = std::abs(policy::act(theta, arch, a)(0) - policy::act(theta, arch, b)(0));
        CHECK(du <= lip * (a - b).norm() + 1e-12);
    }
}

TEST_CASE("act validates sizes")
{
    policy::PolicyArch arch;
    CHECK_THROWS(policy::act(Eigen::VectorXd::Zero(10), arch,
        Eigen::VectorXd::Zero(4)));
    CHECK_THROWS(policy::act(Eigen::VectorXd::Zero(arch.param_count()), arch,
        Eigen::VectorXd::Zero(3)));
}

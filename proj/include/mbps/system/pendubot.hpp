#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>

#include <Eigen/Core>

#include <mbps/dataset.hpp>
#include <mbps/model/prior.hpp>

namespace mbps::pendubot {

inline constexpr double kGravity = 9.81;       // m/s^2
inline constexpr double kTorqueLimit = 3.5;    // N*m, inner joint only
inline constexpr double kOmegaLimit = 50.0;    // rad/s divergence ceiling
inline constexpr int kStateDim = 4;
inline constexpr int kActionDim = 1;

// Point masses at the link ends, massless rods, viscous joint friction.
struct Params {
    double m1 = 0.5, m2 = 0.5; // kg
    double l1 = 0.5, l2 = 0.5; // m
    double b1 = 0.1, b2 = 0.1; // N*m*s/rad

    void validate() const;

    static Params actual() { return {}; }
    static Params prior_useful() { return {0.65, 0.5, 0.5, 0.4, 0.1, 0.1}; }
    static Params prior_tunable() { return {0.5, 0.75, 0.5, 0.5, 0.1, 0.1}; }
    static Params prior_misleading() { return {0.5, 0.5, 0.5, 0.25, 0.1, 0.1}; }
    static Params prior_partial() { return {0.65, 0.35, 0.5, 0.5, 0.0, 0.0}; }
    static Params by_name(const std::string& name);
};

// Both angles measured anti-clockwise from the upright position in the world
// frame; the hanging rest state is theta1 = theta2 = pi.
struct State {
    double th1 = std::numbers::pi;
    double th2 = std::numbers::pi;
    double w1 = 0.0;
    double w2 = 0.0;

    Eigen::Vector4d vec() const { return {th1, th2, w1, w2}; }
    static State from_vec(const Eigen::Vector4d& v)
    {
        return {v(0), v(1), v(2), v(3)};
    }
    bool within_limits() const
    {
        return vec().allFinite() && std::abs(w1) <= kOmegaLimit
            && std::abs(w2) <= kOmegaLimit;
    }
    static State hanging() { return {}; }
    static State upright() { return {0.0, 0.0, 0.0, 0.0}; }
};

// Time derivative (dth1, dth2, dw1, dw2) with torque u on joint 1 only.
Eigen::Vector4d deriv(const State& s, double u, const Params& p);

// Classical RK4 with zero-order-hold torque; h = dt / substeps.
State step(const State& s, double u, const Params& p, double dt,
    int substeps = 10);

// Kinetic + potential energy (potential zero at the pivot height).
double total_energy(const State& s, const Params& p);

Eigen::Vector2d tip_position(double th1, double th2, double l1, double l2);

struct RewardConfig {
    double sigma_c = 0.25; // m
    enum class Metric { tip, angle } metric = Metric::tip;
    double l1 = 0.5, l2 = 0.5; // task geometry for the tip metric
};

// exp(-d^2 / (2 sigma_c^2)) with d the distance to the upright target.
double reward(const State& s, const RewardConfig& cfg);

struct EpisodeConfig {
    int steps = 50;      // 2.5 s at 20 Hz
    double dt = 0.05;    // s
    int substeps = 10;
    double u_max = kTorqueLimit;
    Eigen::Vector4d noise_sd = Eigen::Vector4d::Zero();
    RewardConfig reward;
};

struct EpisodeRecord {
    Eigen::MatrixXd states;  // (steps_done + 1) x 4
    Eigen::VectorXd actions; // steps_done
    Eigen::VectorXd rewards; // steps_done
    double cumulative = 0.0;
    bool aborted = false;
    int steps_done = 0;

    void append_to(TransitionDataset& data) const;
};

using Policy = std::function<double(const Eigen::Vector4d&)>;

// Run one episode on the system from the hanging start; Gaussian noise is
// added to each recorded state difference.
EpisodeRecord run_episode(const Policy& policy, const Params& system,
    const EpisodeConfig& cfg, std::uint64_t seed);

// Tunable prior over the pendubot family: phi holds the parameters enabled
// in `tunable` (order m1, m2, l1, l2, b1, b2); the rest stay at `nominal`.
model::TunableMeanPrior make_prior(const Params& nominal, double dt,
    int substeps, double lower_scale = 0.1, double upper_scale = 4.0,
    const std::array<bool, 6>& tunable = {true, true, true, true, false, false});

// Discrete variant: one candidate per parameter set (all six fixed per
// candidate, phi is the full 6-vector).
model::TunableMeanPrior make_discrete_prior(
    const std::vector<Params>& candidates, double dt, int substeps);

} // namespace mbps::pendubot

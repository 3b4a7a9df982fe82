#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace mbps::opt {

struct GradEval {
    double value = 0.0;
    Eigen::VectorXd grad;
    bool ok = true; // false marks an infeasible point (e.g. Cholesky failure)
};

using GradObjective = std::function<GradEval(const Eigen::VectorXd&)>;

// Classic Riedmiller settings.
struct RpropConfig {
    int iterations = 300;
    double delta0 = 0.1;
    double delta_min = 1e-9;
    double delta_max = 50.0;
    double eta_plus = 1.2;
    double eta_minus = 0.5;
    double grad_tol = 1e-9;
};

struct RpropResult {
    Eigen::VectorXd best_x;
    double best_value = -std::numeric_limits<double>::infinity();
    bool ok = false;             // at least one feasible evaluation
    int evaluations = 0;
    std::vector<double> best_trace; // best-so-far value per accepted iteration
};

// iRprop- ascent on a gradient objective. Infeasible evaluations retreat to
// the best point seen and shrink all step sizes. The returned value never
// falls below the starting point's.
RpropResult rprop_maximize(const GradObjective& f, const Eigen::VectorXd& x0,
    const RpropConfig& cfg);

} // namespace mbps::opt

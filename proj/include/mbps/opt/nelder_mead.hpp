#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace mbps::opt {

using BoxObjective = std::function<double(const Eigen::VectorXd&)>;

struct LocalSearchConfig {
    int max_evals = 50;
    double init_scale = 0.1;  // initial simplex step, fraction of each range
    double rel_tol = 1e-4;    // simplex value-spread stop
    double x_tol = 1e-9;      // simplex diameter stop, fraction of each range
    int max_subspace_dim = 5; // blocks larger than this get split (subplex)
};

struct LocalSearchResult {
    Eigen::VectorXd best_x;
    double best_value = -std::numeric_limits<double>::infinity();
    int evaluations = 0;
    std::vector<double> best_trace; // best-so-far value per evaluation
};

// Bounded Nelder-Mead ascent; candidate points are clamped to the box.
LocalSearchResult nelder_mead_maximize(const BoxObjective& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, const LocalSearchConfig& cfg);

// Subplex-style driver: cycles of Nelder-Mead over coordinate blocks (the
// whole space when the dimension is small), each cycle restarting with a
// tighter simplex around the incumbent.
LocalSearchResult subplex_maximize(const BoxObjective& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, const LocalSearchConfig& cfg);

} // namespace mbps::opt

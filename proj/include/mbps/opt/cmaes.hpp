#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace mbps::opt {

// Objective for population optimizers. Evaluations inside one generation run
// concurrently; the (generation, candidate) pair lets the callee derive a
// scheduler-independent noise seed.
using PopulationObjective = std::function<double(
    const Eigen::VectorXd& x, int generation, int candidate)>;

struct CmaConfig {
    double sigma0 = 1.0;
    int lambda0 = 0; // 0 selects 4 + floor(3 ln n)
    long max_evals = 20000;
    double lower = -5.0;
    double upper = 5.0;
    bool bipop = true;
    int max_restarts = 12;
    // small restarts refine the incumbent instead of sampling a fresh start;
    // large restarts always explore from a random point
    bool elitist_small = true;

    // per-run stop tolerances
    double tol_x = 1e-8;
    double tol_fun = 1e-14;
    double tol_condition = 1e7; // on sqrt-eigenvalue spread

    // final selection: re-evaluate the top candidates with fresh noise
    int top_k_reeval = 3;
    int reeval_rounds = 5;

    std::uint64_t seed = 1;
    bool record_trace = false;
};

struct CmaTracePoint {
    int generation = 0;
    long evals = 0;
    double best = 0.0;
};

struct CmaResult {
    Eigen::VectorXd best_x;
    double best_score = -std::numeric_limits<double>::infinity();
    long evals = 0;
    int restarts = 0;
    std::vector<CmaTracePoint> trace;
};

// BIPOP-CMA-ES maximization with a per-dimension box [lower, upper]
// (candidates are clamped for evaluation). Purely rank-based.
CmaResult cmaes_maximize(const Eigen::VectorXd& x0,
    const PopulationObjective& f, const CmaConfig& cfg);

} // namespace mbps::opt

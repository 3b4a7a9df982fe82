#include <mbps/opt/rprop.hpp>

#include <cmath>

namespace mbps::opt {

RpropResult rprop_maximize(const GradObjective& f, const Eigen::VectorXd& x0,
    const RpropConfig& cfg)
{
    const int n = static_cast<int>(x0.size());
    RpropResult res;
    res.best_x = x0;

    Eigen::VectorXd x = x0;
    GradEval cur = f(x);
    ++res.evaluations;
    if (!cur.ok || !std::isfinite(cur.value))
        return res; // cannot even start; caller handles restarts
    res.ok = true;
    res.best_value = cur.value;
    res.best_trace.push_back(cur.value);

    Eigen::VectorXd delta = Eigen::VectorXd::Constant(n, cfg.delta0);
    Eigen::VectorXd grad_prev = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd grad = cur.grad;
    Eigen::VectorXd best_grad = cur.grad;

    for (int it = 0; it < cfg.iterations; ++it) {
        if (grad.lpNorm<Eigen::Infinity>() < cfg.grad_tol)
            break;
        for (int i = 0; i < n; ++i) {
            const double s = grad(i) * grad_prev(i);
            if (s > 0.0)
                delta(i) = std::min(delta(i) * cfg.eta_plus, cfg.delta_max);
            else if (s < 0.0) {
                delta(i) = std::max(delta(i) * cfg.eta_minus, cfg.delta_min);
                grad(i) = 0.0; // iRprop-: skip the adaptation after a sign flip
            }
            if (grad(i) > 0.0)
                x(i) += delta(i);
            else if (grad(i) < 0.0)
                x(i) -= delta(i);
        }
        grad_prev = grad;

        cur = f(x);
        ++res.evaluations;
        if (!cur.ok || !std::isfinite(cur.value)) {
            // rejected step: back to the best point, shrink everything
            x = res.best_x;
            delta *= cfg.eta_minus;
            grad_prev.setZero();
            grad = best_grad;
            res.best_trace.push_back(res.best_value);
            continue;
        }
        grad = cur.grad;
        if (cur.value > res.best_value) {
            res.best_value = cur.value;
            res.best_x = x;
            best_grad = cur.grad;
        }
        res.best_trace.push_back(res.best_value);
    }
    return res;
}

} // namespace mbps::opt

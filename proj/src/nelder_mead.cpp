#include <mbps/opt/nelder_mead.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mbps::opt {

namespace {

    Eigen::VectorXd clamp_box(Eigen::VectorXd x, const Eigen::VectorXd& lo,
        const Eigen::VectorXd& hi)
    {
        return x.cwiseMax(lo).cwiseMin(hi);
    }

    struct Tracker {
        LocalSearchResult* res;
        const BoxObjective* f;
        int budget;

        bool exhausted() const { return res->evaluations >= budget; }

        double eval(const Eigen::VectorXd& x)
        {
            double v = (*f)(x);
            ++res->evaluations;
            if (v > res->best_value) {
                res->best_value = v;
                res->best_x = x;
            }
            res->best_trace.push_back(res->best_value);
            return v;
        }
    };

    // One Nelder-Mead run over the coordinates listed in `dims`, other
    // coordinates held at `base`. Returns when converged or out of budget.
    void nm_block(Tracker& tr, Eigen::VectorXd& base,
        const std::vector<int>& dims, const Eigen::VectorXd& lower,
        const Eigen::VectorXd& upper, double scale,
        const LocalSearchConfig& cfg)
    {
        const int n = static_cast<int>(dims.size());
        auto embed = [&](const Eigen::VectorXd& y) {
            Eigen::VectorXd x = base;
            for (int i = 0; i < n; ++i)
                x(dims[i]) = y(i);
            return clamp_box(std::move(x), lower, upper);
        };
        auto feval = [&](const Eigen::VectorXd& y) { return tr.eval(embed(y)); };

        Eigen::VectorXd y0(n), range(n);
        for (int i = 0; i < n; ++i) {
            y0(i) = base(dims[i]);
            range(i) = upper(dims[i]) - lower(dims[i]);
        }

        std::vector<Eigen::VectorXd> v(n + 1, y0);
        std::vector<double> fv(n + 1);
        fv[0] = feval(v[0]);
        for (int i = 0; i < n; ++i) {
            double h = scale * range(i);
            if (y0(i) + h > upper(dims[i]))
                h = -h;
            v[i + 1](i) += h;
            if (tr.exhausted())
                return;
            fv[i + 1] = feval(v[i + 1]);
        }

        std::vector<int> order(n + 1);
        while (!tr.exhausted()) {
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                [&](int a, int b) { return fv[a] > fv[b]; });
            const int best = order[0], worst = order[n],
                      second_worst = order[n - 1];

            const double spread = std::abs(fv[best] - fv[worst]);
            if (spread <= cfg.rel_tol
                    * (std::abs(fv[best]) + std::abs(fv[worst]) + 1e-12))
                break;
            double diam = 0.0;
            for (int i = 1; i <= n; ++i)
                diam = std::max(diam,
                    ((v[order[i]] - v[best]).cwiseQuotient(range))
                        .lpNorm<Eigen::Infinity>());
            if (diam < cfg.x_tol)
                break;

            Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i)
                centroid += v[order[i]];
            centroid /= double(n);

            Eigen::VectorXd refl = centroid + (centroid - v[worst]);
            double f_refl = feval(refl);
            if (f_refl > fv[best]) {
                Eigen::VectorXd expd = centroid + 2.0 * (centroid - v[worst]);
                if (tr.exhausted()) {
                    v[worst] = refl;
                    fv[worst] = f_refl;
                    break;
                }
                double f_expd = feval(expd);
                if (f_expd > f_refl) {
                    v[worst] = expd;
                    fv[worst] = f_expd;
                }
                else {
                    v[worst] = refl;
                    fv[worst] = f_refl;
                }
            }
            else if (f_refl > fv[second_worst]) {
                v[worst] = refl;
                fv[worst] = f_refl;
            }
            else {
                const bool outside = f_refl > fv[worst];
                Eigen::VectorXd contr;
                if (outside)
                    contr = centroid + 0.5 * (refl - centroid);
                else
                    contr = centroid - 0.5 * (centroid - v[worst]);
                if (tr.exhausted())
                    break;
                double f_contr = feval(contr);
                if (f_contr > (outside ? f_refl : fv[worst])) {
                    v[worst] = contr;
                    fv[worst] = f_contr;
                }
                else {
                    // shrink towards the best vertex
                    for (int i = 1; i <= n; ++i) {
                        const int k = order[i];
                        v[k] = v[best] + 0.5 * (v[k] - v[best]);
                        if (tr.exhausted())
                            return;
                        fv[k] = feval(v[k]);
                    }
                }
            }
        }

        // write the block's best coordinates back
        for (int i = 0; i < n; ++i)
            base(dims[i]) = tr.res->best_x(dims[i]);
    }

} // namespace

LocalSearchResult nelder_mead_maximize(const BoxObjective& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, const LocalSearchConfig& cfg)
{
    const int n = static_cast<int>(x0.size());
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("nelder_mead: bound size mismatch");
    if (((upper - lower).array() <= 0.0).any())
        throw std::invalid_argument("nelder_mead: lower must be < upper");

    LocalSearchResult res;
    res.best_x = clamp_box(x0, lower, upper);
    Tracker tr{&res, &f, cfg.max_evals};
    Eigen::VectorXd base = res.best_x;
    std::vector<int> dims(n);
    std::iota(dims.begin(), dims.end(), 0);
    nm_block(tr, base, dims, lower, upper, cfg.init_scale, cfg);
    return res;
}

LocalSearchResult subplex_maximize(const BoxObjective& f,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, const LocalSearchConfig& cfg)
{
    const int n = static_cast<int>(x0.size());
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("subplex: bound size mismatch");

    LocalSearchResult res;
    res.best_x = clamp_box(x0, lower, upper);
    Tracker tr{&res, &f, cfg.max_evals};

    Eigen::VectorXd base = res.best_x;
    Eigen::VectorXd prev = base;
    double scale = cfg.init_scale;
    double prev_best = -std::numeric_limits<double>::infinity();

    while (!tr.exhausted()) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        // process the most recently moving coordinates first
        Eigen::VectorXd progress = (base - prev).cwiseAbs();
        std::sort(order.begin(), order.end(),
            [&](int a, int b) { return progress(a) > progress(b); });
        prev = base;

        for (int at = 0; at < n && !tr.exhausted();) {
            const int block = std::min(cfg.max_subspace_dim, n - at);
            std::vector<int> dims(order.begin() + at, order.begin() + at + block);
            std::sort(dims.begin(), dims.end());
            nm_block(tr, base, dims, lower, upper, scale, cfg);
            at += block;
        }

        if (std::isfinite(prev_best)
            && std::abs(res.best_value - prev_best) <= cfg.rel_tol
                * (std::abs(res.best_value) + std::abs(prev_best) + 1e-12))
            break;
        prev_best = res.best_value;
        scale = std::max(0.1 * scale, 1e-6);
    }
    res.best_x = clamp_box(res.best_x, lower, upper);
    return res;
}

} // namespace mbps::opt

#include <mbps/opt/cmaes.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <mbps/par.hpp>
#include <mbps/rng.hpp>

namespace mbps::opt {

namespace {

    struct Candidate {
        Eigen::VectorXd x; // clamped phenotype, as evaluated
        double score;
    };

    struct Driver {
        const PopulationObjective* f;
        const CmaConfig* cfg;
        long evals = 0;
        int generation = 0; // global across restarts, keys the noise seeds
        std::vector<Candidate> pool;
        std::vector<CmaTracePoint> trace;
        double best_raw = -std::numeric_limits<double>::infinity();

        bool budget_left(long want) const { return evals + want <= cfg->max_evals; }

        Eigen::VectorXd clamp(const Eigen::VectorXd& x) const
        {
            return x.cwiseMax(cfg->lower).cwiseMin(cfg->upper);
        }
    };

    // One CMA-ES run; consumes at most `slice` evaluations.
    void run_once(Driver& dr, const Eigen::VectorXd& m0, double sigma0,
        int lambda, long slice, Rng& rng)
    {
        const int n = static_cast<int>(m0.size());
        const int mu = lambda / 2;

        Eigen::VectorXd weights(mu);
        for (int i = 0; i < mu; ++i)
            weights(i) = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
        weights /= weights.sum();
        const double mueff = 1.0 / weights.squaredNorm();

        const double cs = (mueff + 2.0) / (n + mueff + 5.0);
        const double ds = 1.0
            + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0)
            + cs;
        const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
        const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
        const double cmu = std::min(1.0 - c1,
            2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
        const double chi_n
            = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        Eigen::VectorXd mean = m0;
        double sigma = sigma0;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd ps = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd pc = Eigen::VectorXd::Zero(n);

        const int max_gens = static_cast<int>(
            100.0 + 50.0 * (n + 3.0) * (n + 3.0) / std::sqrt(double(lambda)));
        const int stag_window = 20 + 3 * n;
        std::deque<double> best_hist;

        // trailing average of the distribution mean; under heavy evaluation
        // noise the mean wanders around the optimum and averaging it out is
        // considerably closer than any single iterate
        const int mean_window = 20 + n;
        std::deque<Eigen::VectorXd> mean_hist;

        std::vector<Eigen::VectorXd> ys(lambda), xs(lambda);
        std::vector<double> fit(lambda);
        long used = 0;
        Candidate run_best{m0, -std::numeric_limits<double>::infinity()};

        for (int gen_local = 0; gen_local < max_gens; ++gen_local) {
            if (used + lambda > slice || !dr.budget_left(lambda))
                break;

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
                0.5 * (cov + cov.transpose()));
            Eigen::VectorXd d = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
            const Eigen::MatrixXd& b = eig.eigenvectors();
            if (d.maxCoeff() / d.minCoeff() > dr.cfg->tol_condition)
                break;
            if (sigma * d.maxCoeff() < dr.cfg->tol_x)
                break;

            for (int i = 0; i < lambda; ++i) {
                Eigen::VectorXd z = rng.normal_vector(n);
                ys[i] = b * d.cwiseProduct(z);
                xs[i] = dr.clamp(mean + sigma * ys[i]);
            }
            const int gen_id = dr.generation++;
            par::parallel_for(lambda,
                [&](int i) { fit[i] = (*dr.f)(xs[i], gen_id, i); });
            dr.evals += lambda;
            used += lambda;

            std::vector<int> order(lambda);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b2) {
                if (fit[a] != fit[b2])
                    return fit[a] > fit[b2];
                return a < b2;
            });

            const double gen_best = fit[order[0]];
            if (gen_best > run_best.score)
                run_best = {xs[order[0]], gen_best};
            if (gen_best > dr.best_raw)
                dr.best_raw = gen_best;
            if (dr.cfg->record_trace)
                dr.trace.push_back({gen_id, dr.evals, dr.best_raw});

            Eigen::VectorXd yw = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < mu; ++i)
                yw += weights(i) * ys[order[i]];
            mean += sigma * yw;

            Eigen::VectorXd c_inv_half_yw
                = b * (b.transpose() * yw).cwiseQuotient(d);
            ps = (1.0 - cs) * ps
                + std::sqrt(cs * (2.0 - cs) * mueff) * c_inv_half_yw;
            const double ps_norm = ps.norm();
            const double h_denom = std::sqrt(
                1.0 - std::pow(1.0 - cs, 2.0 * (gen_local + 1)));
            const bool hsig
                = ps_norm / h_denom < (1.4 + 2.0 / (n + 1.0)) * chi_n;
            pc = (1.0 - cc) * pc;
            if (hsig)
                pc += std::sqrt(cc * (2.0 - cc) * mueff) * yw;

            Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < mu; ++i)
                rank_mu.noalias() += weights(i) * ys[order[i]] * ys[order[i]].transpose();
            const double delta_h = hsig ? 0.0 : cc * (2.0 - cc);
            cov = (1.0 - c1 - cmu) * cov
                + c1 * (pc * pc.transpose() + delta_h * cov) + cmu * rank_mu;

            sigma *= std::exp((cs / ds) * (ps_norm / chi_n - 1.0));
            if (!std::isfinite(sigma) || sigma > 1e8)
                break;

            mean_hist.push_back(mean);
            if (static_cast<int>(mean_hist.size()) > mean_window)
                mean_hist.pop_front();

            best_hist.push_back(gen_best);
            if (static_cast<int>(best_hist.size()) > 2 * stag_window)
                best_hist.pop_front();
            if (static_cast<int>(best_hist.size()) == 2 * stag_window) {
                auto median_of = [&](int from, int count) {
                    std::vector<double> v(best_hist.begin() + from,
                        best_hist.begin() + from + count);
                    std::nth_element(v.begin(), v.begin() + count / 2, v.end());
                    return v[count / 2];
                };
                const double old_m = median_of(0, stag_window);
                const double new_m = median_of(stag_window, stag_window);
                if (new_m <= old_m)
                    break; // stagnating (or noise-dominated): restart
                const double lo = *std::min_element(best_hist.begin(), best_hist.end());
                const double hi = *std::max_element(best_hist.begin(), best_hist.end());
                if (hi - lo < dr.cfg->tol_fun)
                    break;
            }
        }

        dr.pool.push_back(run_best);
        // the distribution mean is often better than any single sample,
        // particularly on noisy objectives
        if (dr.budget_left(1)) {
            Eigen::VectorXd mx = dr.clamp(mean);
            const double fm = (*dr.f)(mx, dr.generation++, 0);
            ++dr.evals;
            if (fm > dr.best_raw)
                dr.best_raw = fm;
            dr.pool.push_back({mx, fm});
        }
        if (!mean_hist.empty() && dr.budget_left(1)) {
            Eigen::VectorXd avg = Eigen::VectorXd::Zero(n);
            for (const auto& m : mean_hist)
                avg += m;
            avg = dr.clamp(avg / double(mean_hist.size()));
            const double fa = (*dr.f)(avg, dr.generation++, 0);
            ++dr.evals;
            if (fa > dr.best_raw)
                dr.best_raw = fa;
            dr.pool.push_back({avg, fa});
        }
    }

} // namespace

CmaResult cmaes_maximize(const Eigen::VectorXd& x0,
    const PopulationObjective& f, const CmaConfig& cfg)
{
    const int n = static_cast<int>(x0.size());
    const int lambda_def
        = cfg.lambda0 > 0 ? cfg.lambda0 : 4 + int(3.0 * std::log(double(n)));

    Driver dr;
    dr.f = &f;
    dr.cfg = &cfg;
    Rng rng(cfg.seed);

    const long reserve
        = std::min<long>(cfg.max_evals / 4,
            static_cast<long>(cfg.top_k_reeval) * cfg.reeval_rounds);
    const long run_budget = cfg.max_evals - reserve;

    // first run from the supplied start point
    run_once(dr, x0.cwiseMax(cfg.lower).cwiseMin(cfg.upper), cfg.sigma0,
        lambda_def, run_budget, rng);

    long used_large = dr.evals, used_small = 0;
    long last_large = dr.evals;
    int n_large = 0;
    int restarts = 0;
    int lambda_large = lambda_def;

    while (cfg.bipop && restarts < cfg.max_restarts
        && dr.evals + 2 * lambda_def <= run_budget) {
        Eigen::VectorXd m0(n);
        for (int i = 0; i < n; ++i)
            m0(i) = rng.uniform(cfg.lower, cfg.upper);

        const long before = dr.evals;
        if (used_small < used_large) {
            const double u1 = rng.uniform(), u2 = rng.uniform();
            int lambda_small = static_cast<int>(std::floor(lambda_def
                * std::pow(0.5 * lambda_large / double(lambda_def), u1 * u1)));
            lambda_small = std::max(2, std::min(lambda_small, lambda_large));
            const double sigma_small = cfg.sigma0 * std::pow(10.0, -2.0 * u2);
            const long slice
                = std::min(run_budget - dr.evals, std::max<long>(last_large / 2, 100));
            if (cfg.elitist_small && !dr.pool.empty()) {
                const auto it = std::max_element(dr.pool.begin(), dr.pool.end(),
                    [](const Candidate& a, const Candidate& b) {
                        return a.score < b.score;
                    });
                m0 = it->x;
            }
            run_once(dr, m0, sigma_small, lambda_small, slice, rng);
            used_small += dr.evals - before;
        }
        else {
            ++n_large;
            lambda_large = lambda_def << n_large;
            run_once(dr, m0, cfg.sigma0, lambda_large, run_budget - dr.evals, rng);
            used_large += dr.evals - before;
            last_large = dr.evals - before;
        }
        ++restarts;
    }

    // pick the winner by re-evaluated score
    std::sort(dr.pool.begin(), dr.pool.end(),
        [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    CmaResult res;
    res.restarts = restarts;

    const int k = std::min<int>(cfg.top_k_reeval, static_cast<int>(dr.pool.size()));
    for (int i = 0; i < k; ++i) {
        double acc = 0.0;
        int rounds = 0;
        for (int r = 0; r < cfg.reeval_rounds && dr.budget_left(1); ++r) {
            acc += f(dr.pool[i].x, dr.generation++, i);
            ++dr.evals;
            ++rounds;
        }
        const double score = rounds > 0 ? acc / rounds : dr.pool[i].score;
        if (score > res.best_score) {
            res.best_score = score;
            res.best_x = dr.pool[i].x;
        }
    }
    if (res.best_x.size() == 0 && !dr.pool.empty()) {
        res.best_x = dr.pool.front().x;
        res.best_score = dr.pool.front().score;
    }
    res.evals = dr.evals;
    res.trace = std::move(dr.trace);
    return res;
}

} // namespace mbps::opt

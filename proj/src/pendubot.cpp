#include <mbps/system/pendubot.hpp>

#include <cmath>
#include <stdexcept>

#include <mbps/rng.hpp>

namespace mbps::pendubot {

void Params::validate() const
{
    if (!(m1 > 0.0 && m2 > 0.0 && l1 > 0.0 && l2 > 0.0))
        throw std::invalid_argument("Params: masses and lengths must be > 0");
    if (b1 < 0.0 || b2 < 0.0)
        throw std::invalid_argument("Params: friction must be >= 0");
}

Params Params::by_name(const std::string& name)
{
    if (name == "actual")
        return actual();
    if (name == "useful")
        return prior_useful();
    if (name == "tunable")
        return prior_tunable();
    if (name == "misleading")
        return prior_misleading();
    if (name == "partial")
        return prior_partial();
    throw std::invalid_argument("unknown pendubot parameter set: " + name);
}

Eigen::Vector4d deriv(const State& s, double u, const Params& p)
{
    const double c12 = std::cos(s.th1 - s.th2);
    const double s12 = std::sin(s.th1 - s.th2);
    const double m12 = p.m1 + p.m2;

    const double a11 = m12 * p.l1 * p.l1;
    const double a12 = p.m2 * p.l1 * p.l2 * c12;
    const double a22 = p.m2 * p.l2 * p.l2;

    const double r1 = u - p.b1 * s.w1
        - p.m2 * p.l1 * p.l2 * s12 * s.w2 * s.w2
        + m12 * kGravity * p.l1 * std::sin(s.th1);
    const double r2 = -p.b2 * s.w2
        + p.m2 * p.l1 * p.l2 * s12 * s.w1 * s.w1
        + p.m2 * kGravity * p.l2 * std::sin(s.th2);

    const double det = a11 * a22 - a12 * a12;
    if (!(det > 1e-12))
        throw std::runtime_error("pendubot::deriv: singular mass matrix");

    Eigen::Vector4d dx;
    dx(0) = s.w1;
    dx(1) = s.w2;
    dx(2) = (a22 * r1 - a12 * r2) / det;
    dx(3) = (a11 * r2 - a12 * r1) / det;
    return dx;
}

State step(const State& s, double u, const Params& p, double dt, int substeps)
{
    if (!(dt > 0.0) || substeps < 1)
        throw std::invalid_argument("pendubot::step: bad step sizes");
    const double h = dt / substeps;
    Eigen::Vector4d x = s.vec();
    for (int i = 0; i < substeps; ++i) {
        const State s0 = State::from_vec(x);
        const Eigen::Vector4d k1 = deriv(s0, u, p);
        const Eigen::Vector4d k2
            = deriv(State::from_vec(x + 0.5 * h * k1), u, p);
        const Eigen::Vector4d k3
            = deriv(State::from_vec(x + 0.5 * h * k2), u, p);
        const Eigen::Vector4d k4 = deriv(State::from_vec(x + h * k3), u, p);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return State::from_vec(x);
}

double total_energy(const State& s, const Params& p)
{
    const double m12 = p.m1 + p.m2;
    const double kinetic = 0.5 * m12 * p.l1 * p.l1 * s.w1 * s.w1
        + 0.5 * p.m2 * p.l2 * p.l2 * s.w2 * s.w2
        + p.m2 * p.l1 * p.l2 * s.w1 * s.w2 * std::cos(s.th1 - s.th2);
    const double potential = kGravity
        * (m12 * p.l1 * std::cos(s.th1) + p.m2 * p.l2 * std::cos(s.th2));
    return kinetic + potential;
}

Eigen::Vector2d tip_position(double th1, double th2, double l1, double l2)
{
    return {-l1 * std::sin(th1) - l2 * std::sin(th2),
        l1 * std::cos(th1) + l2 * std::cos(th2)};
}

namespace {
    double wrap_pi(double a)
    {
        const double two_pi = 2.0 * std::numbers::pi;
        a = std::fmod(a + std::numbers::pi, two_pi);
        if (a < 0.0)
            a += two_pi;
        return a - std::numbers::pi;
    }
} // namespace

double reward(const State& s, const RewardConfig& cfg)
{
    double d2 = 0.0;
    if (cfg.metric == RewardConfig::Metric::tip) {
        const Eigen::Vector2d tip = tip_position(s.th1, s.th2, cfg.l1, cfg.l2);
        const Eigen::Vector2d goal(0.0, cfg.l1 + cfg.l2);
        d2 = (tip - goal).squaredNorm();
    }
    else {
        const double a1 = wrap_pi(s.th1);
        const double a2 = wrap_pi(s.th2);
        d2 = a1 * a1 + a2 * a2;
    }
    return std::exp(-0.5 * d2 / (cfg.sigma_c * cfg.sigma_c));
}

void EpisodeRecord::append_to(TransitionDataset& data) const
{
    for (int t = 0; t < steps_done; ++t) {
        const Eigen::Vector4d x = states.row(t).transpose();
        const Eigen::Vector4d dx
            = states.row(t + 1).transpose() - states.row(t).transpose();
        Eigen::VectorXd u(1);
        u << actions(t);
        data.append(x, u, dx);
    }
}

EpisodeRecord run_episode(const Policy& policy, const Params& system,
    const EpisodeConfig& cfg, std::uint64_t seed)
{
    system.validate();
    Rng rng(seed);
    const bool noisy = (cfg.noise_sd.array() > 0.0).any();

    EpisodeRecord rec;
    rec.states.resize(cfg.steps + 1, kStateDim);
    rec.actions.resize(cfg.steps);
    rec.rewards.resize(cfg.steps);

    State x = State::hanging();
    rec.states.row(0) = x.vec().transpose();

    for (int t = 0; t < cfg.steps; ++t) {
        double u = policy(x.vec());
        u = std::clamp(u, -cfg.u_max, cfg.u_max);

        State next = step(x, u, system, cfg.dt, cfg.substeps);
        Eigen::Vector4d delta = next.vec() - x.vec();
        if (noisy)
            for (int i = 0; i < kStateDim; ++i)
                delta(i) += cfg.noise_sd(i) * rng.normal();
        next = State::from_vec(x.vec() + delta);

        rec.actions(t) = u;
        rec.states.row(t + 1) = next.vec().transpose();
        rec.rewards(t) = reward(next, cfg.reward);
        rec.cumulative += rec.rewards(t);
        rec.steps_done = t + 1;
        x = next;

        if (!x.within_limits()) {
            rec.aborted = true;
            break;
        }
    }
    rec.states.conservativeResize(rec.steps_done + 1, Eigen::NoChange);
    rec.actions.conservativeResize(rec.steps_done);
    rec.rewards.conservativeResize(rec.steps_done);
    return rec;
}

model::TunableMeanPrior make_prior(const Params& nominal, double dt,
    int substeps, double lower_scale, double upper_scale,
    const std::array<bool, 6>& tunable)
{
    nominal.validate();
    static const char* names[6] = {"m1", "m2", "l1", "l2", "b1", "b2"};
    const std::array<double, 6> nom
        = {nominal.m1, nominal.m2, nominal.l1, nominal.l2, nominal.b1, nominal.b2};

    std::vector<int> idx;
    for (int i = 0; i < 6; ++i)
        if (tunable[i])
            idx.push_back(i);
    const int n = static_cast<int>(idx.size());
    if (n == 0)
        throw std::invalid_argument("make_prior: no tunable parameters");

    Eigen::VectorXd lower(n), upper(n), initial(n);
    model::TunableMeanPrior prior;
    for (int k = 0; k < n; ++k) {
        initial(k) = nom[idx[k]];
        lower(k) = std::max(1e-3, lower_scale * nom[idx[k]]);
        upper(k) = std::max(lower(k) + 1e-3, upper_scale * std::max(nom[idx[k]], 0.25));
        prior.param_names.push_back(names[idx[k]]);
    }
    prior.space = model::PriorParameterSpace::box(lower, upper, initial);
    prior.state_dim = kStateDim;

    prior.eval = [nominal, idx, dt, substeps](const Eigen::VectorXd& input,
                     const Eigen::VectorXd& phi) -> Eigen::VectorXd {
        Params p = nominal;
        double* fields[6] = {&p.m1, &p.m2, &p.l1, &p.l2, &p.b1, &p.b2};
        for (int k = 0; k < static_cast<int>(idx.size()); ++k)
            *fields[idx[k]] = phi(k);
        const State s = State::from_vec(input.head<4>());
        const double u = std::clamp(input(4), -kTorqueLimit, kTorqueLimit);
        return step(s, u, p, dt, substeps).vec() - s.vec();
    };
    return prior;
}

model::TunableMeanPrior make_discrete_prior(
    const std::vector<Params>& candidates, double dt, int substeps)
{
    if (candidates.empty())
        throw std::invalid_argument("make_discrete_prior: no candidates");
    std::vector<Eigen::VectorXd> phis;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Params& p = candidates[i];
        p.validate();
        Eigen::VectorXd v(6);
        v << p.m1, p.m2, p.l1, p.l2, p.b1, p.b2;
        phis.push_back(v);
        labels.push_back("candidate_" + std::to_string(i));
    }

    model::TunableMeanPrior prior;
    prior.space = model::PriorParameterSpace::discrete_set(phis, labels);
    prior.state_dim = kStateDim;
    prior.param_names = {"m1", "m2", "l1", "l2", "b1", "b2"};
    prior.eval = [dt, substeps](const Eigen::VectorXd& input,
                     const Eigen::VectorXd& phi) -> Eigen::VectorXd {
        Params p{phi(0), phi(1), phi(2), phi(3), phi(4), phi(5)};
        const State s = State::from_vec(input.head<4>());
        const double u = std::clamp(input(4), -kTorqueLimit, kTorqueLimit);
        return step(s, u, p, dt, substeps).vec() - s.vec();
    };
    return prior;
}

} // namespace mbps::pendubot

#include <mbps/model/dynamics_model.hpp>

#include <cmath>
#include <stdexcept>

namespace mbps::model {

std::string to_string(ModelMode mode)
{
    switch (mode) {
    case ModelMode::gp_only:
        return "gp_only";
    case ModelMode::gp_fixed_prior:
        return "gp_fixed_prior";
    case ModelMode::gp_mi:
        return "gp_mi";
    case ModelMode::mi_only:
        return "mi_only";
    }
    return "unknown";
}

ModelMode mode_from_string(const std::string& s)
{
    if (s == "gp_only")
        return ModelMode::gp_only;
    if (s == "gp_fixed_prior")
        return ModelMode::gp_fixed_prior;
    if (s == "gp_mi")
        return ModelMode::gp_mi;
    if (s == "mi_only")
        return ModelMode::mi_only;
    throw std::invalid_argument("unknown model mode: " + s);
}

FittedDynamicsModel FittedDynamicsModel::make_gp(ModelMode mode,
    std::optional<TunableMeanPrior> prior, Eigen::VectorXd phi,
    std::vector<gp::FittedGP> gps, int state_dim, int action_dim)
{
    if (static_cast<int>(gps.size()) != state_dim)
        throw std::invalid_argument("FittedDynamicsModel: need one GP per state dim");
    FittedDynamicsModel m;
    m._mode = mode;
    m._prior = std::move(prior);
    m._phi = std::move(phi);
    m._gps = std::move(gps);
    m._state_dim = state_dim;
    m._action_dim = action_dim;
    return m;
}

FittedDynamicsModel FittedDynamicsModel::make_parametric(TunableMeanPrior prior,
    Eigen::VectorXd phi, int state_dim, int action_dim)
{
    FittedDynamicsModel m;
    m._mode = ModelMode::mi_only;
    m._prior = std::move(prior);
    m._phi = std::move(phi);
    m._state_dim = state_dim;
    m._action_dim = action_dim;
    return m;
}

Eigen::VectorXd FittedDynamicsModel::prior_mean(const Eigen::VectorXd& input) const
{
    if (_prior)
        return _prior->eval(input, _phi);
    return Eigen::VectorXd::Zero(_state_dim);
}

FittedDynamicsModel::Delta FittedDynamicsModel::predict_delta(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u) const
{
    if (x.size() != _state_dim || u.size() != _action_dim)
        throw std::invalid_argument("FittedDynamicsModel: dimension mismatch");
    Eigen::VectorXd input(_state_dim + _action_dim);
    input << x, u;

    Delta d;
    d.mean = prior_mean(input);
    d.variance = Eigen::VectorXd::Zero(_state_dim);
    if (_mode == ModelMode::mi_only)
        return d;

    for (int i = 0; i < _state_dim; ++i) {
        auto p = _gps[i].predict_given_mean(input, d.mean(i));
        d.mean(i) = p.mean;
        d.variance(i) = p.variance;
    }
    return d;
}

Eigen::VectorXd FittedDynamicsModel::sample_delta(const Eigen::VectorXd& x,
    const Eigen::VectorXd& u, Rng& rng) const
{
    Delta d = predict_delta(x, u);
    for (int i = 0; i < _state_dim; ++i)
        if (d.variance(i) > 0.0)
            d.mean(i) += std::sqrt(d.variance(i)) * rng.normal();
    return d.mean;
}

} // namespace mbps::model

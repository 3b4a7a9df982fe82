#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <mbps/gp/gp.hpp>
#include <mbps/model/prior.hpp>
#include <mbps/rng.hpp>

namespace mbps::model {

enum class ModelMode { gp_only, gp_fixed_prior, gp_mi, mi_only };

std::string to_string(ModelMode mode);
ModelMode mode_from_string(const std::string& s);

// One-step probabilistic dynamics model: E independent GPs over a shared
// tunable prior mean (or the bare prior for mi_only). Immutable once built;
// safe for concurrent rollouts.
class FittedDynamicsModel {
public:
    FittedDynamicsModel() = default;

    static FittedDynamicsModel make_gp(ModelMode mode,
        std::optional<TunableMeanPrior> prior, Eigen::VectorXd phi,
        std::vector<gp::FittedGP> gps, int state_dim, int action_dim);

    static FittedDynamicsModel make_parametric(TunableMeanPrior prior,
        Eigen::VectorXd phi, int state_dim, int action_dim);

    ModelMode mode() const { return _mode; }
    int state_dim() const { return _state_dim; }
    int action_dim() const { return _action_dim; }
    const Eigen::VectorXd& phi() const { return _phi; }
    const std::vector<gp::FittedGP>& gps() const { return _gps; }
    bool has_prior() const { return _prior.has_value(); }

    // set when the identification step fell back to the initial phi
    bool fallback() const { return _fallback; }
    void mark_fallback() { _fallback = true; }

    // argmax index for discrete spaces, -1 otherwise
    int discrete_index() const { return _discrete_index; }
    void set_discrete_index(int i) { _discrete_index = i; }

    Eigen::VectorXd prior_mean(const Eigen::VectorXd& input) const;

    struct Delta {
        Eigen::VectorXd mean;
        Eigen::VectorXd variance;
    };
    Delta predict_delta(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
    Eigen::VectorXd sample_delta(const Eigen::VectorXd& x,
        const Eigen::VectorXd& u, Rng& rng) const;

private:
    ModelMode _mode = ModelMode::gp_only;
    int _state_dim = 0;
    int _action_dim = 0;
    std::optional<TunableMeanPrior> _prior;
    Eigen::VectorXd _phi;
    std::vector<gp::FittedGP> _gps;
    bool _fallback = false;
    int _discrete_index = -1;
};

} // namespace mbps::model

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mbps::model {

// Search space of the prior's tunable parameters phi.
struct PriorParameterSpace {
    enum class Kind { continuous, discrete };
    Kind kind = Kind::continuous;

    // continuous
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd initial;

    // discrete
    std::vector<Eigen::VectorXd> candidates;
    std::vector<std::string> labels;

    int dim() const;
    void validate() const;

    static PriorParameterSpace box(const Eigen::VectorXd& lower,
        const Eigen::VectorXd& upper, const Eigen::VectorXd& initial);
    static PriorParameterSpace discrete_set(
        std::vector<Eigen::VectorXd> candidates,
        std::vector<std::string> labels = {});
};

// Black-box tunable prior M(x~, phi) -> R^E. The evaluator must be
// deterministic for a fixed (x~, phi).
struct TunableMeanPrior {
    using Evaluator
        = std::function<Eigen::VectorXd(const Eigen::VectorXd& input,
            const Eigen::VectorXd& phi)>;

    Evaluator eval;
    PriorParameterSpace space;
    int state_dim = 0;                    // E
    std::vector<std::string> param_names; // exposed (tunable) parameters

    // M at every row of `inputs`; result is t x E.
    Eigen::MatrixXd evaluate_all(const Eigen::MatrixXd& inputs,
        const Eigen::VectorXd& phi) const;
};

} // namespace mbps::model

#include <mbps/model/prior.hpp>

#include <stdexcept>

namespace mbps::model {

int PriorParameterSpace::dim() const
{
    if (kind == Kind::continuous)
        return static_cast<int>(lower.size());
    return candidates.empty() ? 0 : static_cast<int>(candidates.front().size());
}

void PriorParameterSpace::validate() const
{
    if (kind == Kind::continuous) {
        if (lower.size() == 0 || lower.size() != upper.size()
            || lower.size() != initial.size())
            throw std::invalid_argument("PriorParameterSpace: bad bound sizes");
        if (((upper - lower).array() <= 0.0).any())
            throw std::invalid_argument("PriorParameterSpace: lower must be < upper");
        if ((initial.array() < lower.array()).any()
            || (initial.array() > upper.array()).any())
            throw std::invalid_argument("PriorParameterSpace: initial out of bounds");
    }
    else {
        if (candidates.empty())
            throw std::invalid_argument("PriorParameterSpace: empty candidate list");
        for (const auto& c : candidates)
            if (c.size() != candidates.front().size())
                throw std::invalid_argument(
                    "PriorParameterSpace: candidate size mismatch");
    }
}

PriorParameterSpace PriorParameterSpace::box(const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, const Eigen::VectorXd& initial)
{
    PriorParameterSpace s;
    s.kind = Kind::continuous;
    s.lower = lower;
    s.upper = upper;
    s.initial = initial;
    s.validate();
    return s;
}

PriorParameterSpace PriorParameterSpace::discrete_set(
    std::vector<Eigen::VectorXd> candidates, std::vector<std::string> labels)
{
    PriorParameterSpace s;
    s.kind = Kind::discrete;
    s.candidates = std::move(candidates);
    s.labels = std::move(labels);
    s.validate();
    return s;
}

Eigen::MatrixXd TunableMeanPrior::evaluate_all(const Eigen::MatrixXd& inputs,
    const Eigen::VectorXd& phi) const
{
    Eigen::MatrixXd out(inputs.rows(), state_dim);
    for (int i = 0; i < inputs.rows(); ++i) {
        Eigen::VectorXd m = eval(inputs.row(i).transpose(), phi);
        if (m.size() != state_dim)
            throw std::runtime_error("TunableMeanPrior: evaluator returned wrong size");
        out.row(i) = m.transpose();
    }
    return out;
}

} // namespace mbps::model

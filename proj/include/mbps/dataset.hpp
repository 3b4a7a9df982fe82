#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace mbps {

// State-action transitions (x, u) -> dx with dx = x_next - x. Inputs are
// stored as rows [x u] of width E+U, targets as rows of width E.
class TransitionDataset {
public:
    TransitionDataset(int state_dim, int action_dim);

    int state_dim() const { return _state_dim; }
    int action_dim() const { return _action_dim; }
    int input_dim() const { return _state_dim + _action_dim; }
    int size() const { return static_cast<int>(_inputs.rows()); }
    bool empty() const { return size() == 0; }

    void append(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
        const Eigen::VectorXd& dx);
    void append(const TransitionDataset& other);

    const Eigen::MatrixXd& inputs() const { return _inputs; }
    const Eigen::MatrixXd& targets() const { return _targets; }
    Eigen::VectorXd target_column(int dim) const { return _targets.col(dim); }

    // CSV with a mandatory header x0..x{E-1},u0..u{U-1},dx0..dx{E-1}.
    void save_csv(const std::string& path) const;
    void write_csv(std::ostream& os) const;
    static TransitionDataset load_csv(const std::string& path);
    static TransitionDataset read_csv(std::istream& is);

private:
    int _state_dim;
    int _action_dim;
    Eigen::MatrixXd _inputs;
    Eigen::MatrixXd _targets;
};

} // namespace mbps

#include <mbps/dataset.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mbps {

namespace {

    void check_finite(const Eigen::VectorXd& v, const char* what)
    {
        if (!v.allFinite())
            throw std::invalid_argument(
                std::string("TransitionDataset: non-finite ") + what);
    }

    std::string format_double(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

} // namespace

TransitionDataset::TransitionDataset(int state_dim, int action_dim)
    : _state_dim(state_dim), _action_dim(action_dim)
{
    if (state_dim < 1 || action_dim < 1)
        throw std::invalid_argument("TransitionDataset: dimensions must be >= 1");
    _inputs.resize(0, input_dim());
    _targets.resize(0, state_dim);
}

void TransitionDataset::append(const Eigen::VectorXd& x,
    const Eigen::VectorXd& u, const Eigen::VectorXd& dx)
{
    if (x.size() != _state_dim || u.size() != _action_dim
        || dx.size() != _state_dim)
        throw std::invalid_argument("TransitionDataset::append: dimension mismatch");
    check_finite(x, "state");
    check_finite(u, "action");
    check_finite(dx, "target");

    const int n = size();
    _inputs.conservativeResize(n + 1, Eigen::NoChange);
    _targets.conservativeResize(n + 1, Eigen::NoChange);
    _inputs.row(n).head(_state_dim) = x.transpose();
    _inputs.row(n).tail(_action_dim) = u.transpose();
    _targets.row(n) = dx.transpose();
}

void TransitionDataset::append(const TransitionDataset& other)
{
    if (other._state_dim != _state_dim || other._action_dim != _action_dim)
        throw std::invalid_argument("TransitionDataset::append: dimension mismatch");
    const int n = size();
    const int m = other.size();
    _inputs.conservativeResize(n + m, Eigen::NoChange);
    _targets.conservativeResize(n + m, Eigen::NoChange);
    _inputs.bottomRows(m) = other._inputs;
    _targets.bottomRows(m) = other._targets;
}

void TransitionDataset::write_csv(std::ostream& os) const
{
    for (int d = 0; d < _state_dim; ++d)
        os << "x" << d << ",";
    for (int d = 0; d < _action_dim; ++d)
        os << "u" << d << ",";
    for (int d = 0; d < _state_dim; ++d)
        os << "dx" << d << (d + 1 < _state_dim ? "," : "");
    os << "\n";
    for (int i = 0; i < size(); ++i) {
        for (int j = 0; j < _inputs.cols(); ++j)
            os << format_double(_inputs(i, j)) << ",";
        for (int j = 0; j < _targets.cols(); ++j)
            os << format_double(_targets(i, j))
               << (j + 1 < _targets.cols() ? "," : "");
        os << "\n";
    }
}

void TransitionDataset::save_csv(const std::string& path) const
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("TransitionDataset: cannot open " + path);
    write_csv(os);
}

TransitionDataset TransitionDataset::read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("TransitionDataset: missing header row");

    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            names.push_back(tok);
    }
    int e = 0, u = 0, dx = 0;
    for (const auto& n : names) {
        if (n.rfind("dx", 0) == 0)
            ++dx;
        else if (n.rfind("x", 0) == 0)
            ++e;
        else if (n.rfind("u", 0) == 0)
            ++u;
        else
            throw std::runtime_error("TransitionDataset: bad header column '" + n + "'");
    }
    if (e < 1 || u < 1 || dx != e)
        throw std::runtime_error("TransitionDataset: inconsistent header");

    TransitionDataset data(e, u);
    Eigen::VectorXd x(e), act(u), d(e);
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string tok;
        int col = 0;
        auto next = [&]() {
            if (!std::getline(ss, tok, ','))
                throw std::runtime_error(
                    "TransitionDataset: short row " + std::to_string(row));
            ++col;
            return std::stod(tok);
        };
        for (int j = 0; j < e; ++j)
            x(j) = next();
        for (int j = 0; j < u; ++j)
            act(j) = next();
        for (int j = 0; j < e; ++j)
            d(j) = next();
        data.append(x, act, d);
    }
    return data;
}

TransitionDataset TransitionDataset::load_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("TransitionDataset: cannot open " + path);
    return read_csv(is);
}

} // namespace mbps

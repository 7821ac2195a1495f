#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace minmaxlq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when an input document cannot be parsed at all.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a problem violates one or more model invariants.
// `violations()` lists every violated invariant, not just the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid problem:";
        for (const auto& item : v) {
            s += "\n  - " + item;
        }
        return s;
    }
    std::vector<std::string> violations_;
};

// Signals that a matrix required to be positive definite is not.
// During the simplex search this means an off-simplex perturbation left
// the admissible region.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Matrix exponential produced non-finite entries (extreme ||A||*dt).
class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

inline double min_eigenvalue_sym(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace minmaxlq

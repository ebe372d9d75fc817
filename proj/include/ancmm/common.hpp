#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ancmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown when an iterative scaling/solver loop exhausts its iteration budget.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

inline double symmetry_defect(const Matrix& S) {
    return (S - S.transpose()).cwiseAbs().maxCoeff();
}

// Relative symmetry test: defect measured against the matrix magnitude.
inline bool is_symmetric(const Matrix& S, double rel_tol = 1e-12) {
    if (S.rows() != S.cols()) return false;
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    return symmetry_defect(S) <= rel_tol * scale;
}

inline void require_square(const Matrix& S, const std::string& who) {
    require(S.rows() == S.cols(), who + ": matrix must be square");
    require(S.rows() >= 1, who + ": matrix must be non-empty");
}

inline void require_nonnegative(const Matrix& S, const std::string& who) {
    require(S.minCoeff() >= 0.0, who + ": matrix must be entrywise nonnegative");
}

}  // namespace ancmm

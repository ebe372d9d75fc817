#include "ancmm/ot_bridge.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ancmm::ot {

namespace {

Matrix masked_power_kernel(const Matrix& S, double omega) {
    if (omega == 1.0) return S;
    Matrix K(S.rows(), S.cols());
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
        for (Eigen::Index i = 0; i < S.rows(); ++i) {
            const double s = S(i, j);
            K(i, j) = s > 0.0 ? std::pow(s, omega) : 0.0;
        }
    }
    return K;
}

}  // namespace

TransportPlan entropic_plan(const Matrix& S, double omega, double tol, int max_iter) {
    require_square(S, "entropic_plan");
    require(S.rows() >= 2, "entropic_plan: need n >= 2");
    require(is_symmetric(S), "entropic_plan: matrix must be symmetric");
    require_nonnegative(S, "entropic_plan");
    require(omega > 0.0, "entropic_plan: omega must be positive");
    require(tol > 0.0, "entropic_plan: tol must be positive");
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
        require(S.row(i).maxCoeff() > 0.0,
                "entropic_plan: row " + std::to_string(i) + " is all zero");
    }

    const Matrix K = masked_power_kernel(S, omega);
    const Eigen::Index n = K.rows();
    Vector r = Vector::Ones(n);
    Vector c = Vector::Ones(n);
    const double inner_tol = 0.5 * tol;

    int iterations = 0;
    double defect = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (; iterations <= max_iter; ++iterations) {
        const Vector kc = K * c;
        const Vector ktr = K.transpose() * r;
        const double row_defect = (r.cwiseProduct(kc).array() - 1.0).abs().maxCoeff();
        const double col_defect = (c.cwiseProduct(ktr).array() - 1.0).abs().maxCoeff();
        defect = std::max(row_defect, col_defect);
        if (defect <= inner_tol) {
            converged = true;
            break;
        }
        if (iterations == max_iter) break;
        r = kc.cwiseInverse();
        c = (K.transpose() * r).cwiseInverse();
        if (!r.allFinite() || !c.allFinite() || r.minCoeff() <= 0.0 || c.minCoeff() <= 0.0) {
            throw NonConvergenceError(
                "entropic_plan: scaling factors left the positive orthant",
                iterations + 1, defect);
        }
    }
    if (!converged) {
        throw NonConvergenceError(
            "entropic_plan: no convergence after " + std::to_string(max_iter) +
                " iterations; kernel may lack total support",
            max_iter, defect);
    }

    TransportPlan plan;
    plan.P = r.asDiagonal() * K * c.asDiagonal();
    plan.omega = omega;
    // Stationarity gives p_ij = e^{-1/2 - omega phi_i} s_ij^omega e^{-1/2 - omega xi_j},
    // so the scaling factors determine the duals directly.
    plan.dual_row = (-(r.array().log() + 0.5) / omega).matrix();
    plan.dual_col = (-(c.array().log() + 0.5) / omega).matrix();
    plan.iterations = iterations;
    plan.marginal_residual = std::max(
        (plan.P.rowwise().sum().array() - 1.0).abs().maxCoeff(),
        (plan.P.colwise().sum().array() - 1.0).abs().maxCoeff());
    return plan;
}

double plan_symmetry_check(const TransportPlan& plan) {
    return symmetry_defect(plan.P);
}

}  // namespace ancmm::ot

#pragma once

#include "ancmm/common.hpp"

// Entropic optimal transport over the kernel S^omega with unit marginals.
// Serves as an independent oracle for the diagonal balancing in marcus.
namespace ancmm::ot {

constexpr double kDefaultTol = 1e-10;
constexpr int kDefaultMaxIter = 10000;

struct TransportPlan {
    Matrix P;
    double omega = 1.0;
    Vector dual_row;  // Lagrange multipliers phi for the row constraints
    Vector dual_col;  // Lagrange multipliers xi for the column constraints
    int iterations = 0;
    double marginal_residual = 0.0;
};

/// Minimizer of <P, -log S> + (1/omega) sum P log P over couplings with unit
/// marginals, computed by alternating marginal scaling of K = S^omega.
/// Zeros of S are masked, never logged or exponentiated, so the plan has no
/// fill-in. Throws std::invalid_argument for omega <= 0 and
/// NonConvergenceError when scaling stalls.
TransportPlan entropic_plan(const Matrix& S, double omega,
                            double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

/// max_ij |P_ij - P_ji|; converged plans from symmetric S stay <= 1e-8.
double plan_symmetry_check(const TransportPlan& plan);

}  // namespace ancmm::ot

#pragma once

#include <vector>

#include "ancmm/common.hpp"

// Adaptive-neighbors graph learning: pairwise costs, the per-row closed-form
// simplex solve, sparsity-controlled regularizer selection, symmetrization,
// and the sample reordering that certifies the balancing precondition.
namespace ancmm::graph {

struct SparsityParams {
    int k = 0;
    double alpha = 0.0;  // global regularizer, >= every per-row bound
    Vector alpha_rows;   // per-row regularizer giving exactly k neighbors
};

struct OrderingResult {
    std::vector<int> perm;  // position -> original sample index
    bool found = false;
};

/// m_ij = ||x_i - x_j||^2, zero diagonal, exactly symmetric.
Matrix pairwise_cost(const Matrix& X);

/// m_ij = ||x_i - x_j||^2 + lambda ||f_i - f_j||^2.
Matrix pairwise_cost(const Matrix& X, const Matrix& F, double lambda);

/// Squared-distance matrix of the rows of A (helper shared by both forms).
Matrix squared_distances(const Matrix& A);

/// Closed-form solution of min ||s + m/(2 alpha)||^2 over the simplex with
/// the self entry pinned to zero. exclude_self = -1 solves without a pinned
/// entry. Ties in costs break by ascending index.
Vector solve_row(const Vector& costs, double alpha, int exclude_self);

/// Per-row alpha_i placed inside the exact-k sparsity interval (90% toward
/// the upper bound) plus the global alpha = max_i of the k=2 upper bounds.
/// Rows whose sorted costs tie across the k boundary fall back to the
/// smallest achievable support >= k (uniform row when all costs tie).
SparsityParams select_alpha(const Matrix& M, int k);

/// (S + S^T) / 2.
Matrix symmetrize(const Matrix& S);

/// Best-effort search for a simultaneous row/column ordering making the
/// first and second superdiagonals strictly positive. found=false returns
/// the identity permutation; downstream balancing proceeds anyway and its
/// convergence monitor is the arbiter.
OrderingResult order_for_marcus(const Matrix& S);

/// B[i][j] = S[perm[i]][perm[j]].
Matrix apply_ordering(const Matrix& S, const std::vector<int>& perm);

}  // namespace ancmm::graph

#pragma once

#include <utility>

#include "ancmm/common.hpp"

// Symmetric doubly stochastic normalization: the diagonal scaling S -> DSD,
// its feasibility checks (superdiagonal condition, total support), and the
// degree-normalization baseline it is benchmarked against.
namespace ancmm::marcus {

constexpr double kDefaultTol = 1e-10;
constexpr int kDefaultMaxIter = 10000;

struct BalanceReport {
    int iterations = 0;
    double residual = 0.0;  // max_i |row_sum_i - 1| of the output
    bool converged = false;
};

struct ScalingResult {
    Matrix balanced;
    Vector scaling;  // u with D = diag(u)
    BalanceReport report;
};

struct DegreeResult {
    Matrix balanced;
    BalanceReport report;
};

// Analytical per-iteration operation counts for the two balancing loops.
struct FlopBreakdown {
    long long adds = 0;
    long long muls = 0;
    long long divs = 0;
    long long sqrts = 0;
};

/// True iff every entry of the first and second superdiagonal is strictly
/// positive. Sufficient (not necessary) for balanceability of a symmetric
/// nonnegative matrix.
bool check_marcus_condition(const Matrix& S);

/// Exact total-support oracle: every positive entry lies on a positive
/// permutation diagonal. Decided via maximum bipartite matching plus the
/// strongly connected components of the matching-oriented graph.
bool check_total_support(const Matrix& S);

/// Diagonal balancing S -> DSD with a single positive diagonal D, computed by
/// the damped reciprocal iteration on u. Throws NonConvergenceError when the
/// iteration budget runs out (lack of total support) and on NaN/overflow.
ScalingResult marcus_map(const Matrix& S, double tol = kDefaultTol,
                         int max_iter = kDefaultMaxIter);

/// Baseline: repeat S <- D^{-1/2} S D^{-1/2} with D = diag(S 1) until row
/// sums reach 1 within tol. Same limit as marcus_map when it exists.
DegreeResult degree_normalize_iterate(const Matrix& S, double tol = kDefaultTol,
                                      int max_iter = kDefaultMaxIter);

/// (marcus_cost, degree_cost) per iteration at dimension n.
std::pair<FlopBreakdown, FlopBreakdown> count_flops_per_iteration(long long n);

}  // namespace ancmm::marcus

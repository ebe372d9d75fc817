#pragma once

#include <vector>

#include "ancmm/common.hpp"

// Graph Laplacian, smallest eigenpairs, zero-eigenvalue counting for the
// rank test, and connected-component extraction.
namespace ancmm::spectral {

constexpr double kDefaultEpsRank = 1e-8;
constexpr double kDefaultEdgeEps = 1e-8;

struct SpectralEmbedding {
    Matrix vectors;  // n x c, orthonormal columns
    Vector values;   // smallest c eigenvalues, ascending
};

struct ComponentLabels {
    std::vector<int> labels;  // component id per node, first-occurrence order
    int count = 0;
};

/// L = D - W with W = (S + S^T)/2 and D = diag(W 1).
Matrix laplacian(const Matrix& S);

/// The c smallest eigenvalues of a symmetric matrix and an orthonormal basis
/// of the corresponding invariant subspace. Deterministic: eigenvalues
/// ascending; each vector's first coordinate with magnitude above 1e-8 is
/// made positive.
SpectralEmbedding smallest_eigenpairs(const Matrix& L, int c);

/// Relative threshold used by the zero-eigenvalue count.
double zero_eigenvalue_threshold(const Matrix& L, double eps_rank);

/// Number of the smallest c_plus_1 eigenvalues below
/// eps_rank * (1 + trace(L)/n).
int count_zero_eigenvalues(const Matrix& L, int c_plus_1,
                           double eps_rank = kDefaultEpsRank);

/// Components of the graph with edges {(i, j) : S_ij > edge_eps}.
ComponentLabels connected_components(const Matrix& S,
                                     double edge_eps = kDefaultEdgeEps);

}  // namespace ancmm::spectral

#include "ancmm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <deque>

namespace ancmm::spectral {

Matrix laplacian(const Matrix& S) {
    require_square(S, "laplacian");
    require_nonnegative(S, "laplacian");
    Matrix W = 0.5 * (S + S.transpose());
    const Vector degree = W.rowwise().sum();
    Matrix L = -W;
    L.diagonal() += degree;
    return L;
}

SpectralEmbedding smallest_eigenpairs(const Matrix& L, int c) {
    require_square(L, "smallest_eigenpairs");
    require(is_symmetric(L, 1e-10), "smallest_eigenpairs: matrix must be symmetric");
    const int n = static_cast<int>(L.rows());
    require(c >= 1 && c <= n, "smallest_eigenpairs: need 1 <= c <= n");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(L);
    require(solver.info() == Eigen::Success, "smallest_eigenpairs: eigensolver failed");

    SpectralEmbedding embedding;
    embedding.values = solver.eigenvalues().head(c);
    embedding.vectors = solver.eigenvectors().leftCols(c);
    // Sign convention: first coordinate with |x| > 1e-8 is positive.
    for (int j = 0; j < c; ++j) {
        for (int i = 0; i < n; ++i) {
            const double x = embedding.vectors(i, j);
            if (std::abs(x) > 1e-8) {
                if (x < 0.0) embedding.vectors.col(j) = -embedding.vectors.col(j);
                break;
            }
        }
    }
    return embedding;
}

double zero_eigenvalue_threshold(const Matrix& L, double eps_rank) {
    return eps_rank * (1.0 + L.trace() / static_cast<double>(L.rows()));
}

int count_zero_eigenvalues(const Matrix& L, int c_plus_1, double eps_rank) {
    require(eps_rank > 0.0, "count_zero_eigenvalues: eps_rank must be positive");
    require(c_plus_1 >= 1 && c_plus_1 <= L.rows(),
            "count_zero_eigenvalues: bad eigenvalue count");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(L, Eigen::EigenvaluesOnly);
    require(solver.info() == Eigen::Success, "count_zero_eigenvalues: eigensolver failed");
    const double threshold = zero_eigenvalue_threshold(L, eps_rank);
    int zeros = 0;
    for (int i = 0; i < c_plus_1; ++i) {
        if (solver.eigenvalues()[i] < threshold) ++zeros;
    }
    return zeros;
}

ComponentLabels connected_components(const Matrix& S, double edge_eps) {
    require_square(S, "connected_components");
    require(is_symmetric(S), "connected_components: matrix must be symmetric");
    const int n = static_cast<int>(S.rows());

    ComponentLabels result;
    result.labels.assign(n, -1);
    std::deque<int> queue;
    for (int start = 0; start < n; ++start) {
        if (result.labels[start] != -1) continue;
        const int label = result.count++;
        result.labels[start] = label;
        queue.push_back(start);
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (int w = 0; w < n; ++w) {
                if (w != v && result.labels[w] == -1 && S(v, w) > edge_eps) {
                    result.labels[w] = label;
                    queue.push_back(w);
                }
            }
        }
    }
    return result;
}

}  // namespace ancmm::spectral

#pragma once

#include <cstdint>
#include <vector>

#include "ancmm/ancmm.hpp"
#include "ancmm/common.hpp"

// Clustering metrics and the comparison baselines.
namespace ancmm::eval {

using LabelVector = std::vector<int>;

struct MetricReport {
    double acc = 0.0;
    double nmi = 0.0;
    double pur = 0.0;
};

/// Fraction of samples matched under the best label bijection, found by
/// optimal assignment on the contingency counts.
double accuracy(const LabelVector& pred, const LabelVector& truth);

/// I(pred; truth) / sqrt(H(pred) H(truth)), natural log, 0/0 -> 0.
double nmi(const LabelVector& pred, const LabelVector& truth);

/// (1/n) sum over predicted clusters of the dominant class overlap.
double purity(const LabelVector& pred, const LabelVector& truth);

MetricReport evaluate(const LabelVector& pred, const LabelVector& truth);

/// Lloyd iterations with k-means++ seeding; best inertia over restarts.
LabelVector kmeans(const Matrix& X, int c, int restarts, std::uint64_t seed);

/// Gaussian k-NN affinity (sigma <= 0 means the median k-th neighbor
/// distance), symmetric normalized Laplacian, row-normalized embedding,
/// k-means on the rows.
LabelVector spectral_baseline(const Matrix& X, int c, int knn, double sigma,
                              std::uint64_t seed);

/// Ablation isolating the doubly stochastic stage: the adaptive-neighbors
/// loop with plain row-stochastic updates.
ClusterResult can_mode(const Matrix& X, const AncmmConfig& cfg);

namespace detail {

/// Single k-means run; exposes the per-iteration inertia for tests.
LabelVector lloyd(const Matrix& X, int c, std::uint64_t seed,
                  std::vector<double>* inertia_trace, double* final_inertia);

}  // namespace detail

}  // namespace ancmm::eval

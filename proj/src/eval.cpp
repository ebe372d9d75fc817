#include "ancmm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "ancmm/rng.hpp"
#include "ancmm/spectral.hpp"

namespace ancmm::eval {

namespace {

std::vector<int> relabel_contiguous(const LabelVector& labels, int* count) {
    std::unordered_map<int, int> ids;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = ids.try_emplace(labels[i], static_cast<int>(ids.size())).first->second;
    }
    *count = static_cast<int>(ids.size());
    return out;
}

// Counts[i][j] = |{pred == i and truth == j}| over contiguous labels.
std::vector<std::vector<long long>> contingency(const LabelVector& pred,
                                                const LabelVector& truth,
                                                int* n_pred, int* n_truth) {
    require(pred.size() == truth.size(), "metrics: label vectors differ in length");
    require(!pred.empty(), "metrics: empty label vectors");
    const std::vector<int> p = relabel_contiguous(pred, n_pred);
    const std::vector<int> t = relabel_contiguous(truth, n_truth);
    std::vector<std::vector<long long>> counts(
        *n_pred, std::vector<long long>(*n_truth, 0));
    for (std::size_t i = 0; i < p.size(); ++i) counts[p[i]][t[i]] += 1;
    return counts;
}

// Shortest-augmenting-path assignment with potentials; row -> column of the
// square cost matrix minimizing the total cost.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

}  // namespace

double accuracy(const LabelVector& pred, const LabelVector& truth) {
    int n_pred = 0, n_truth = 0;
    const auto counts = contingency(pred, truth, &n_pred, &n_truth);
    const int m = std::max(n_pred, n_truth);
    std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < n_pred; ++i) {
        for (int j = 0; j < n_truth; ++j) {
            cost[i][j] = -static_cast<double>(counts[i][j]);
        }
    }
    const std::vector<int> assign = min_cost_assignment(cost);
    long long matched = 0;
    for (int i = 0; i < n_pred; ++i) {
        if (assign[i] < n_truth) matched += counts[i][assign[i]];
    }
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const LabelVector& pred, const LabelVector& truth) {
    int n_pred = 0, n_truth = 0;
    const auto counts = contingency(pred, truth, &n_pred, &n_truth);
    const double n = static_cast<double>(pred.size());

    std::vector<double> p_row(n_pred, 0.0), p_col(n_truth, 0.0);
    for (int i = 0; i < n_pred; ++i) {
        for (int j = 0; j < n_truth; ++j) {
            p_row[i] += counts[i][j];
            p_col[j] += counts[i][j];
        }
    }
    for (double& x : p_row) x /= n;
    for (double& x : p_col) x /= n;

    double h_row = 0.0, h_col = 0.0, mutual = 0.0;
    for (double x : p_row) {
        if (x > 0.0) h_row -= x * std::log(x);
    }
    for (double x : p_col) {
        if (x > 0.0) h_col -= x * std::log(x);
    }
    for (int i = 0; i < n_pred; ++i) {
        for (int j = 0; j < n_truth; ++j) {
            if (counts[i][j] == 0) continue;
            const double joint = counts[i][j] / n;
            mutual += joint * std::log(joint / (p_row[i] * p_col[j]));
        }
    }
    const double denom = std::sqrt(h_row * h_col);
    return denom > 0.0 ? mutual / denom : 0.0;
}

double purity(const LabelVector& pred, const LabelVector& truth) {
    int n_pred = 0, n_truth = 0;
    const auto counts = contingency(pred, truth, &n_pred, &n_truth);
    long long dominant = 0;
    for (int i = 0; i < n_pred; ++i) {
        dominant += *std::max_element(counts[i].begin(), counts[i].end());
    }
    return static_cast<double>(dominant) / static_cast<double>(pred.size());
}

MetricReport evaluate(const LabelVector& pred, const LabelVector& truth) {
    return {accuracy(pred, truth), nmi(pred, truth), purity(pred, truth)};
}

namespace detail {

LabelVector lloyd(const Matrix& X, int c, std::uint64_t seed,
                  std::vector<double>* inertia_trace, double* final_inertia) {
    const int n = static_cast<int>(X.rows());
    rng::Engine engine(seed);

    // k-means++ seeding.
    Matrix centroids(c, X.cols());
    std::vector<char> chosen(n, 0);
    Vector nearest = Vector::Constant(n, std::numeric_limits<double>::infinity());
    {
        const int first = static_cast<int>(rng::uniform_index(engine, n));
        centroids.row(0) = X.row(first);
        chosen[first] = 1;
        for (int picked = 1; picked < c; ++picked) {
            for (int i = 0; i < n; ++i) {
                const double d = (X.row(i) - centroids.row(picked - 1)).squaredNorm();
                nearest[i] = std::min(nearest[i], d);
            }
            const double total = nearest.sum();
            int next = -1;
            if (total > 0.0) {
                double target = rng::uniform01(engine) * total;
                for (int i = 0; i < n; ++i) {
                    target -= nearest[i];
                    if (target <= 0.0) {
                        next = i;
                        break;
                    }
                }
                if (next < 0) next = n - 1;
            } else {
                // All mass at existing centroids; take the first unused point.
                for (int i = 0; i < n; ++i) {
                    if (!chosen[i]) {
                        next = i;
                        break;
                    }
                }
                if (next < 0) next = static_cast<int>(rng::uniform_index(engine, n));
            }
            centroids.row(picked) = X.row(next);
            chosen[next] = 1;
        }
    }

    LabelVector labels(n, 0);
    double inertia = std::numeric_limits<double>::infinity();
    constexpr int kMaxLloyd = 300;
    for (int iter = 0; iter < kMaxLloyd; ++iter) {
        bool changed = iter == 0;
        inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (X.row(i) - centroids.row(0)).squaredNorm();
            for (int j = 1; j < c; ++j) {
                const double d = (X.row(i) - centroids.row(j)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
            inertia += best_d;
        }
        if (inertia_trace) inertia_trace->push_back(inertia);
        if (!changed) break;

        Matrix sums = Matrix::Zero(c, X.cols());
        std::vector<int> sizes(c, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(labels[i]) += X.row(i);
            ++sizes[labels[i]];
        }
        for (int j = 0; j < c; ++j) {
            if (sizes[j] > 0) {
                centroids.row(j) = sums.row(j) / sizes[j];
            } else {
                // Reseed an empty cluster at the point farthest from its centroid.
                int farthest = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d = (X.row(i) - centroids.row(labels[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        farthest = i;
                    }
                }
                centroids.row(j) = X.row(farthest);
            }
        }
    }
    if (final_inertia) *final_inertia = inertia;
    return labels;
}

}  // namespace detail

LabelVector kmeans(const Matrix& X, int c, int restarts, std::uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    require(c >= 1 && c <= n, "kmeans: need 1 <= c <= n");
    require(restarts >= 1, "kmeans: need at least one restart");
    if (c == 1) return LabelVector(n, 0);

    LabelVector best_labels;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        double inertia = 0.0;
        LabelVector labels =
            detail::lloyd(X, c, seed + 0x9E3779B97F4A7C15ULL * r, nullptr, &inertia);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best_labels = std::move(labels);
        }
    }
    return best_labels;
}

LabelVector spectral_baseline(const Matrix& X, int c, int knn, double sigma,
                              std::uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    require(c >= 1 && c <= n, "spectral_baseline: need 1 <= c <= n");
    require(knn >= 1 && knn < n, "spectral_baseline: need 1 <= knn < n");

    const Matrix d2 = graph::squared_distances(X);

    // k nearest neighbors per row plus the self-tuning bandwidth.
    std::vector<std::vector<int>> neighbors(n);
    std::vector<double> kth_distance(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> order;
        order.reserve(n - 1);
        for (int j = 0; j < n; ++j) {
            if (j != i) order.push_back(j);
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return d2(i, a) < d2(i, b); });
        order.resize(knn);
        neighbors[i] = std::move(order);
        kth_distance[i] = std::sqrt(d2(i, neighbors[i].back()));
    }
    if (sigma <= 0.0) {
        std::vector<double> sorted = kth_distance;
        std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
        sigma = std::max(sorted[n / 2], 1e-12);
    }

    Matrix W = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j : neighbors[i]) {
            W(i, j) = std::exp(-d2(i, j) / (2.0 * sigma * sigma));
        }
    }
    W = 0.5 * (W + W.transpose()).eval();

    const Vector inv_sqrt_degree = W.rowwise().sum().array().rsqrt().matrix();
    Matrix l_sym = Matrix::Identity(n, n) -
                   (inv_sqrt_degree.asDiagonal() * W * inv_sqrt_degree.asDiagonal());
    l_sym = 0.5 * (l_sym + l_sym.transpose()).eval();

    Matrix embedding = spectral::smallest_eigenpairs(l_sym, c).vectors;
    for (int i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    return kmeans(embedding, c, 30, seed);
}

ClusterResult can_mode(const Matrix& X, const AncmmConfig& cfg) {
    return run_can(X, cfg);
}

}  // namespace ancmm::eval

#include "ancmm/graph_learning.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ancmm/marcus.hpp"
#include "ancmm/rng.hpp"

namespace ancmm::graph {

namespace {

// Sorted view of one cost row with the self entry removed. Ties keep
// ascending original index so the assembled graph is deterministic.
struct SortedRow {
    std::vector<int> index;    // sorted position -> original column
    std::vector<double> cost;  // ascending
    std::vector<double> prefix;
};

SortedRow sort_row(const Vector& costs, int exclude_self) {
    SortedRow row;
    const int n = static_cast<int>(costs.size());
    row.index.reserve(n);
    for (int j = 0; j < n; ++j) {
        if (j != exclude_self) row.index.push_back(j);
    }
    std::stable_sort(row.index.begin(), row.index.end(),
                     [&](int a, int b) { return costs[a] < costs[b]; });
    row.cost.resize(row.index.size());
    row.prefix.resize(row.index.size());
    double running = 0.0;
    for (std::size_t t = 0; t < row.index.size(); ++t) {
        row.cost[t] = costs[row.index[t]];
        running += row.cost[t];
        row.prefix[t] = running;
    }
    return row;
}

// Exact-k interval endpoints: (lower, upper] = ((k m_(k) - sum_k)/2, (k m_(k+1) - sum_k)/2].
double interval_lower(const SortedRow& row, int k) {
    return 0.5 * (k * row.cost[k - 1] - row.prefix[k - 1]);
}

double interval_upper(const SortedRow& row, int k) {
    return 0.5 * (k * row.cost[k] - row.prefix[k - 1]);
}

}  // namespace

Matrix squared_distances(const Matrix& A) {
    const Eigen::Index n = A.rows();
    Matrix D = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = (A.row(i) - A.row(j)).squaredNorm();
            D(i, j) = d;
            D(j, i) = d;
        }
    }
    return D;
}

Matrix pairwise_cost(const Matrix& X) {
    require(X.rows() >= 2, "pairwise_cost: need at least two samples");
    return squared_distances(X);
}

Matrix pairwise_cost(const Matrix& X, const Matrix& F, double lambda) {
    require(lambda >= 0.0, "pairwise_cost: lambda must be >= 0");
    require(X.rows() == F.rows(),
            "pairwise_cost: X and F must have the same number of rows");
    const Matrix gram = F.transpose() * F;
    require((gram - Matrix::Identity(F.cols(), F.cols())).cwiseAbs().maxCoeff() <= 1e-6,
            "pairwise_cost: F must be column-orthonormal");
    Matrix M = squared_distances(X);
    if (lambda > 0.0) M += lambda * squared_distances(F);
    return M;
}

Vector solve_row(const Vector& costs, double alpha, int exclude_self) {
    const int n = static_cast<int>(costs.size());
    require(n >= 2, "solve_row: need at least two entries");
    require(alpha > 0.0, "solve_row: alpha must be positive");
    require(exclude_self >= -1 && exclude_self < n, "solve_row: bad self index");
    require(costs.allFinite(), "solve_row: costs must be finite");

    const SortedRow row = sort_row(costs, exclude_self);
    const int m = static_cast<int>(row.index.size());

    // Largest active-set size rho with all active entries positive:
    // -m_(rho)/(2a) + phi(rho) > 0  <=>  1 + (sum_rho - rho m_(rho))/(2a) > 0.
    int rho = 1;
    for (int k = 2; k <= m; ++k) {
        if (1.0 + (row.prefix[k - 1] - k * row.cost[k - 1]) / (2.0 * alpha) > 0.0) {
            rho = k;
        }
    }
    const double phi = 1.0 / rho + row.prefix[rho - 1] / (2.0 * rho * alpha);

    Vector s = Vector::Zero(n);
    for (int t = 0; t < rho; ++t) {
        s[row.index[t]] = std::max(0.0, -row.cost[t] / (2.0 * alpha) + phi);
    }
    s /= s.sum();
    return s;
}

SparsityParams select_alpha(const Matrix& M, int k) {
    require_square(M, "select_alpha");
    require_nonnegative(M, "select_alpha");
    const int n = static_cast<int>(M.rows());
    require(k >= 2 && k < n, "select_alpha: need 2 <= k < n");

    SparsityParams params;
    params.k = k;
    params.alpha_rows = Vector::Zero(n);
    double global = 0.0;
    for (int i = 0; i < n; ++i) {
        const SortedRow row = sort_row(M.row(i), i);
        const int m = static_cast<int>(row.cost.size());

        // Extend past ties at the boundary; exactly k positives is impossible
        // when m_(k) == m_(k+1), so take the smallest achievable support >= k.
        int kk = k;
        while (kk < m && row.cost[kk] == row.cost[kk - 1]) ++kk;

        double alpha_i;
        if (kk < m) {
            const double lower = interval_lower(row, kk);
            const double upper = interval_upper(row, kk);
            alpha_i = lower + 0.9 * (upper - lower);
        } else {
            // Dense row: any alpha above the last lower bound admits all entries.
            const double lower = interval_lower(row, m);
            alpha_i = lower > 0.0 ? 2.0 * lower : 1.0;
        }
        params.alpha_rows[i] = alpha_i;

        // Global bound: upper end of the k=2 interval, m_(3) - (m_(1)+m_(2))/2.
        if (m >= 3) {
            global = std::max(global, row.cost[2] - 0.5 * (row.cost[0] + row.cost[1]));
        }
    }
    params.alpha = global > 0.0 ? global : params.alpha_rows.maxCoeff();
    if (!(params.alpha > 0.0)) params.alpha = 1.0;
    return params;
}

Matrix symmetrize(const Matrix& S) {
    require_square(S, "symmetrize");
    return 0.5 * (S + S.transpose());
}

Matrix apply_ordering(const Matrix& S, const std::vector<int>& perm) {
    require_square(S, "apply_ordering");
    const int n = static_cast<int>(S.rows());
    require(static_cast<int>(perm.size()) == n, "apply_ordering: bad permutation size");
    Matrix B(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) B(i, j) = S(perm[i], perm[j]);
    }
    return B;
}

namespace {

bool greedy_chain_from(const Matrix& S, int seed, std::vector<int>& order) {
    const int n = static_cast<int>(S.rows());
    order.clear();
    order.push_back(seed);
    std::vector<char> used(n, 0);
    used[seed] = 1;
    while (static_cast<int>(order.size()) < n) {
        const int last = order.back();
        const int before = order.size() >= 2 ? order[order.size() - 2] : -1;
        int best = -1;
        double best_affinity = 0.0;
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            if (!(S(last, v) > 0.0)) continue;
            if (before >= 0 && !(S(before, v) > 0.0)) continue;
            if (S(last, v) > best_affinity) {
                best_affinity = S(last, v);
                best = v;
            }
        }
        if (best < 0) return false;
        used[best] = 1;
        order.push_back(best);
    }
    return true;
}

}  // namespace

OrderingResult order_for_marcus(const Matrix& S) {
    require_square(S, "order_for_marcus");
    require(is_symmetric(S), "order_for_marcus: matrix must be symmetric");
    require_nonnegative(S, "order_for_marcus");
    const int n = static_cast<int>(S.rows());

    OrderingResult result;
    result.perm.resize(n);
    std::iota(result.perm.begin(), result.perm.end(), 0);
    if (n >= 2 && marcus::check_marcus_condition(S)) {
        result.found = true;
        return result;
    }

    // Greedy nearest-neighbor chain; first from the most isolated row, then
    // from random seeds on a fixed stream.
    int isolated = 0;
    double weakest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double strongest = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j != i) strongest = std::max(strongest, S(i, j));
        }
        if (strongest < weakest) {
            weakest = strongest;
            isolated = i;
        }
    }

    rng::Engine engine(0x414e434d);  // fixed stream: restarts are reproducible
    std::vector<int> order;
    for (int attempt = 0; attempt < 11; ++attempt) {
        const int seed = attempt == 0
                             ? isolated
                             : static_cast<int>(rng::uniform_index(engine, n));
        if (!greedy_chain_from(S, seed, order)) continue;
        if (marcus::check_marcus_condition(apply_ordering(S, order))) {
            result.perm = order;
            result.found = true;
            return result;
        }
    }
    return result;  // identity, found=false
}

}  // namespace ancmm::graph

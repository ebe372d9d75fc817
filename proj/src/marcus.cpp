#include "ancmm/marcus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ancmm::marcus {

namespace {

void validate_balancing_input(const Matrix& S, const char* who) {
    require_square(S, who);
    require(S.rows() >= 2, std::string(who) + ": need n >= 2");
    require(is_symmetric(S), std::string(who) + ": matrix must be symmetric");
    require_nonnegative(S, who);
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
        require(S.row(i).maxCoeff() > 0.0,
                std::string(who) + ": row " + std::to_string(i) + " is all zero");
    }
}

// Kuhn augmenting-path matching over the positive entries of S.
// match_col[j] = row matched to column j, or -1.
bool try_augment(int row, const std::vector<std::vector<int>>& cols_of_row,
                 std::vector<char>& visited, std::vector<int>& match_col) {
    for (int j : cols_of_row[row]) {
        if (visited[j]) continue;
        visited[j] = 1;
        if (match_col[j] == -1 ||
            try_augment(match_col[j], cols_of_row, visited, match_col)) {
            match_col[j] = row;
            return true;
        }
    }
    return false;
}

// Iterative Tarjan; returns component id per node.
std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0, next_comp = 0;

    struct Frame {
        int node;
        std::size_t edge;
    };
    for (int start = 0; start < n; ++start) {
        if (index[start] != -1) continue;
        std::vector<Frame> call{{start, 0}};
        index[start] = low[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            if (f.edge < adj[f.node].size()) {
                const int next = adj[f.node][f.edge++];
                if (index[next] == -1) {
                    index[next] = low[next] = next_index++;
                    stack.push_back(next);
                    on_stack[next] = 1;
                    call.push_back({next, 0});
                } else if (on_stack[next]) {
                    low[f.node] = std::min(low[f.node], index[next]);
                }
            } else {
                if (low[f.node] == index[f.node]) {
                    while (true) {
                        const int v = stack.back();
                        stack.pop_back();
                        on_stack[v] = 0;
                        comp[v] = next_comp;
                        if (v == f.node) break;
                    }
                    ++next_comp;
                }
                const int done = f.node;
                call.pop_back();
                if (!call.empty()) {
                    low[call.back().node] = std::min(low[call.back().node], low[done]);
                }
            }
        }
    }
    return comp;
}

}  // namespace

bool check_marcus_condition(const Matrix& S) {
    require_square(S, "check_marcus_condition");
    require(S.rows() >= 2, "check_marcus_condition: need n >= 2");
    require(is_symmetric(S), "check_marcus_condition: matrix must be symmetric");
    const Eigen::Index n = S.rows();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (!(S(i, i + 1) > 0.0)) return false;
    }
    for (Eigen::Index i = 0; i + 2 < n; ++i) {
        if (!(S(i, i + 2) > 0.0)) return false;
    }
    return true;
}

bool check_total_support(const Matrix& S) {
    require_square(S, "check_total_support");
    require_nonnegative(S, "check_total_support");
    const int n = static_cast<int>(S.rows());
    if (S.maxCoeff() <= 0.0) return false;  // total support requires S != 0

    std::vector<std::vector<int>> cols_of_row(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (S(i, j) > 0.0) cols_of_row[i].push_back(j);
        }
    }

    std::vector<int> match_col(n, -1);
    for (int i = 0; i < n; ++i) {
        std::vector<char> visited(n, 0);
        if (!try_augment(i, cols_of_row, visited, match_col)) {
            return false;  // no positive diagonal at all
        }
    }
    std::vector<int> row_of_col(n, -1);
    for (int j = 0; j < n; ++j) row_of_col[j] = match_col[j];

    // (i, j) lies on some positive diagonal iff i and row_of_col[j] share an
    // SCC of the graph with arcs i -> row_of_col[j'] over positive (i, j').
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        for (int j : cols_of_row[i]) adj[i].push_back(row_of_col[j]);
    }
    const std::vector<int> comp = strongly_connected_components(adj);
    for (int i = 0; i < n; ++i) {
        for (int j : cols_of_row[i]) {
            if (comp[i] != comp[row_of_col[j]]) return false;
        }
    }
    return true;
}

ScalingResult marcus_map(const Matrix& S, double tol, int max_iter) {
    validate_balancing_input(S, "marcus_map");
    require(tol > 0.0, "marcus_map: tol must be positive");
    require(max_iter >= 1, "marcus_map: max_iter must be >= 1");

    const Eigen::Index n = S.rows();
    Vector u = Vector::Ones(n);
    Vector su(n);
    // Stop on the row-sum defect of DSD, max_i |u_i (S u)_i - 1|. The final
    // rescale can roughly double the defect, so iterate past tol by 4x.
    const double inner_tol = 0.25 * tol;
    int iterations = 0;
    double defect = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (; iterations <= max_iter; ++iterations) {
        su.noalias() = S * u;
        defect = (u.cwiseProduct(su).array() - 1.0).abs().maxCoeff();
        if (defect <= inner_tol) {
            converged = true;
            break;
        }
        if (iterations == max_iter) break;
        // Damped update: geometric mean of u and 1./(S u). Same fixed point,
        // no period-2 oscillation.
        u = (u.array() / su.array()).sqrt().matrix();
        if (!u.allFinite() || u.minCoeff() <= 0.0) {
            throw NonConvergenceError(
                "marcus_map: scaling diverged (NaN/overflow guard); input "
                "likely has no total support",
                iterations + 1, defect);
        }
    }
    if (!converged) {
        throw NonConvergenceError(
            "marcus_map: no convergence after " + std::to_string(max_iter) +
                " iterations; input may lack total support",
            max_iter, defect);
    }

    Matrix balanced = u.asDiagonal() * S * u.asDiagonal();
    const double first_column_sum = balanced.col(0).sum();
    if (!(first_column_sum > 0.0) || !std::isfinite(first_column_sum)) {
        throw NonConvergenceError("marcus_map: degenerate rescale column",
                                  iterations, defect);
    }
    balanced /= first_column_sum;
    balanced = 0.5 * (balanced + balanced.transpose()).eval();

    BalanceReport report;
    report.iterations = iterations;
    report.residual = (balanced.rowwise().sum().array() - 1.0).abs().maxCoeff();
    report.converged = report.residual <= tol;
    return {std::move(balanced), std::move(u), report};
}

DegreeResult degree_normalize_iterate(const Matrix& S, double tol, int max_iter) {
    validate_balancing_input(S, "degree_normalize_iterate");
    require(tol > 0.0, "degree_normalize_iterate: tol must be positive");
    require(max_iter >= 1, "degree_normalize_iterate: max_iter must be >= 1");

    Matrix current = S;
    double residual = std::numeric_limits<double>::infinity();
    for (int iterations = 1; iterations <= max_iter; ++iterations) {
        const Vector degree = current.rowwise().sum();
        const Vector inv_sqrt = degree.array().rsqrt().matrix();
        current = inv_sqrt.asDiagonal() * current * inv_sqrt.asDiagonal();
        if (!current.allFinite()) {
            throw NonConvergenceError(
                "degree_normalize_iterate: NaN/overflow during scaling",
                iterations, residual);
        }
        residual = (current.rowwise().sum().array() - 1.0).abs().maxCoeff();
        if (residual <= tol) {
            BalanceReport report{iterations, residual, true};
            return {std::move(current), report};
        }
    }
    throw NonConvergenceError(
        "degree_normalize_iterate: no convergence after " +
            std::to_string(max_iter) + " iterations; input may lack total support",
        max_iter, residual);
}

std::pair<FlopBreakdown, FlopBreakdown> count_flops_per_iteration(long long n) {
    require(n >= 1, "count_flops_per_iteration: n must be >= 1");
    FlopBreakdown marcus_cost{n * n, n * n, n, 0};
    FlopBreakdown degree_cost{n * n, 2 * n * n, n, n};
    return {marcus_cost, degree_cost};
}

}  // namespace ancmm::marcus

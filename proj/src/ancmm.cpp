#include "ancmm/ancmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "ancmm/marcus.hpp"
#include "ancmm/rng.hpp"

namespace ancmm {

namespace {

enum class Mode { DoublyStochastic, RowStochastic };

void validate_config(const Matrix& X, const AncmmConfig& cfg) {
    const int n = static_cast<int>(X.rows());
    require(n >= 3, "ancmm: need at least three samples");
    require(X.allFinite(), "ancmm: data contains NaN/Inf");
    require(cfg.c >= 1 && cfg.c < n, "ancmm: need 1 <= c < n");
    require(cfg.k >= 2 && cfg.k < n, "ancmm: need 2 <= k < n");
    require(cfg.max_outer >= 1, "ancmm: max_outer must be >= 1");
    require(cfg.eps_rank > 0.0 && cfg.edge_eps > 0.0 && cfg.marcus_tol > 0.0 &&
                cfg.objective_tol > 0.0,
            "ancmm: tolerances must be positive");
}

Matrix row_stochastic_update(const Matrix& costs, const Vector& alpha_rows) {
    const int n = static_cast<int>(costs.rows());
    Matrix S(n, n);
    for (int i = 0; i < n; ++i) {
        S.row(i) = graph::solve_row(costs.row(i), alpha_rows[i], i).transpose();
    }
    return S;
}

// Embedding, smallest c+1 eigenvalues, and the zero count for the rank test.
void refresh_spectral(AncmmState& state, const Matrix& graph_matrix,
                      const AncmmConfig& cfg) {
    const int n = static_cast<int>(graph_matrix.rows());
    const int want = std::min(cfg.c + 1, n);
    const Matrix L = spectral::laplacian(graph_matrix);
    const spectral::SpectralEmbedding embedding = spectral::smallest_eigenpairs(L, want);
    state.F = embedding.vectors.leftCols(cfg.c);
    state.eigenvalues = embedding.values;
    const double threshold = spectral::zero_eigenvalue_threshold(L, cfg.eps_rank);
    state.zero_count = 0;
    for (int i = 0; i < want; ++i) {
        if (embedding.values[i] < threshold) ++state.zero_count;
    }
}

double initial_lambda(const graph::SparsityParams& params, const AncmmConfig& cfg) {
    if (cfg.lambda0 > 0.0) return cfg.lambda0;
    if (cfg.random_lambda0) {
        rng::Engine engine(cfg.seed);
        return params.alpha * std::pow(10.0, rng::uniform(engine, -1.0, 1.0));
    }
    return params.alpha;
}

AncmmState initialize_impl(const Matrix& X, const AncmmConfig& cfg, Mode mode) {
    validate_config(X, cfg);
    AncmmState state;
    state.xdist = graph::squared_distances(X);
    state.params = graph::select_alpha(state.xdist, cfg.k);
    state.lambda = initial_lambda(state.params, cfg);

    const Matrix rows = row_stochastic_update(state.xdist, state.params.alpha_rows);
    if (mode == Mode::DoublyStochastic) {
        const Matrix s_hat = graph::symmetrize(rows);
        state.marcus_condition_found = graph::order_for_marcus(s_hat).found;
        try {
            state.S = marcus::marcus_map(s_hat, cfg.marcus_tol, cfg.marcus_max_iter).balanced;
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(std::string("ancmm initialize: ") + e.what(),
                                      e.iterations(), e.residual());
        }
        refresh_spectral(state, state.S, cfg);
    } else {
        state.S = rows;
        refresh_spectral(state, graph::symmetrize(state.S), cfg);
    }
    return state;
}

AncmmState step_impl(AncmmState state, const AncmmConfig& cfg, Mode mode) {
    const double lambda_used = state.lambda;
    Matrix costs = state.xdist;
    if (lambda_used > 0.0) costs += lambda_used * graph::squared_distances(state.F);

    const Matrix rows = row_stochastic_update(costs, state.params.alpha_rows);
    Matrix graph_for_components;
    if (mode == Mode::DoublyStochastic) {
        const Matrix s_hat = graph::symmetrize(rows);
        state.marcus_condition_found = graph::order_for_marcus(s_hat).found;
        Matrix balanced;
        try {
            balanced = marcus::marcus_map(s_hat, cfg.marcus_tol, cfg.marcus_max_iter).balanced;
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError(
                "ancmm step " + std::to_string(state.lambda_trace.size() + 1) + ": " +
                    e.what(),
                e.iterations(), e.residual());
        }
        state.epsilon_trace.push_back((balanced - s_hat).squaredNorm());
        const double norm_sq = s_hat.squaredNorm();
        state.epsilon_ratio_trace.push_back(
            norm_sq > 0.0 ? state.epsilon_trace.back() / norm_sq : 0.0);
        state.S = std::move(balanced);
        graph_for_components = state.S;
    } else {
        state.S = rows;
        graph_for_components = graph::symmetrize(state.S);
    }

    refresh_spectral(state, graph_for_components, cfg);

    // Objective with the lambda this step solved against; the embedding term
    // 2 lambda Tr(F^T L F) is the sum of the smallest c eigenvalues.
    double embed_term = 0.0;
    for (int i = 0; i < cfg.c && i < state.eigenvalues.size(); ++i) {
        embed_term += state.eigenvalues[i];
    }
    const double objective = state.xdist.cwiseProduct(state.S).sum() +
                             state.params.alpha * state.S.squaredNorm() +
                             2.0 * lambda_used * embed_term;
    state.objective_trace.push_back(objective);
    state.lambda_trace.push_back(lambda_used);
    state.component_trace.push_back(
        spectral::connected_components(graph_for_components, cfg.edge_eps).count);

    // Too few near-zero eigenvalues: rank constraint unmet, push harder.
    // Too many: over-segmented, relax.
    if (state.zero_count < cfg.c) {
        state.lambda = lambda_used * 2.0;
    } else if (state.zero_count > cfg.c) {
        state.lambda = lambda_used * 0.5;
    }
    return state;
}

ClusterResult run_impl(const Matrix& X, const AncmmConfig& cfg, Mode mode) {
    AncmmState state = initialize_impl(X, cfg, mode);
    bool converged = false;
    double previous_objective = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    while (iterations < cfg.max_outer) {
        state = step_impl(std::move(state), cfg, mode);
        ++iterations;
        if (state.lambda > cfg.lambda_cap) break;
        const double objective = state.objective_trace.back();
        if (state.zero_count == cfg.c && std::isfinite(previous_objective)) {
            const double change = std::abs(objective - previous_objective) /
                                  std::max(std::abs(previous_objective), 1e-12);
            if (change < cfg.objective_tol) {
                converged = true;
                break;
            }
        }
        previous_objective = objective;
    }

    ClusterResult result;
    const Matrix graph_for_components =
        mode == Mode::DoublyStochastic ? state.S : graph::symmetrize(state.S);
    result.labels = spectral::connected_components(graph_for_components, cfg.edge_eps);
    result.graph = std::move(state.S);
    result.iterations = iterations;
    result.converged = converged;
    result.rank_satisfied = result.labels.count == cfg.c;
    result.lambda_final = state.lambda;
    result.objective_trace = std::move(state.objective_trace);
    result.epsilon_trace = std::move(state.epsilon_trace);
    result.epsilon_ratio_trace = std::move(state.epsilon_ratio_trace);
    result.lambda_trace = std::move(state.lambda_trace);
    result.component_trace = std::move(state.component_trace);
    return result;
}

}  // namespace

AncmmState initialize(const Matrix& X, const AncmmConfig& cfg) {
    return initialize_impl(X, cfg, Mode::DoublyStochastic);
}

AncmmState step(AncmmState state, const Matrix& X, const AncmmConfig& cfg) {
    require(X.rows() == state.S.rows(), "ancmm step: state/data size mismatch");
    return step_impl(std::move(state), cfg, Mode::DoublyStochastic);
}

ClusterResult run(const Matrix& X, const AncmmConfig& cfg) {
    return run_impl(X, cfg, Mode::DoublyStochastic);
}

ClusterResult run_can(const Matrix& X, const AncmmConfig& cfg) {
    return run_impl(X, cfg, Mode::RowStochastic);
}

EpsilonDiagnostic epsilon_diagnostic(const Matrix& S_hat, double tol, int max_iter) {
    EpsilonDiagnostic diag;
    const Matrix balanced = marcus::marcus_map(S_hat, tol, max_iter).balanced;
    diag.epsilon = (balanced - S_hat).squaredNorm();
    diag.norm_sq = S_hat.squaredNorm();
    return diag;
}

}  // namespace ancmm

#pragma once

#include <vector>

#include "ancmm/common.hpp"
#include "ancmm/graph_learning.hpp"
#include "ancmm/spectral.hpp"

// The alternating driver: embedding update, row-wise graph update,
// symmetrization, diagonal balancing, adaptive lambda, cluster extraction.
namespace ancmm {

struct AncmmConfig {
    int c = 2;               // cluster count
    int k = 5;               // neighbor count
    double lambda0 = 0.0;    // <= 0: use the auto-selected global alpha
    bool random_lambda0 = false;  // seed-controlled random scale instead
    int max_outer = 50;
    double eps_rank = spectral::kDefaultEpsRank;
    double edge_eps = spectral::kDefaultEdgeEps;
    double marcus_tol = 1e-10;
    int marcus_max_iter = 10000;
    double objective_tol = 1e-6;
    double lambda_cap = 1e12;  // above this the run is flagged non-converged
    unsigned long long seed = 0;
};

struct AncmmState {
    Matrix S;             // current graph (doubly stochastic after every step)
    Matrix F;             // n x c embedding for the current S
    Vector eigenvalues;   // smallest c+1 eigenvalues of the current Laplacian
    double lambda = 0.0;
    int zero_count = 0;   // eigenvalues below the rank threshold
    bool marcus_condition_found = true;  // last ordering certificate

    std::vector<double> objective_trace;
    std::vector<double> epsilon_trace;        // ||M(S_hat) - S_hat||_F^2
    std::vector<double> epsilon_ratio_trace;  // epsilon / ||S_hat||_F^2
    std::vector<double> lambda_trace;         // lambda used by each step
    std::vector<int> component_trace;

    // Constant across steps: cached sample distances and sparsity setup.
    Matrix xdist;
    graph::SparsityParams params;
};

struct ClusterResult {
    spectral::ComponentLabels labels;
    Matrix graph;
    int iterations = 0;
    bool converged = false;       // joint stop reached before the cap
    bool rank_satisfied = false;  // component count equals c exactly
    double lambda_final = 0.0;

    std::vector<double> objective_trace;
    std::vector<double> epsilon_trace;
    std::vector<double> epsilon_ratio_trace;
    std::vector<double> lambda_trace;
    std::vector<int> component_trace;
};

struct EpsilonDiagnostic {
    double epsilon = 0.0;  // ||M(S_hat) - S_hat||_F^2
    double norm_sq = 0.0;  // ||S_hat||_F^2
    double ratio() const { return norm_sq > 0.0 ? epsilon / norm_sq : 0.0; }
};

/// Build the initial doubly stochastic graph from the plain distance costs
/// and select the sparsity parameters kept for the whole run.
AncmmState initialize(const Matrix& X, const AncmmConfig& cfg);

/// One outer iteration: embedding update, row solves, symmetrize, balance,
/// adapt lambda. Returns the advanced state.
AncmmState step(AncmmState state, const Matrix& X, const AncmmConfig& cfg);

/// Full run until the rank condition holds and the objective plateaus, or
/// the iteration cap. Non-convergence is reported in the result, not thrown;
/// balancing failures propagate as NonConvergenceError.
ClusterResult run(const Matrix& X, const AncmmConfig& cfg);

/// Ablation: the same loop with the symmetrize+balance stage removed, i.e.
/// plain row-stochastic adaptive neighbors. Components are read from
/// (S + S^T)/2.
ClusterResult run_can(const Matrix& X, const AncmmConfig& cfg);

/// Distance of S_hat from its balanced image, plus ||S_hat||_F^2 for the
/// relative ratio.
EpsilonDiagnostic epsilon_diagnostic(const Matrix& S_hat,
                                     double tol = 1e-10, int max_iter = 10000);

}  // namespace ancmm

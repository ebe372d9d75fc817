#include "ancmm/ancmm.hpp"

#include "ancmm/data_io.hpp"
#include "ancmm/eval.hpp"
#include "ancmm/marcus.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ancmm;
using oracles::Engine;

namespace {

Matrix two_blobs(int per_blob, double spread, double separation, Engine& engine) {
    Matrix X(2 * per_blob, 2);
    for (int i = 0; i < per_blob; ++i) {
        X(i, 0) = spread * rng::normal(engine);
        X(i, 1) = spread * rng::normal(engine);
        X(per_blob + i, 0) = separation + spread * rng::normal(engine);
        X(per_blob + i, 1) = spread * rng::normal(engine);
    }
    return X;
}

}  // namespace

TEST_CASE("initialize: doubly stochastic start with local support") {
    Engine engine(401);
    const Matrix X = two_blobs(12, 0.3, 10.0, engine);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 3;
    const AncmmState state = initialize(X, cfg);

    CHECK((state.S.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
    CHECK((state.S.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
    CHECK(symmetry_defect(state.S) <= 1e-12);
    CHECK(state.S.diagonal().cwiseAbs().maxCoeff() == 0.0);

    // Mass concentrates within blobs: cross-blob entries stay tiny.
    const double cross = state.S.block(0, 12, 12, 12).sum();
    CHECK(cross <= 0.05 * state.S.sum());
    CHECK(state.lambda == state.params.alpha);
}

TEST_CASE("initialize: configuration validation") {
    Engine engine(403);
    const Matrix X = two_blobs(4, 0.2, 5.0, engine);
    AncmmConfig cfg;
    cfg.c = 8;  // c == n
    cfg.k = 3;
    CHECK_THROWS_AS(initialize(X, cfg), std::invalid_argument);
    cfg.c = 2;
    cfg.k = 8;  // k == n
    CHECK_THROWS_AS(initialize(X, cfg), std::invalid_argument);
    cfg.k = 1;
    CHECK_THROWS_AS(initialize(X, cfg), std::invalid_argument);
}

TEST_CASE("initialize: duplicate points resolve deterministically") {
    Matrix X(6, 2);
    X << 0, 0,
         0, 0,
         0, 0,
         4, 4,
         4, 4,
         4, 4;
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 2;
    const AncmmState a = initialize(X, cfg);
    const AncmmState b = initialize(X, cfg);
    CHECK((a.S - b.S).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step: block-diagonal ground truth is near a fixed point") {
    Engine engine(409);
    const Matrix X = two_blobs(10, 0.2, 12.0, engine);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 4;
    AncmmState state = initialize(X, cfg);
    REQUIRE(state.zero_count == 2);  // blobs are already disconnected at k=4

    state = step(std::move(state), X, cfg);
    // Embedding objective vanishes on a 2-component graph with c=2.
    CHECK(state.eigenvalues[0] <= 1e-10);
    CHECK(state.eigenvalues[1] <= 1e-10);
    // The update keeps all support within blocks.
    CHECK(state.S.block(0, 10, 10, 10).cwiseAbs().maxCoeff() == 0.0);
    CHECK(state.component_trace.back() == 2);
}

TEST_CASE("step: embedding update is the exact minimizer (Ky Fan descent)") {
    const io::DataMatrix moons = io::two_moons(60, 0.13, 7);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 6;
    Engine engine(411);

    AncmmState state = initialize(moons.X, cfg);
    for (int iter = 0; iter < 5; ++iter) {
        const Matrix F_before = state.F;
        state = step(std::move(state), moons.X, cfg);
        // state.F is the minimizer for the Laplacian of the step's output
        // graph; no other orthonormal basis may beat it there.
        const Matrix L_new = spectral::laplacian(state.S);
        const double trace_f = (state.F.transpose() * L_new * state.F).trace();
        const double trace_old = (F_before.transpose() * L_new * F_before).trace();
        CHECK(trace_f <= trace_old + 1e-9);
        for (int trial = 0; trial < 100; ++trial) {
            const Matrix G = oracles::random_orthonormal(60, 2, engine);
            CHECK(trace_f <= (G.transpose() * L_new * G).trace() + 1e-9);
        }
    }
}

TEST_CASE("step: graph stays doubly stochastic and hollow every iteration") {
    const io::DataMatrix moons = io::two_moons(50, 0.13, 5);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 5;
    AncmmState state = initialize(moons.X, cfg);
    for (int iter = 0; iter < 6; ++iter) {
        state = step(std::move(state), moons.X, cfg);
        CHECK((state.S.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
        CHECK(symmetry_defect(state.S) <= 1e-12);
        CHECK(state.S.diagonal().cwiseAbs().maxCoeff() == 0.0);
        CHECK(state.S.minCoeff() >= 0.0);
    }
    CHECK(state.objective_trace.size() == 6);
    CHECK(state.epsilon_trace.size() == 6);
    for (double value : state.objective_trace) CHECK(std::isfinite(value));
}

TEST_CASE("run: two moons reach the target partition") {
    const io::DataMatrix moons = io::two_moons(200, 0.13, 1);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 10;
    const ClusterResult result = run(moons.X, cfg);
    CHECK(result.converged);
    CHECK(result.rank_satisfied);
    CHECK(result.labels.count == 2);
    CHECK(result.iterations <= 30);
    const double acc = eval::accuracy(result.labels.labels, *moons.labels);
    CHECK(acc >= 0.95);

    // Rank condition at the numerical level: the c smallest eigenvalues of
    // the final Laplacian sit below the threshold, the (c+1)-th does not.
    const Matrix L = spectral::laplacian(result.graph);
    CHECK(spectral::count_zero_eigenvalues(L, 3, cfg.eps_rank) == 2);
}

TEST_CASE("run: bit-identical replay") {
    const io::DataMatrix moons = io::two_moons(80, 0.13, 9);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 8;
    const ClusterResult a = run(moons.X, cfg);
    const ClusterResult b = run(moons.X, cfg);
    CHECK((a.graph - b.graph).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.labels.labels == b.labels.labels);
    CHECK(a.objective_trace == b.objective_trace);
    CHECK(a.epsilon_trace == b.epsilon_trace);
}

TEST_CASE("run: c = 1 on a connected graph is trivial") {
    const io::DataMatrix moons = io::two_moons(20, 0.4, 2);
    AncmmConfig cfg;
    cfg.c = 1;
    cfg.k = 5;
    const ClusterResult result = run(moons.X, cfg);
    CHECK(result.labels.count == 1);
    CHECK(result.rank_satisfied);
    for (int label : result.labels.labels) CHECK(label == 0);
}

TEST_CASE("run: lambda cap flags non-convergence") {
    const io::DataMatrix moons = io::two_moons(30, 0.13, 3);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 5;
    cfg.lambda_cap = 1e-9;  // any doubling crosses immediately
    const ClusterResult result = run(moons.X, cfg);
    CHECK_FALSE(result.converged);
    CHECK(result.lambda_final > cfg.lambda_cap);
}

TEST_CASE("run: lambda freezes once the count matches") {
    const io::DataMatrix moons = io::two_moons(100, 0.13, 1);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 10;
    const ClusterResult result = run(moons.X, cfg);
    REQUIRE(result.converged);
    const auto& lambda = result.lambda_trace;
    const auto& comps = result.component_trace;
    REQUIRE(lambda.size() == comps.size());
    for (std::size_t t = 0; t + 1 < lambda.size(); ++t) {
        if (comps[t] == cfg.c) CHECK(lambda[t + 1] == lambda[t]);
    }
}

TEST_CASE("initialize: random lambda0 option is seed-controlled") {
    const io::DataMatrix moons = io::two_moons(30, 0.1, 2);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 4;
    cfg.random_lambda0 = true;
    cfg.seed = 1;
    const double first = initialize(moons.X, cfg).lambda;
    const double replay = initialize(moons.X, cfg).lambda;
    cfg.seed = 2;
    const double other = initialize(moons.X, cfg).lambda;
    CHECK(first == replay);
    CHECK(first != other);
    CHECK(first > 0.0);

    cfg.random_lambda0 = false;
    cfg.lambda0 = 3.5;
    CHECK(initialize(moons.X, cfg).lambda == 3.5);
}

TEST_CASE("epsilon diagnostic: balanced input, scaling, pipeline ratio") {
    Engine engine(419);
    const Matrix ds = marcus::marcus_map(oracles::random_symmetric_positive(6, engine)).balanced;
    const EpsilonDiagnostic at_fixed_point = epsilon_diagnostic(ds);
    CHECK(at_fixed_point.epsilon <= 1e-18);

    // M(2 S_ds) = S_ds, so the distance is ||S_ds||_F^2.
    const EpsilonDiagnostic scaled = epsilon_diagnostic((2.0 * ds).eval());
    CHECK(scaled.epsilon == doctest::Approx(ds.squaredNorm()).epsilon(1e-8));

    const io::DataMatrix moons = io::two_moons(60, 0.13, 4);
    const Matrix costs = graph::pairwise_cost(moons.X);
    const auto params = graph::select_alpha(costs, 6);
    Matrix rows(60, 60);
    for (int i = 0; i < 60; ++i) {
        rows.row(i) = graph::solve_row(costs.row(i), params.alpha_rows[i], i).transpose();
    }
    const EpsilonDiagnostic toy = epsilon_diagnostic(graph::symmetrize(rows));
    CHECK(toy.ratio() < 0.1);
    CHECK(toy.norm_sq > 0.0);
}

TEST_CASE("can mode: two moons and the shared stopping logic") {
    const io::DataMatrix moons = io::two_moons(200, 0.13, 1);
    AncmmConfig cfg;
    cfg.c = 2;
    cfg.k = 10;
    const ClusterResult result = eval::can_mode(moons.X, cfg);
    CHECK(result.labels.count == 2);
    CHECK(result.epsilon_trace.empty());  // no balancing stage in the ablation
    const double acc = eval::accuracy(result.labels.labels, *moons.labels);
    CHECK(acc >= 0.90);

    // Row-stochastic only: rows sum to one, columns are unconstrained.
    CHECK((result.graph.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
    CHECK((result.graph.colwise().sum().array() - 1.0).abs().maxCoeff() > 1e-6);
}

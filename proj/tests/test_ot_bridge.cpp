#include "ancmm/ot_bridge.hpp"

#include "ancmm/marcus.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ancmm;
using oracles::Engine;

namespace {

double plan_entropy(const Matrix& P) {
    double h = 0.0;
    for (int i = 0; i < P.rows(); ++i) {
        for (int j = 0; j < P.cols(); ++j) {
            if (P(i, j) > 0.0) h -= P(i, j) * std::log(P(i, j));
        }
    }
    return h;
}

}  // namespace

TEST_CASE("entropic plan: identity kernel admits only the identity plan") {
    for (double omega : {0.5, 1.0, 3.0}) {
        const auto plan = ot::entropic_plan(Matrix::Identity(4, 4), omega);
        CHECK((plan.P - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("entropic plan: omega=1 reproduces the diagonal balancing") {
    Engine engine(101);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng::uniform_index(engine, 6));
        const Matrix S = oracles::random_symmetric_positive(n, engine);
        const Matrix M = marcus::marcus_map(S).balanced;
        const auto plan = ot::entropic_plan(S, 1.0);
        CHECK((plan.P - M).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("entropic plan: agrees with a projected-gradient solver") {
    Engine engine(103);
    const Matrix S = oracles::random_symmetric_positive(4, engine, 0.2, 1.0);
    for (double omega : {1.0, 2.0}) {
        const auto plan = ot::entropic_plan(S, omega);
        const Matrix brute = oracles::projected_gradient_entropic(S, omega);
        CHECK((plan.P - brute).cwiseAbs().maxCoeff() <= 1e-4);
    }
}

TEST_CASE("entropic plan: marginals, duals, and symmetry") {
    Engine engine(107);
    const Matrix S = oracles::random_symmetric_positive(6, engine);
    for (double omega : {0.5, 1.0, 3.0}) {
        const auto plan = ot::entropic_plan(S, omega);
        CHECK((plan.P.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
        CHECK((plan.P.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
        CHECK(ot::plan_symmetry_check(plan) <= 1e-8);
        CHECK(plan.marginal_residual <= 1e-10);

        // Stationarity form: p_ij = e^{-1/2-w phi_i} s_ij^w e^{-1/2-w xi_j}.
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                const double expected = std::exp(-0.5 - omega * plan.dual_row[i]) *
                                        std::pow(S(i, j), omega) *
                                        std::exp(-0.5 - omega * plan.dual_col[j]);
                CHECK(plan.P(i, j) == doctest::Approx(expected).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("entropic plan: zeros are masked, never filled in") {
    Engine engine(109);
    const Matrix S = oracles::random_superdiagonal_matrix(7, engine);
    const auto plan = ot::entropic_plan(S, 1.0);
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            if (S(i, j) == 0.0) {
                CHECK(plan.P(i, j) == 0.0);
            } else {
                CHECK(plan.P(i, j) > 0.0);
            }
        }
    }
}

TEST_CASE("entropic plan: entropy is non-increasing in omega") {
    Engine engine(113);
    const Matrix S = oracles::random_symmetric_positive(5, engine);
    const double h_half = plan_entropy(ot::entropic_plan(S, 0.5).P);
    const double h_one = plan_entropy(ot::entropic_plan(S, 1.0).P);
    const double h_two = plan_entropy(ot::entropic_plan(S, 2.0).P);
    CHECK(h_half >= h_one - 1e-12);
    CHECK(h_one >= h_two - 1e-12);
}

TEST_CASE("entropic plan: input validation") {
    const Matrix S = Matrix::Ones(3, 3);
    CHECK_THROWS_AS(ot::entropic_plan(S, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ot::entropic_plan(S, -1.5), std::invalid_argument);
    Matrix asym = S;
    asym(0, 1) = 3.0;
    CHECK_THROWS_AS(ot::entropic_plan(asym, 1.0), std::invalid_argument);
}

TEST_CASE("entropic plan: unbalanceable support does not converge") {
    Matrix eq2(3, 3);
    eq2 << 0, 0, 1,
           0, 0, 1,
           1, 1, 0;
    CHECK_THROWS_AS(ot::entropic_plan(eq2, 1.0, 1e-10, 500), NonConvergenceError);
}

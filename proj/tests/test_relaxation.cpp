#include <doctest.h>

#include <cmath>

#include "quadcert/oracle.hpp"
#include "quadcert/relaxation.hpp"
#include "test_util.hpp"

using namespace quadcert;
using namespace quadcert::relax;

namespace {

std::vector<SymMatrix> planted_instance(Rng& rng, Index n, int m, Vector* alpha_out,
                                        Vector* x_out = nullptr) {
    const auto qs = testutil::random_sym_list(rng, n, m);
    Vector x0 = rng.gaussian_vector(n);
    Vector alpha(m);
    for (int i = 0; i < m; ++i) alpha[i] = quad_form(qs[static_cast<std::size_t>(i)], x0);
    *alpha_out = alpha;
    if (x_out) *x_out = x0;
    return qs;
}

}  // namespace

TEST_CASE("conflicting three-equation system relaxes to the identity") {
    const auto qs = testutil::conflicting_pair_system();
    const auto res = solve_feasibility(qs, testutil::conflicting_pair_alpha());
    REQUIRE(res.status == FeasStatus::Feasible);
    CHECK((res.x->mat() - Matrix::Identity(2, 2)).norm() <= 1e-6);
    CHECK(res.residual <= 1e-6 * 2);
    CHECK(res.rank == 2);
    CHECK(res.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("negative trace target is infeasible") {
    const auto res = solve_feasibility({SymMatrix::Identity(2)}, Vector::Constant(1, -1.0));
    CHECK(res.status == FeasStatus::Infeasible);
    CHECK(res.gap > 1e-6);
}

TEST_CASE("planted instances are feasible with small residual") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
        Vector alpha;
        const auto qs = planted_instance(rng, 12, 4, &alpha);
        const auto res = solve_feasibility(qs, alpha);
        REQUIRE(res.status == FeasStatus::Feasible);
        CHECK(res.residual <= 1e-6 * (1 + alpha.cwiseAbs().maxCoeff()));
        const Vector lam = eigendecompose(*res.x).eigenvalues;
        CHECK(lam.minCoeff() >= -1e-8 * std::max(1.0, lam.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("inconsistent dependent constraints are reported infeasible") {
    Rng rng(22);
    const SymMatrix a = testutil::random_sym(rng, 4);
    Vector alpha(2);
    alpha << 1.0, 3.0;  // a and 2a would force alpha_2 = 2
    const auto res = solve_feasibility({a, a * 2.0}, alpha);
    CHECK(res.status == FeasStatus::Infeasible);
}

TEST_CASE("strictly feasible planted interior converges within the cap") {
    Rng rng(24);
    const Index n = 10;
    const auto qs = testutil::random_sym_list(rng, n, 3);
    Matrix bump = Matrix::Identity(n, n);
    bump += 0.2 * testutil::random_sym(rng, n).mat();
    const SymMatrix x0{Matrix(bump * bump.transpose())};  // interior point
    Vector alpha(3);
    for (int i = 0; i < 3; ++i) alpha[i] = inner(qs[static_cast<std::size_t>(i)], x0);
    const auto res = solve_feasibility(qs, alpha);
    REQUIRE(res.status == FeasStatus::Feasible);
    CHECK(res.residual <= 1e-6 * (1 + alpha.cwiseAbs().maxCoeff()));
}

TEST_CASE("entropy ascent on the trace simplex reaches the uniform state") {
    const Index n = 6;
    Rng rng(25);
    Vector v = rng.gaussian_vector(n);
    v.normalize();
    SolveOptions opts;
    opts.start = SymMatrix{Matrix(v * v.transpose())};

    const std::vector<SymMatrix> qs{SymMatrix::Identity(n)};
    const Vector alpha = Vector::Constant(1, 1.0);
    auto res = solve_feasibility(qs, alpha, opts);
    REQUIRE(res.status == FeasStatus::Feasible);
    CHECK(res.rank == 1);

    res = interiorize(res, qs, alpha, 100);
    CHECK(res.entropy >= std::log(static_cast<double>(n)) - 1e-3);
    CHECK((res.x->mat() - Matrix::Identity(n, n) / static_cast<double>(n)).norm() <= 1e-2);
    CHECK(res.rank == static_cast<int>(n));
}

TEST_CASE("entropy trace is monotone within tolerance") {
    Rng rng(26);
    Vector alpha;
    const auto qs = planted_instance(rng, 10, 3, &alpha);
    auto res = solve_feasibility(qs, alpha);
    REQUIRE(res.status == FeasStatus::Feasible);
    res = interiorize(res, qs, alpha, 100);
    REQUIRE(res.ascent_entropies.size() >= 1);
    for (std::size_t i = 1; i < res.ascent_entropies.size(); ++i) {
        CHECK(res.ascent_entropies[i] >= res.ascent_entropies[i - 1] - 1e-9);
    }
    CHECK(res.residual <= 1e-6 * (1 + alpha.cwiseAbs().maxCoeff()));
}

TEST_CASE("pinned feasible point is an ascent fixed point") {
    const auto qs = testutil::conflicting_pair_system();
    const Vector alpha = testutil::conflicting_pair_alpha();
    auto res = solve_feasibility(qs, alpha);
    REQUIRE(res.status == FeasStatus::Feasible);
    res = interiorize(res, qs, alpha, 50);
    // the constraints pin X = I, so the projected gradient vanishes
    CHECK(res.ascent_entropies.size() == 1);
    CHECK((res.x->mat() - Matrix::Identity(2, 2)).norm() <= 1e-6);
}

TEST_CASE("factor_and_transform at the identity is a no-op") {
    Rng rng(27);
    const auto qs = testutil::random_sym_list(rng, 4, 2);
    RelaxationResult res;
    res.status = FeasStatus::Feasible;
    res.x = SymMatrix::Identity(4);
    res.rank = 4;
    const auto ts = factor_and_transform(res, qs);
    CHECK(ts.reduced_dim == 4);
    CHECK(ts.equivalent);
    CHECK((ts.t - Matrix::Identity(4, 4)).norm() <= 1e-12);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        CHECK((ts.qhat[i].mat() - qs[i].mat()).norm() <= 1e-12);
        CHECK(ts.alpha[static_cast<Index>(i)] ==
              doctest::Approx(qs[i].trace()).epsilon(1e-12));
    }
}

TEST_CASE("rank-one factor evaluates the forms at the witness") {
    Rng rng(28);
    const Index n = 5;
    const auto qs = testutil::random_sym_list(rng, n, 3);
    const Vector x0 = rng.gaussian_vector(n);
    RelaxationResult res;
    res.status = FeasStatus::Feasible;
    res.x = SymMatrix{Matrix(x0 * x0.transpose())};
    const auto ts = factor_and_transform(res, qs);
    REQUIRE(ts.reduced_dim == 1);
    CHECK_FALSE(ts.equivalent);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        CHECK(ts.qhat[i](0, 0) == doctest::Approx(quad_form(qs[i], x0)).epsilon(1e-9));
    }
}

TEST_CASE("transform invariants on the conflicting example") {
    const auto qs = testutil::conflicting_pair_system();
    const Vector alpha = testutil::conflicting_pair_alpha();
    const auto res = solve_feasibility(qs, alpha);
    const auto ts = factor_and_transform(res, qs);
    REQUIRE(ts.reduced_dim == 2);
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const Matrix expect = ts.t.transpose() * qs[i].mat() * ts.t;
        CHECK((ts.qhat[i].mat() - expect).norm() <= 1e-8);
        CHECK(std::abs(ts.alpha[static_cast<Index>(i)] - ts.qhat[i].trace()) <= 1e-8);
        CHECK(ts.alpha[static_cast<Index>(i)] ==
              doctest::Approx(alpha[static_cast<Index>(i)]).epsilon(1e-6));
    }
}

TEST_CASE("transformed solutions map back to the original system") {
    Rng rng(29);
    Vector alpha, x0;
    const auto qs = planted_instance(rng, 8, 3, &alpha, &x0);
    auto res = solve_feasibility(qs, alpha);
    REQUIRE(res.status == FeasStatus::Feasible);
    res = interiorize(res, qs, alpha, 30);
    const auto ts = factor_and_transform(res, qs);

    oracle::OracleOptions oopts;
    oopts.seed = 77;
    const auto wit = oracle::solve(ts.qhat, ts.alpha, oopts);
    REQUIRE(wit.solved);
    const Vector y = ts.t * wit.best_x;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        CHECK(std::abs(quad_form(qs[i], y) - alpha[static_cast<Index>(i)]) <=
              1e-6 * (1 + alpha.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("zero-rank factorization is a trivial face error") {
    RelaxationResult res;
    res.status = FeasStatus::Feasible;
    res.x = SymMatrix::Zero(3);
    CHECK_THROWS_AS(factor_and_transform(res, {SymMatrix::Identity(3)}), std::runtime_error);
}

TEST_CASE("exact decision for span dimension at most two") {
    CHECK(exact_small_m({SymMatrix::Identity(3)}, Vector::Constant(1, 1.0)) ==
          SmallMDecision::Solvable);
    CHECK(exact_small_m({SymMatrix::Identity(3)}, Vector::Constant(1, -1.0)) ==
          SmallMDecision::Unsolvable);

    Rng rng(30);
    Vector alpha;
    const auto qs = planted_instance(rng, 6, 2, &alpha);
    CHECK(exact_small_m(qs, alpha) == SmallMDecision::Solvable);
    oracle::OracleOptions oopts;
    oopts.seed = 3;
    CHECK(oracle::solve(qs, alpha, oopts).solved);

    const auto three = testutil::random_sym_list(rng, 5, 3);
    CHECK_THROWS_AS(exact_small_m(three, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("extreme point rank bound") {
    CHECK(extreme_rank_bound(1) == 1);
    CHECK(extreme_rank_bound(3) == 2);
    CHECK(extreme_rank_bound(10) == 4);
    for (int m = 1; m <= 200; ++m) {
        const int r = extreme_rank_bound(m);
        CHECK(r * (r + 1) / 2 <= m);
        CHECK((r + 1) * (r + 2) / 2 > m);
    }
    CHECK_THROWS_AS(extreme_rank_bound(0), std::invalid_argument);
}

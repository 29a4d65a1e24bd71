#include <doctest.h>

#include <cmath>

#include "quadcert/basis.hpp"
#include "test_util.hpp"

using namespace quadcert;

namespace {

std::vector<SymMatrix> mixed_basis(const OrthoBasis& basis, const Matrix& mix) {
    std::vector<SymMatrix> out;
    for (Index i = 0; i < mix.rows(); ++i) {
        Matrix acc = Matrix::Zero(basis.dim(), basis.dim());
        for (int j = 0; j < basis.m(); ++j) {
            acc += mix(i, j) * basis.mats[static_cast<std::size_t>(j)].mat();
        }
        out.emplace_back(std::move(acc));
    }
    return out;
}

}  // namespace

TEST_CASE("orthonormalize diagonal pair") {
    Vector d1(2), d2(2);
    d1 << 1, 0;
    d2 << 1, 1;
    const OrthoBasis basis =
        orthonormalize({SymMatrix::Diagonal(d1), SymMatrix::Diagonal(d2)});
    REQUIRE(basis.m() == 2);
    CHECK(std::abs(inner(basis.mats[0], basis.mats[1])) <= 1e-10);
    CHECK(inner(basis.mats[0], basis.mats[0]) == doctest::Approx(1.0));
    // spans the diagonal matrices: off-diagonals stay zero
    CHECK(basis.mats[0](0, 1) == 0.0);
    CHECK(basis.mats[1](0, 1) == 0.0);
}

TEST_CASE("exact dependence is dropped and reported") {
    Rng rng(3);
    const SymMatrix a = testutil::random_sym(rng, 4);
    const OrthoBasis basis = orthonormalize({a, a * 2.0});
    CHECK(basis.m() == 1);
    REQUIRE(basis.dropped.size() == 1);
    CHECK(basis.dropped[0] == 1);
}

TEST_CASE("empty span is an error") {
    CHECK_THROWS_AS(orthonormalize({SymMatrix::Zero(3), SymMatrix::Zero(3)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(orthonormalize({}), std::invalid_argument);
}

TEST_CASE("gram matrix of the output is the identity") {
    Rng rng(7);
    const auto qs = testutil::random_sym_list(rng, 6, 4);
    const OrthoBasis basis = orthonormalize(qs);
    REQUIRE(basis.m() == 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double expect = i == j ? 1.0 : 0.0;
            CHECK(std::abs(inner(basis.mats[static_cast<std::size_t>(i)],
                                 basis.mats[static_cast<std::size_t>(j)]) -
                           expect) <= 1e-8);
        }
    }
}

TEST_CASE("span preservation: inputs reconstruct from the basis") {
    Rng rng(13);
    const auto qs = testutil::random_sym_list(rng, 5, 3);
    const OrthoBasis basis = orthonormalize(qs);
    for (const auto& q : qs) {
        Matrix rec = Matrix::Zero(5, 5);
        for (const auto& a : basis.mats) rec += inner(a, q) * a.mat();
        CHECK((rec - q.mat()).norm() <= 1e-7 * hs_norm(q));
    }
}

TEST_CASE("change-of-basis record reproduces the basis") {
    Rng rng(29);
    const auto qs = testutil::random_sym_list(rng, 4, 3);
    const OrthoBasis basis = orthonormalize(qs);
    for (int i = 0; i < basis.m(); ++i) {
        Matrix rec = Matrix::Zero(4, 4);
        for (std::size_t j = 0; j < qs.size(); ++j) {
            rec += basis.coeffs(i, static_cast<Index>(j)) * qs[j].mat();
        }
        CHECK((rec - basis.mats[static_cast<std::size_t>(i)].mat()).norm() <= 1e-8);
    }
}

TEST_CASE("sum of squares: single normalized identity") {
    const Index n = 5;
    const SymMatrix a1 = SymMatrix::Identity(n) * (1.0 / std::sqrt(static_cast<double>(n)));
    const OrthoBasis basis = orthonormalize({a1});
    const SymMatrix b = sum_of_squares(basis);
    CHECK((b.mat() - Matrix::Identity(n, n) / static_cast<double>(n)).norm() <= 1e-12);
}

TEST_CASE("sum of squares is a basis invariant of the span") {
    Rng rng(31);
    for (int t = 0; t < 10; ++t) {
        const auto qs = testutil::random_sym_list(rng, 6, 4);
        const OrthoBasis basis = orthonormalize(qs);
        const Matrix mix = testutil::random_orthogonal(rng, 4);
        const OrthoBasis basis2 = orthonormalize(mixed_basis(basis, mix));
        CHECK((basis.b.mat() - basis2.b.mat()).norm() <= 1e-8);
    }
}

TEST_CASE("sum of squares: trace, psd, and hs bound") {
    Rng rng(37);
    const auto qs = testutil::random_sym_list(rng, 7, 5);
    const OrthoBasis basis = orthonormalize(qs);
    const SymMatrix b = sum_of_squares(basis);

    CHECK(b.trace() == doctest::Approx(5.0).epsilon(1e-8));
    const Vector lam = eigendecompose(b).eigenvalues;
    CHECK(lam.minCoeff() >= -1e-10);
    const Norms nb = norms(b);
    CHECK(nb.hs * nb.hs <= 5.0 * nb.op + 1e-8);
    CHECK((b.mat() - basis.b.mat()).norm() <= 1e-8);
}

TEST_CASE("sphere combination basics") {
    Rng rng(41);
    const auto qs = testutil::random_sym_list(rng, 6, 3);
    const OrthoBasis basis = orthonormalize(qs);

    Vector e1 = Vector::Zero(3);
    e1[0] = 1.0;
    const SymMatrix a1 = sphere_combination(basis, e1);
    CHECK((a1.mat() - basis.mats[0].mat()).norm() == 0.0);

    Vector bad = Vector::Constant(3, 1.0);
    CHECK_THROWS_AS(sphere_combination(basis, bad), std::invalid_argument);

    const double b_op = operator_norm(basis.b);
    for (int t = 0; t < 50; ++t) {
        const Vector w = rng.haar_sphere(3);
        const SymMatrix aw = sphere_combination(basis, w);
        const Norms nm = norms(aw);
        CHECK(std::abs(nm.hs - 1.0) <= 1e-8);
        CHECK(nm.op <= std::sqrt(b_op) + 1e-8);
        CHECK(std::pow(nm.s4, 4) <= b_op + 1e-8);
    }
}

TEST_CASE("projection coordinates are bounded by the hs norm") {
    Rng rng(43);
    const auto qs = testutil::random_sym_list(rng, 5, 4);
    const OrthoBasis basis = orthonormalize(qs);
    for (int t = 0; t < 20; ++t) {
        const SymMatrix c = testutil::random_sym(rng, 5, 2.0);
        double sum = 0.0;
        for (const auto& a : basis.mats) {
            const double coord = inner(a, c);
            sum += coord * coord;
        }
        CHECK(sum <= inner(c, c) + 1e-8);
    }
}

TEST_CASE("eigenvalue moment bounds over the sphere") {
    Rng rng(47);
    const Index n = 40;
    const int m = 4;
    const auto qs = testutil::random_sym_list(rng, n, m);
    const OrthoBasis basis = orthonormalize(qs);
    const double b_op = operator_norm(basis.b);

    const int samples = 10000;
    double sum_s3sq = 0.0;
    double sum_s4 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Vector w = rng.haar_sphere(m);
        const Vector lam = eigendecompose(sphere_combination(basis, w)).eigenvalues;
        double s3 = 0.0, s4 = 0.0;
        for (Index j = 0; j < lam.size(); ++j) {
            s3 += lam[j] * lam[j] * lam[j];
            s4 += lam[j] * lam[j] * lam[j] * lam[j];
        }
        sum_s3sq += s3 * s3;
        sum_s4 += s4;
    }
    const double md = m;
    // 20% slack over the proven bounds covers the Monte Carlo noise
    CHECK(sum_s3sq / samples <= 120.0 / ((md + 2) * (md + 4)) * b_op * 1.2);
    CHECK(sum_s4 / samples <= 3.0 / (md + 2) * b_op * 1.2);
}

TEST_CASE("fourth-power norm concentration over the sphere") {
    Rng rng(53);
    const Index n = 60;
    const int m = 5;
    const auto qs = testutil::random_sym_list(rng, n, m);
    const OrthoBasis basis = orthonormalize(qs);
    const double b_op = operator_norm(basis.b);
    const double center = std::pow(3.0 * b_op / (m + 2), 0.25);

    const int samples = 4000;
    for (const double delta : {0.05, 0.1}) {
        int exceed = 0;
        for (int s = 0; s < samples; ++s) {
            const Vector w = rng.haar_sphere(m);
            const Norms nm =
                norms_from_eigenvalues(eigendecompose(sphere_combination(basis, w)).eigenvalues);
            if (nm.s4 >= center + delta) ++exceed;
        }
        const double freq = static_cast<double>(exceed) / samples;
        const double bound = std::exp(-delta * delta * (m - 1) / (2.0 * std::sqrt(b_op)));
        const double stderr_ = std::sqrt(std::max(freq * (1 - freq), 1.0 / samples) / samples);
        CHECK(freq <= bound + 3 * stderr_);
    }
}

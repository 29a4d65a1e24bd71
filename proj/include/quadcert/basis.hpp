#pragma once

#include <vector>

#include "quadcert/sym_matrix.hpp"

namespace quadcert {

/// Orthonormal basis of a subspace of symmetric matrices, together with the
/// subspace invariant B = sum A_i^2 and the change-of-basis record that
/// expresses each A_i in terms of the inputs it was built from.
struct OrthoBasis {
    std::vector<SymMatrix> mats;       // A_1..A_m, orthonormal under inner()
    SymMatrix b;                       // sum of A_i^2, positive semidefinite
    Matrix coeffs;                     // m x n_inputs, A_i = sum_j coeffs(i,j) Q_j
    std::vector<Index> dropped;        // input indices removed as dependent

    int m() const { return static_cast<int>(mats.size()); }
    Index dim() const { return mats.empty() ? 0 : mats.front().dim(); }
};

/// Gram-Schmidt in matrix space with one re-orthogonalization pass.
/// Inputs whose residual after projection is at most dep_tol times their
/// own HS norm are dropped and reported in `dropped`; zero inputs are
/// dropped unconditionally. Throws std::invalid_argument on an empty list,
/// mixed dimensions, or when every input is dependent ("empty span").
OrthoBasis orthonormalize(const std::vector<SymMatrix>& qs, double dep_tol = 1e-9);

/// Recomputes B = sum A_i^2 from the basis matrices.
SymMatrix sum_of_squares(const OrthoBasis& basis);

/// A(w) = sum w_i A_i for a unit vector w (|norm(w) - 1| <= 1e-12 enforced).
SymMatrix sphere_combination(const OrthoBasis& basis, const Vector& w);

}  // namespace quadcert

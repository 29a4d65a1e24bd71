#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadcert/sym_matrix.hpp"

namespace quadcert::reduce {

/// q(x) = <Qx, x> + <linear, x> + constant.
struct QuadraticPolynomial {
    SymMatrix q;
    Vector linear;
    double constant = 0.0;
};

/// Lift of an inhomogeneous quadratic system to homogeneous forms in one
/// extra variable: each polynomial becomes the (n+1)-dimensional form
/// [[Q, b/2], [b^t/2, c]], whose value at (x, 1) reproduces the polynomial,
/// together with the side constraint tau^2 = 1. Lifted solutions with
/// tau = 0 do not transport back.
struct HomogenizedSystem {
    Index original_n = 0;
    Index lifted_n = 0;                // original_n + 1
    std::vector<SymMatrix> lifted;     // one per input polynomial
    SymMatrix tau_constraint = SymMatrix::Zero(1);  // unit at (tau, tau), zero elsewhere
    Index tau_index = 0;               // position of the added variable
    std::string note;

    /// Lifted forms plus the tau constraint, as one homogeneous system.
    std::vector<SymMatrix> full_system() const;
    /// Right-hand sides for full_system(): zeros, then 1 for tau^2 = 1.
    Vector full_alpha() const;
};

HomogenizedSystem homogenize(const std::vector<QuadraticPolynomial>& polys);

/// Maps a lifted solution back via x / tau; empty when |tau| <= tau_tol.
std::optional<Vector> transport_solution(const HomogenizedSystem& sys, const Vector& lifted_x,
                                         double tau_tol = 1e-9);

}  // namespace quadcert::reduce

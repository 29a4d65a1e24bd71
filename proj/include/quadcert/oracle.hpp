#pragma once

#include <cstdint>
#include <vector>

#include "quadcert/sym_matrix.hpp"

namespace quadcert::oracle {

struct OracleOptions {
    int starts = 50;
    int max_iter = 500;
    std::uint64_t seed = 0;
};

/// Best witness found by multistart local minimization of the squared
/// residual sum_i (q_i(x) - alpha_i)^2 with q_i(x) = <Q_i x, x>.
struct OracleResult {
    Vector best_x;
    double residual = 0.0;
    double grad_norm = 0.0;   // (projected) gradient norm at best_x
    int starts = 0;
    bool converged = false;   // gradient tolerance met at best_x
    bool solved = false;      // residual below the witness threshold
};

/// Damped Gauss-Newton (Levenberg style) with multistart. Always returns the
/// best point found; `solved` means residual <= 1e-10 * (1 + sum alpha_i^2).
OracleResult solve(const std::vector<SymMatrix>& qs, const Vector& alpha,
                   const OracleOptions& opts = {});

/// Homogeneous variant: minimizes sum_i q_i(x)^2 over the unit sphere by
/// projected gradient with retraction; `solved` means residual <= 1e-10.
OracleResult solve_homogeneous(const std::vector<SymMatrix>& qs,
                               const OracleOptions& opts = {});

/// Exhaustive grid minimum of the residual over [lo, hi]^n, n <= 3 only.
/// Slow by design; used to pin expected values at tiny sizes.
double grid_search_min(const std::vector<SymMatrix>& qs, const Vector& alpha,
                       double lo, double hi, double step);

}  // namespace quadcert::oracle

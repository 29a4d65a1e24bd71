#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadcert/sym_matrix.hpp"

namespace quadcert::relax {

enum class FeasStatus { Infeasible, Feasible };

/// Feasibility verdict for { X psd : tr(Q_i X) = alpha_i }. Infeasible is a
/// heuristic verdict (projection gap plateaued above tolerance), not a dual
/// certificate, and the notes say so.
struct RelaxationResult {
    FeasStatus status = FeasStatus::Infeasible;
    std::optional<SymMatrix> x;     // present iff Feasible
    int rank = 0;                   // numerical rank of X at 1e-7 * ||X||_op
    double residual = 0.0;          // max_i |tr(Q_i X) - alpha_i|
    double entropy = 0.0;           // von Neumann entropy of X / tr X
    double gap = 0.0;               // final affine-to-cone distance
    int sweeps = 0;
    std::vector<double> ascent_entropies;  // filled by interiorize
    std::vector<std::string> notes;
};

struct SolveOptions {
    int max_sweeps = 50000;
    double feas_tol = 1e-6;         // scaled by (1 + max_i |alpha_i|)
    double plateau_level = 1e-6;    // gap regarded as genuine separation
    int plateau_window = 200;       // consecutive sweeps the gap must hold
    std::optional<SymMatrix> start;
};

/// Thrown when the sweep cap is hit without the gap either closing or
/// stabilizing; carries the final affine-to-cone distance.
class IndeterminateError : public std::runtime_error {
public:
    IndeterminateError(const std::string& msg, double gap)
        : std::runtime_error(msg), final_gap(gap) {}
    double final_gap;
};

/// Alternating projections (Dykstra) between the affine slice and the psd
/// cone. Inconsistent linear constraints on dependent inputs are detected
/// up front and reported Infeasible.
RelaxationResult solve_feasibility(const std::vector<SymMatrix>& qs, const Vector& alpha,
                                   const SolveOptions& opts = {});

/// Entropy ascent inside the feasible set: projected entropy gradient steps
/// with re-projection, trace pinned to its value at the input point. Entropy
/// never decreases by more than 1e-9 per accepted step and the numerical
/// rank never drops. Best-effort: returns the input when no improving step
/// exists.
RelaxationResult interiorize(const RelaxationResult& result, const std::vector<SymMatrix>& qs,
                             const Vector& alpha, int steps = 100);

/// Output of facial reduction: X = T T^t with T of full column rank r, and
/// the transformed forms Qhat_i = T^t Q_i T whose right-hand sides are their
/// own traces. equivalent is true iff r == n (no face was cut).
struct TransformedSystem {
    Matrix t;                       // n x r
    std::vector<SymMatrix> qhat;    // r x r
    Vector alpha;                   // alpha_i = tr Qhat_i
    Index reduced_dim = 0;
    bool equivalent = false;
};

TransformedSystem factor_and_transform(const RelaxationResult& result,
                                       const std::vector<SymMatrix>& qs);

enum class SmallMDecision { Unsolvable, Solvable };

/// Exact decision for systems whose span dimension is at most 2: the
/// quadratic system is solvable iff its relaxation is feasible.
SmallMDecision exact_small_m(const std::vector<SymMatrix>& qs, const Vector& alpha,
                             const SolveOptions& opts = {});

/// Largest r with r(r+1)/2 <= m: rank bound satisfied by every extreme
/// point of the feasible set.
int extreme_rank_bound(int m);

}  // namespace quadcert::relax

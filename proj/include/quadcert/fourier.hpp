#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "quadcert/basis.hpp"
#include "quadcert/sym_matrix.hpp"

namespace quadcert::fourier {

using Complex = std::complex<double>;

/// det^{-1/2}(I - i tau A) for a symmetric A given by its eigenvalues,
/// computed as exp(-1/2 sum log(1 - i tau lambda_j)) with the principal
/// logarithm. Re(1 - i tau lambda) = 1 > 0, so the branch is continuous in
/// tau and equals 1 at tau = 0.
Complex det_power(const Vector& lambdas, double tau);

/// Radial slice of the spherical integral: eigenvalues of A(w), the phase
/// coefficient (1/2 tr A(w) in the trace-matched route), and the ambient
/// equation count m.
struct RadialIntegrand {
    Vector eigenvalues;
    double trace_half = 0.0;
    int m = 1;
};

struct RadialResult {
    Complex value;            // integral over [0, cutoff]
    double quadrature_error;  // accumulated panel error estimate
    double tail_bound;        // modulus bound for [cutoff, infinity)
};

/// Reference value 2^{m-1} Gamma(m/2) = integral of tau^{m-1} e^{-tau^2/4}.
double benchmark_integral(int m);

/// Truncated reference integral of tau^{m-1} e^{-tau^2/4} over [0, c].
double benchmark_truncated(int m, double c);

/// Tail of the reference integral over [a, infinity).
double benchmark_tail(int m, double a);

/// Adaptive quadrature of tau^{m-1} det^{-1/2}(I - i tau A) e^{-i tau c}
/// over [0, cutoff] (default cutoff 5 sqrt(m)) to absolute tolerance
/// 1e-9 * benchmark_integral(m), with a bound on the modulus of the tail:
/// the closed-form small-operator-norm bound when ||A||_op <= 1/(10 sqrt m)
/// and ||A||_HS = 1, otherwise a numerically integrated envelope out to
/// 10x the cutoff plus an analytic remainder (infinite when the envelope
/// does not decay fast enough for the remainder to converge).
RadialResult radial_integral(const RadialIntegrand& ri, double cutoff = -1.0,
                             double abs_tol = -1.0);

/// Closed-form tail bound m^{m/2} e^{-3m} / (20 m), valid for m >= 2 when
/// ||A||_HS = 1 and ||A||_op <= 1/(10 sqrt m).
double small_norm_tail_bound(int m);

enum class TameClass { Tame, WildOmega1, WildOmega2 };

/// Classification of a sphere direction by its eigenvalue power sums:
/// tame when |sum lambda^3| <= 1/(25 m^{3/2}) and sum lambda^4 <= 1/(625 m^2);
/// the s4 violation dominates (WildOmega2), otherwise an s3 violation is
/// WildOmega1.
struct TamenessReport {
    double s3 = 0.0;
    double s4 = 0.0;
    TameClass cls = TameClass::Tame;
};

TamenessReport classify_tameness(const Vector& lambdas, int m);

/// Thresholds scaled to an inflated certificate constant eta = m * b_op
/// so that the two Markov bounds still deliver exceedance probabilities
/// 3/40 and 3/1600 (and hence a tame fraction of at least 7/8).
struct TameThresholds {
    double s3 = 0.0;
    double s4 = 0.0;
};
TameThresholds scaled_tame_thresholds(double b_op, int m);

struct VerifyOptions {
    int samples = 2000;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Monte Carlo estimate of the spherical determinant integral, with the
/// bookkeeping needed for a sound sign verdict.
struct IntegralEstimate {
    Complex value;
    double quadrature_error = 0.0;
    double tail_bound = 0.0;
    double mc_stderr = 0.0;
    int samples = 0;
    bool positive_real = false;  // Re(value) > total_uncertainty()

    double total_uncertainty() const {
        return quadrature_error + tail_bound + 3.0 * mc_stderr;
    }
};

/// Half-form right-hand sides alpha_i = 1/2 tr A_i for a basis: the
/// convention bridge between systems written as <Qx,x> = tr Q and the
/// determinant-integral route, which works with q(x) = 1/2 <Qx,x>.
Vector half_form_alpha(const OrthoBasis& basis);

/// Solvability attestation for the inhomogeneous system: estimates the
/// spherical integral with phase coefficient <alpha, w>; a positive_real
/// verdict attests that the system 1/2 <A_i x, x> = alpha_i has a real
/// solution. Intended usage has alpha = half_form_alpha(basis).
IntegralEstimate attest_solvable(const OrthoBasis& basis, const Vector& alpha,
                                 const VerifyOptions& opts = {});

/// Homogeneous attestation: requires tr A_i == 0 within 1e-8 and m < n;
/// a positive_real verdict attests a nontrivial solution of <A_i x, x> = 0.
IntegralEstimate attest_nontrivial_zero(const OrthoBasis& basis,
                                        const VerifyOptions& opts = {});

/// Both sides of the Gaussian/Fourier identity linking the smoothed
/// residual integral over R^n to the damped determinant integral over R^m
/// (half-form convention), evaluated by independent tensor quadratures.
/// Limited to n <= 2 and m <= 2.
struct DualQuadratureResult {
    double lhs = 0.0;
    Complex rhs;
    double gap = 0.0;
};

DualQuadratureResult gaussian_identity_check(const std::vector<SymMatrix>& qs,
                                             const Vector& alpha, double sigma);

}  // namespace quadcert::fourier

#pragma once

#include <string>
#include <vector>

#include "quadcert/basis.hpp"
#include "quadcert/sym_matrix.hpp"

namespace quadcert {

enum class Decision { CertifiedSolvable, Inconclusive };

/// Outcome of the operator-norm certificate. CertifiedSolvable attests that
/// the trace-matched system q_i(x) = tr Q_i (with q_i(x) = <Q_i x, x>) has a
/// real solution; in the homogeneous (traceless) variant it attests a
/// nontrivial solution of q_i(x) = 0. The check is one-directional: failure
/// of the norm bound is always Inconclusive, never a claim of unsolvability.
struct CertificateReport {
    Decision decision = Decision::Inconclusive;
    double norm_value = 0.0;   // ||sum A_i^2||_op for an orthonormal basis A
    double threshold = 0.0;    // eta / m_effective
    double eta = 0.0;
    int m_effective = 0;       // span dimension after dependence drops
    bool homogeneous = false;
    bool borderline = false;   // |norm_value - threshold| within the guard band
    std::vector<std::string> notes;
};

/// Certificate constant. The certificate is proven for 1e-6; desk-scale
/// experiments pass inflated values to exercise the pipeline, and reports
/// always carry the value used.
inline constexpr double kDefaultEta = 1e-6;

/// Comparisons within this distance of the threshold are flagged as
/// borderline and returned Inconclusive rather than silently decided.
inline constexpr double kCertifierGuardBand = 1e-9;

CertificateReport certify_inhomogeneous(const std::vector<SymMatrix>& qs,
                                        double eta = kDefaultEta);

/// Homogeneous variant: requires every tr Q_i == 0 within 1e-8 relative
/// (throws std::invalid_argument naming the offending index otherwise) and
/// gates on span dimension < n.
CertificateReport certify_homogeneous(const std::vector<SymMatrix>& qs,
                                      double eta = kDefaultEta);

}  // namespace quadcert

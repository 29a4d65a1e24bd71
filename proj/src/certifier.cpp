#include "quadcert/certifier.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quadcert {

namespace {

CertificateReport certify_impl(const std::vector<SymMatrix>& qs, double eta, bool homogeneous) {
    if (eta <= 0) throw std::invalid_argument("certify: eta must be > 0");

    if (homogeneous) {
        for (std::size_t i = 0; i < qs.size(); ++i) {
            const double scale = hs_norm(qs[i]);
            if (std::abs(qs[i].trace()) > 1e-8 * std::max(1e-300, scale)) {
                std::ostringstream os;
                os << "certify_homogeneous: input " << i << " has nonzero trace "
                   << qs[i].trace();
                throw std::invalid_argument(os.str());
            }
        }
    }

    const OrthoBasis basis = orthonormalize(qs);

    CertificateReport rep;
    rep.eta = eta;
    rep.homogeneous = homogeneous;
    rep.m_effective = basis.m();
    if (!basis.dropped.empty()) {
        std::ostringstream os;
        os << basis.dropped.size() << " dependent input(s) dropped; span dimension "
           << basis.m();
        rep.notes.push_back(os.str());
    }

    rep.norm_value = operator_norm(basis.b);
    rep.threshold = eta / rep.m_effective;

    if (rep.m_effective < 3) {
        rep.decision = Decision::Inconclusive;
        rep.notes.push_back(
            "certificate requires m >= 3 independent forms; for m <= 2 the relaxation "
            "is exact, use exact_small_m");
        return rep;
    }
    if (homogeneous && rep.m_effective >= basis.dim()) {
        rep.decision = Decision::Inconclusive;
        rep.notes.push_back("homogeneous certificate requires span dimension < n");
        return rep;
    }

    const double margin = rep.norm_value - rep.threshold;
    if (std::abs(margin) <= kCertifierGuardBand) {
        rep.decision = Decision::Inconclusive;
        rep.borderline = true;
        rep.notes.push_back("norm within guard band of the threshold; flagged, not decided");
    } else if (margin < 0) {
        rep.decision = Decision::CertifiedSolvable;
    } else {
        rep.decision = Decision::Inconclusive;
        rep.notes.push_back("operator-norm bound not met");
    }
    return rep;
}

}  // namespace

CertificateReport certify_inhomogeneous(const std::vector<SymMatrix>& qs, double eta) {
    return certify_impl(qs, eta, /*homogeneous=*/false);
}

CertificateReport certify_homogeneous(const std::vector<SymMatrix>& qs, double eta) {
    return certify_impl(qs, eta, /*homogeneous=*/true);
}

}  // namespace quadcert

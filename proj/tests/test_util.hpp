#pragma once

#include <vector>

#include "quadcert/rng.hpp"
#include "quadcert/sym_matrix.hpp"

namespace testutil {

inline quadcert::SymMatrix random_sym(quadcert::Rng& rng, quadcert::Index n,
                                      double scale = 1.0) {
    quadcert::Matrix m(n, n);
    for (quadcert::Index i = 0; i < n; ++i) {
        for (quadcert::Index j = 0; j < n; ++j) m(i, j) = scale * rng.gaussian();
    }
    return quadcert::SymMatrix(m);
}

inline std::vector<quadcert::SymMatrix> random_sym_list(quadcert::Rng& rng, quadcert::Index n,
                                                        int count) {
    std::vector<quadcert::SymMatrix> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(random_sym(rng, n));
    return out;
}

inline quadcert::Matrix random_orthogonal(quadcert::Rng& rng, quadcert::Index m) {
    quadcert::Matrix g(m, m);
    for (quadcert::Index i = 0; i < m; ++i) {
        for (quadcert::Index j = 0; j < m; ++j) g(i, j) = rng.gaussian();
    }
    Eigen::HouseholderQR<quadcert::Matrix> qr(g);
    quadcert::Matrix q = qr.householderQ();
    return q;
}

// The three-equation system x1^2 = 1, x2^2 = 1, x1 x2 = 0 (full convention),
// whose relaxation is feasible (the 2x2 identity) while the system itself has
// no solution.
inline std::vector<quadcert::SymMatrix> conflicting_pair_system() {
    quadcert::Matrix q1(2, 2), q2(2, 2), q3(2, 2);
    q1 << 1, 0, 0, 0;
    q2 << 0, 0, 0, 1;
    q3 << 0, 0.5, 0.5, 0;
    return {quadcert::SymMatrix(q1), quadcert::SymMatrix(q2), quadcert::SymMatrix(q3)};
}

inline quadcert::Vector conflicting_pair_alpha() {
    quadcert::Vector a(3);
    a << 1, 1, 0;
    return a;
}

}  // namespace testutil

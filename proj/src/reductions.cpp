#include "quadcert/reductions.hpp"

#include <cmath>
#include <stdexcept>

namespace quadcert::reduce {

std::vector<SymMatrix> HomogenizedSystem::full_system() const {
    std::vector<SymMatrix> out = lifted;
    out.push_back(tau_constraint);
    return out;
}

Vector HomogenizedSystem::full_alpha() const {
    Vector alpha = Vector::Zero(static_cast<Index>(lifted.size()) + 1);
    alpha[alpha.size() - 1] = 1.0;
    return alpha;
}

HomogenizedSystem homogenize(const std::vector<QuadraticPolynomial>& polys) {
    if (polys.empty()) throw std::invalid_argument("homogenize: empty polynomial list");
    const Index n = polys.front().q.dim();
    for (const auto& p : polys) {
        if (p.q.dim() != n || p.linear.size() != n) {
            throw std::invalid_argument("homogenize: mixed dimensions");
        }
    }

    HomogenizedSystem sys;
    sys.original_n = n;
    sys.lifted_n = n + 1;
    sys.tau_index = n;
    sys.note = "lifted solutions with tau = 0 do not transport back to the original system";
    sys.lifted.reserve(polys.size());
    for (const auto& p : polys) {
        Matrix lifted = Matrix::Zero(n + 1, n + 1);
        lifted.topLeftCorner(n, n) = p.q.mat();
        lifted.col(n).head(n) = 0.5 * p.linear;
        lifted.row(n).head(n) = 0.5 * p.linear.transpose();
        lifted(n, n) = p.constant;
        sys.lifted.emplace_back(std::move(lifted));
    }
    Matrix tau = Matrix::Zero(n + 1, n + 1);
    tau(n, n) = 1.0;
    sys.tau_constraint = SymMatrix(std::move(tau));
    return sys;
}

std::optional<Vector> transport_solution(const HomogenizedSystem& sys, const Vector& lifted_x,
                                         double tau_tol) {
    if (lifted_x.size() != sys.lifted_n) {
        throw std::invalid_argument("transport_solution: wrong lifted dimension");
    }
    const double tau = lifted_x[sys.tau_index];
    if (std::abs(tau) <= tau_tol) return std::nullopt;
    return Vector(lifted_x.head(sys.original_n) / tau);
}

}  // namespace quadcert::reduce

#include "quadcert/basis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quadcert {

OrthoBasis orthonormalize(const std::vector<SymMatrix>& qs, double dep_tol) {
    if (qs.empty()) throw std::invalid_argument("orthonormalize: empty input list");
    if (dep_tol <= 0) throw std::invalid_argument("orthonormalize: dep_tol must be > 0");
    const Index n = qs.front().dim();
    for (const auto& q : qs) {
        if (q.dim() != n) throw std::invalid_argument("orthonormalize: mixed dimensions");
    }

    const Index count = static_cast<Index>(qs.size());
    std::vector<Matrix> accepted;           // orthonormal matrices
    std::vector<Vector> expansions;         // rows of the change-of-basis record
    std::vector<Index> dropped;

    for (Index j = 0; j < count; ++j) {
        Matrix r = qs[static_cast<std::size_t>(j)].mat();
        Vector c = Vector::Zero(count);
        c[j] = 1.0;
        const double input_norm = r.norm();
        // two projection passes ("twice is enough")
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < accepted.size(); ++i) {
                const double coef = accepted[i].cwiseProduct(r).sum();
                r -= coef * accepted[i];
                c -= coef * expansions[i];
            }
        }
        const double res_norm = r.norm();
        if (input_norm == 0.0 || res_norm <= dep_tol * input_norm) {
            dropped.push_back(j);
            continue;
        }
        accepted.push_back(r / res_norm);
        expansions.push_back(c / res_norm);
    }

    if (accepted.empty()) {
        throw std::invalid_argument("orthonormalize: empty span (all inputs dependent or zero)");
    }

    OrthoBasis out{.mats = {}, .b = SymMatrix::Zero(n), .coeffs = {}, .dropped = std::move(dropped)};
    out.mats.reserve(accepted.size());
    Matrix bsum = Matrix::Zero(n, n);
    for (const auto& a : accepted) {
        bsum += a * a;
        out.mats.emplace_back(a);
    }
    out.b = SymMatrix(std::move(bsum));
    out.coeffs.resize(static_cast<Index>(expansions.size()), count);
    for (std::size_t i = 0; i < expansions.size(); ++i) {
        out.coeffs.row(static_cast<Index>(i)) = expansions[i].transpose();
    }
    return out;
}

SymMatrix sum_of_squares(const OrthoBasis& basis) {
    if (basis.mats.empty()) throw std::invalid_argument("sum_of_squares: empty basis");
    Matrix bsum = Matrix::Zero(basis.dim(), basis.dim());
    for (const auto& a : basis.mats) bsum += a.mat() * a.mat();
    return SymMatrix(std::move(bsum));
}

SymMatrix sphere_combination(const OrthoBasis& basis, const Vector& w) {
    if (w.size() != basis.m()) {
        throw std::invalid_argument("sphere_combination: weight size does not match basis");
    }
    if (std::abs(w.norm() - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "sphere_combination: weights must be a unit vector (norm=" << w.norm() << ")";
        throw std::invalid_argument(os.str());
    }
    Matrix acc = Matrix::Zero(basis.dim(), basis.dim());
    for (int i = 0; i < basis.m(); ++i) {
        acc += w[i] * basis.mats[static_cast<std::size_t>(i)].mat();
    }
    return SymMatrix(std::move(acc));
}

}  // namespace quadcert

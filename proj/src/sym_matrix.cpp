#include "quadcert/sym_matrix.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quadcert {

SymMatrix::SymMatrix(Matrix m) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << "SymMatrix: expected square matrix, got " << m.rows() << "x" << m.cols();
        throw std::invalid_argument(os.str());
    }
    if (m.rows() < 1) {
        throw std::invalid_argument("SymMatrix: dimension must be >= 1");
    }
    mat_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::Zero(Index n) {
    return SymMatrix(Matrix::Zero(n, n), already_symmetric_tag{});
}

SymMatrix SymMatrix::Identity(Index n) {
    return SymMatrix(Matrix::Identity(n, n), already_symmetric_tag{});
}

SymMatrix SymMatrix::Diagonal(const Vector& d) {
    if (d.size() < 1) throw std::invalid_argument("SymMatrix::Diagonal: empty diagonal");
    return SymMatrix(Matrix(d.asDiagonal()), already_symmetric_tag{});
}

SymMatrix SymMatrix::square() const {
    return SymMatrix(mat_ * mat_);
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
    if (o.dim() != dim()) throw std::invalid_argument("SymMatrix: dimension mismatch in +");
    return SymMatrix(mat_ + o.mat_, already_symmetric_tag{});
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
    if (o.dim() != dim()) throw std::invalid_argument("SymMatrix: dimension mismatch in -");
    return SymMatrix(mat_ - o.mat_, already_symmetric_tag{});
}

SymMatrix SymMatrix::operator*(double s) const {
    return SymMatrix(mat_ * s, already_symmetric_tag{});
}

double inner(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) {
        std::ostringstream os;
        os << "inner: dimension mismatch " << a.dim() << " vs " << b.dim();
        throw std::invalid_argument(os.str());
    }
    return a.mat().cwiseProduct(b.mat()).sum();
}

double quad_form(const SymMatrix& a, const Vector& x) {
    if (x.size() != a.dim()) throw std::invalid_argument("quad_form: dimension mismatch");
    return x.dot(a.mat() * x);
}

Spectrum eigendecompose(const SymMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
    if (solver.info() != Eigen::Success) {
        const double res = hs_norm(a);
        std::ostringstream os;
        os << "eigendecompose: solver failed to converge (n=" << a.dim()
           << ", input HS norm=" << res << ")";
        throw std::runtime_error(os.str());
    }
    Spectrum s;
    const Vector& ev = solver.eigenvalues();  // ascending from Eigen
    if (ev.size() > 1 && ev[0] < ev[ev.size() - 1]) {
        s.eigenvalues = ev.reverse();
        s.eigenvectors = solver.eigenvectors().rowwise().reverse();
    } else {
        s.eigenvalues = ev;
        s.eigenvectors = solver.eigenvectors();
    }
    return s;
}

Norms norms_from_eigenvalues(const Vector& lambdas) {
    Norms n{};
    n.op = lambdas.size() ? lambdas.cwiseAbs().maxCoeff() : 0.0;
    n.hs = lambdas.norm();
    double s4 = 0.0;
    for (Index j = 0; j < lambdas.size(); ++j) {
        const double l2 = lambdas[j] * lambdas[j];
        s4 += l2 * l2;
    }
    n.s4 = std::pow(s4, 0.25);
    return n;
}

Norms norms(const SymMatrix& a) {
    return norms_from_eigenvalues(eigendecompose(a).eigenvalues);
}

double operator_norm(const SymMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("operator_norm: eigenvalue solver failed");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace quadcert

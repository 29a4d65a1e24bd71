#pragma once

#include <Eigen/Dense>

namespace quadcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense real symmetric matrix under the trace inner product.
///
/// Construction symmetrizes (averages with the transpose), so downstream
/// code never has to re-check symmetry; file input with rounding asymmetry
/// is repaired here once. Values are immutable after construction.
class SymMatrix {
public:
    explicit SymMatrix(Matrix m);

    static SymMatrix Zero(Index n);
    static SymMatrix Identity(Index n);
    static SymMatrix Diagonal(const Vector& d);

    Index dim() const { return mat_.rows(); }
    const Matrix& mat() const { return mat_; }
    double operator()(Index i, Index j) const { return mat_(i, j); }
    double trace() const { return mat_.trace(); }

    /// Matrix square A*A (symmetric by construction).
    SymMatrix square() const;

    SymMatrix operator+(const SymMatrix& o) const;
    SymMatrix operator-(const SymMatrix& o) const;
    SymMatrix operator*(double s) const;

private:
    struct already_symmetric_tag {};
    SymMatrix(Matrix m, already_symmetric_tag) : mat_(std::move(m)) {}

    Matrix mat_;
};

inline SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

/// Trace inner product <a,b> = tr(ab) = sum_ij a_ij b_ij.
double inner(const SymMatrix& a, const SymMatrix& b);

/// Quadratic form value <Ax, x>.
double quad_form(const SymMatrix& a, const Vector& x);

/// Eigendecomposition with eigenvalues in descending order; columns of
/// eigenvectors match the eigenvalue order.
struct Spectrum {
    Vector eigenvalues;
    Matrix eigenvectors;
};

Spectrum eigendecompose(const SymMatrix& a);

struct Norms {
    double op;  // largest |eigenvalue|
    double hs;  // Frobenius
    double s4;  // (sum of fourth powers of eigenvalues)^(1/4)
};

Norms norms(const SymMatrix& a);
Norms norms_from_eigenvalues(const Vector& lambdas);

double operator_norm(const SymMatrix& a);
inline double hs_norm(const SymMatrix& a) { return a.mat().norm(); }

}  // namespace quadcert

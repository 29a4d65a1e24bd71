#include "quadcert/oracle.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadcert/rng.hpp"

namespace quadcert::oracle {

namespace {

double residual_at(const std::vector<SymMatrix>& qs, const Vector& alpha, const Vector& x) {
    double phi = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double f = quad_form(qs[i], x) - alpha[static_cast<Index>(i)];
        phi += f * f;
    }
    return phi;
}

Vector gradient_at(const std::vector<SymMatrix>& qs, const Vector& alpha, const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (std::size_t i = 0; i < qs.size(); ++i) {
        const double f = quad_form(qs[i], x) - alpha[static_cast<Index>(i)];
        g += (4.0 * f) * (qs[i].mat() * x);
    }
    return g;
}

// One damped Gauss-Newton descent from x0; returns the final point.
// The normal equations are solved in whichever of the primal/dual spaces
// is smaller (push-through identity), so large n with few equations stays
// cheap.
Vector lm_descend(const std::vector<SymMatrix>& qs, const Vector& alpha, Vector x,
                  int max_iter) {
    const Index n = x.size();
    const Index m = static_cast<Index>(qs.size());
    double mu = 1e-3;
    double phi = residual_at(qs, alpha, x);

    for (int iter = 0; iter < max_iter; ++iter) {
        Vector f(m);
        Matrix jt(n, m);  // J^T, columns are 2 Q_i x
        for (Index i = 0; i < m; ++i) {
            const auto& q = qs[static_cast<std::size_t>(i)];
            jt.col(i) = 2.0 * (q.mat() * x);
            f[i] = quad_form(q, x) - alpha[i];
        }
        const Vector grad = 2.0 * (jt * f);
        if (grad.norm() <= 1e-10 * (1.0 + phi)) break;

        bool stepped = false;
        for (int tries = 0; tries < 25; ++tries) {
            Vector delta;
            if (m <= n) {
                Matrix gram = jt.transpose() * jt;
                gram.diagonal().array() += mu;
                delta = -jt * gram.ldlt().solve(f);
            } else {
                Matrix gram = jt * jt.transpose();
                gram.diagonal().array() += mu;
                delta = -gram.ldlt().solve(jt * f);
            }
            const Vector xc = x + delta;
            const double phic = residual_at(qs, alpha, xc);
            if (phic < phi) {
                x = xc;
                phi = phic;
                mu = std::max(mu * 0.3, 1e-12);
                stepped = true;
                break;
            }
            mu *= 3.0;
        }
        if (!stepped) break;
        if (phi == 0.0) break;
    }
    return x;
}

double homogeneous_residual(const std::vector<SymMatrix>& qs, const Vector& x) {
    double phi = 0.0;
    for (const auto& q : qs) {
        const double v = quad_form(q, x);
        phi += v * v;
    }
    return phi;
}

Vector tangent_gradient(const std::vector<SymMatrix>& qs, const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (const auto& q : qs) {
        g += (4.0 * quad_form(q, x)) * (q.mat() * x);
    }
    return g - g.dot(x) * x;
}

Vector sphere_descend(const std::vector<SymMatrix>& qs, Vector x, int max_iter) {
    x.normalize();
    double phi = homogeneous_residual(qs, x);
    double t = 1.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Vector gt = tangent_gradient(qs, x);
        const double gn = gt.norm();
        if (gn <= 1e-10 * (1.0 + phi)) break;
        bool stepped = false;
        for (; t >= 1e-18; t /= 2) {
            Vector xc = x - t * gt;
            xc.normalize();
            const double phic = homogeneous_residual(qs, xc);
            if (phic <= phi - 1e-4 * t * gn * gn) {
                x = xc;
                phi = phic;
                t *= 4.0;  // let the next line search start optimistic
                stepped = true;
                break;
            }
        }
        if (!stepped) break;
        if (phi == 0.0) break;
    }
    return x;
}

// Scale-invariant Levenberg polish for the homogeneous problem: residuals
// r_i(x) = q_i(x)/|x|^2 handle the rank-deficient Jacobians near a zero.
Vector sphere_lm_polish(const std::vector<SymMatrix>& qs, Vector x, int max_iter) {
    const Index n = x.size();
    const Index m = static_cast<Index>(qs.size());
    double mu = 1e-6;
    x.normalize();
    double phi = homogeneous_residual(qs, x);
    for (int iter = 0; iter < max_iter; ++iter) {
        Vector r(m);
        Matrix jt(n, m);
        for (Index i = 0; i < m; ++i) {
            const auto& q = qs[static_cast<std::size_t>(i)];
            const double v = quad_form(q, x);
            r[i] = v;
            jt.col(i) = 2.0 * (q.mat() * x - v * x);
        }
        bool stepped = false;
        for (int tries = 0; tries < 25; ++tries) {
            Matrix gram;
            Vector delta;
            if (m <= n) {
                gram = jt.transpose() * jt;
                gram.diagonal().array() += mu;
                delta = -jt * gram.ldlt().solve(r);
            } else {
                gram = jt * jt.transpose();
                gram.diagonal().array() += mu;
                delta = -gram.ldlt().solve(jt * r);
            }
            Vector xc = x + delta;
            xc.normalize();
            const double phic = homogeneous_residual(qs, xc);
            if (phic < phi) {
                x = xc;
                phi = phic;
                mu = std::max(mu * 0.3, 1e-12);
                stepped = true;
                break;
            }
            mu *= 3.0;
        }
        if (!stepped || phi == 0.0) break;
    }
    return x;
}

std::array<double, 4> start_radii(Index n) {
    return {0.5, 1.0, 2.0, std::sqrt(static_cast<double>(n))};
}

void validate(const std::vector<SymMatrix>& qs, const OracleOptions& opts) {
    if (qs.empty()) throw std::invalid_argument("oracle: empty system");
    const Index n = qs.front().dim();
    for (const auto& q : qs) {
        if (q.dim() != n) throw std::invalid_argument("oracle: mixed dimensions");
    }
    if (opts.starts < 1) throw std::invalid_argument("oracle: starts must be >= 1");
}

}  // namespace

OracleResult solve(const std::vector<SymMatrix>& qs, const Vector& alpha,
                   const OracleOptions& opts) {
    validate(qs, opts);
    if (alpha.size() != static_cast<Index>(qs.size())) {
        throw std::invalid_argument("oracle::solve: alpha length mismatch");
    }
    const Index n = qs.front().dim();
    const auto radii = start_radii(n);

    Vector best = Vector::Zero(n);
    double best_phi = residual_at(qs, alpha, best);
    for (int s = 0; s < opts.starts; ++s) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
        Vector dir = rng.gaussian_vector(n);
        if (dir.norm() == 0.0) continue;
        dir.normalize();
        const Vector x0 = radii[static_cast<std::size_t>(s) % radii.size()] * dir;
        const Vector x = lm_descend(qs, alpha, x0, opts.max_iter);
        const double phi = residual_at(qs, alpha, x);
        if (phi < best_phi) {
            best = x;
            best_phi = phi;
        }
    }
    best = lm_descend(qs, alpha, best, 4 * opts.max_iter);

    OracleResult res;
    res.best_x = best;
    res.residual = residual_at(qs, alpha, best);
    res.grad_norm = gradient_at(qs, alpha, best).norm();
    res.starts = opts.starts;
    res.converged = res.grad_norm <= 1e-8 * (1.0 + res.residual);
    res.solved = res.residual <= 1e-10 * (1.0 + alpha.squaredNorm());
    return res;
}

OracleResult solve_homogeneous(const std::vector<SymMatrix>& qs, const OracleOptions& opts) {
    validate(qs, opts);
    const Index n = qs.front().dim();

    Vector best;
    double best_phi = std::numeric_limits<double>::infinity();
    for (int s = 0; s < opts.starts; ++s) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
        Vector x0 = rng.gaussian_vector(n);
        if (x0.norm() == 0.0) continue;
        Vector x = sphere_descend(qs, x0, opts.max_iter);
        x = sphere_lm_polish(qs, x, opts.max_iter);
        const double phi = homogeneous_residual(qs, x);
        if (phi < best_phi) {
            best = x;
            best_phi = phi;
        }
    }
    best = sphere_lm_polish(qs, sphere_descend(qs, best, 2 * opts.max_iter), 2 * opts.max_iter);
    best.normalize();

    OracleResult res;
    res.best_x = best;
    res.residual = homogeneous_residual(qs, best);
    res.grad_norm = tangent_gradient(qs, best).norm();
    res.starts = opts.starts;
    res.converged = res.grad_norm <= 1e-8 * (1.0 + res.residual);
    res.solved = res.residual <= 1e-10;
    return res;
}

double grid_search_min(const std::vector<SymMatrix>& qs, const Vector& alpha,
                       double lo, double hi, double step) {
    if (qs.empty()) throw std::invalid_argument("grid_search_min: empty system");
    const Index n = qs.front().dim();
    if (n > 3) throw std::invalid_argument("grid_search_min: n must be <= 3");
    if (!(step > 0) || !(hi > lo)) throw std::invalid_argument("grid_search_min: bad grid");
    if (alpha.size() != static_cast<Index>(qs.size())) {
        throw std::invalid_argument("grid_search_min: alpha length mismatch");
    }

    const auto points = static_cast<long>(std::floor((hi - lo) / step)) + 1;
    const std::size_t m = qs.size();

    // flatten matrices for the hot loop
    std::vector<const double*> mats(m);
    for (std::size_t i = 0; i < m; ++i) mats[i] = qs[i].mat().data();

    double best = std::numeric_limits<double>::infinity();
    Vector x(n);
    std::vector<long> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        for (Index d = 0; d < n; ++d) x[d] = lo + step * idx[static_cast<std::size_t>(d)];
        double phi = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double* q = mats[i];
            double v = 0.0;
            for (Index a = 0; a < n; ++a)
                for (Index b = 0; b < n; ++b) v += q[b + a * n] * x[a] * x[b];
            const double f = v - alpha[static_cast<Index>(i)];
            phi += f * f;
        }
        if (phi < best) best = phi;

        Index d = 0;
        while (d < n) {
            if (++idx[static_cast<std::size_t>(d)] < points) break;
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == n) break;
    }
    return best;
}

}  // namespace quadcert::oracle

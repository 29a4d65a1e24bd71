#include "quadcert/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "quadcert/basis.hpp"

namespace quadcert::relax {

namespace {

constexpr double kRankTolFactor = 1e-7;

struct AffineSlice {
    std::vector<Matrix> basis;  // orthonormal matrices spanning the constraint space
    Vector rhs;                 // target projection coordinates
    bool consistent = true;
};

// Rewrites { X : tr(Q_j X) = alpha_j } as { X : <A_i, X> = rhs_i } over an
// orthonormal basis A of span(Q). When dependent inputs make the system
// inconsistent as linear equations, the slice is empty.
AffineSlice build_slice(const std::vector<SymMatrix>& qs, const Vector& alpha) {
    const OrthoBasis ob = orthonormalize(qs);
    const Index m_in = static_cast<Index>(qs.size());
    const int m_eff = ob.m();

    Matrix d(m_in, m_eff);
    for (Index j = 0; j < m_in; ++j) {
        for (int i = 0; i < m_eff; ++i) {
            d(j, i) = inner(ob.mats[static_cast<std::size_t>(i)], qs[static_cast<std::size_t>(j)]);
        }
    }
    const Vector rhs = d.colPivHouseholderQr().solve(alpha);
    const double ls_residual = (d * rhs - alpha).cwiseAbs().maxCoeff();

    AffineSlice slice;
    slice.rhs = rhs;
    slice.basis.reserve(static_cast<std::size_t>(m_eff));
    for (const auto& a : ob.mats) slice.basis.push_back(a.mat());
    slice.consistent = ls_residual <= 1e-7 * (1.0 + alpha.cwiseAbs().maxCoeff());
    return slice;
}

Matrix project_affine(const AffineSlice& slice, const Matrix& y) {
    Matrix out = y;
    for (std::size_t i = 0; i < slice.basis.size(); ++i) {
        const double c = slice.basis[i].cwiseProduct(out).sum() - slice.rhs[static_cast<Index>(i)];
        out -= c * slice.basis[i];
    }
    return out;
}

Matrix project_psd(const Matrix& y) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (y + y.transpose()));
    const Vector lam = solver.eigenvalues().cwiseMax(0.0);
    return solver.eigenvectors() * lam.asDiagonal() * solver.eigenvectors().transpose();
}

double max_constraint_residual(const std::vector<SymMatrix>& qs, const Vector& alpha,
                               const Matrix& x) {
    double r = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        r = std::max(r, std::abs(qs[i].mat().cwiseProduct(x).sum() - alpha[static_cast<Index>(i)]));
    }
    return r;
}

int numerical_rank(const Vector& eigenvalues_desc) {
    if (eigenvalues_desc.size() == 0) return 0;
    const double top = eigenvalues_desc.cwiseAbs().maxCoeff();
    if (top <= 0.0) return 0;
    int r = 0;
    for (Index j = 0; j < eigenvalues_desc.size(); ++j) {
        if (eigenvalues_desc[j] >= kRankTolFactor * top) ++r;
    }
    return r;
}

double von_neumann_entropy(const Vector& eigenvalues) {
    const double total = eigenvalues.sum();
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (Index j = 0; j < eigenvalues.size(); ++j) {
        const double mu = eigenvalues[j] / total;
        if (mu > 0.0) s -= mu * std::log(mu);
    }
    return s;
}

RelaxationResult finish_feasible(const std::vector<SymMatrix>& qs, const Vector& alpha,
                                 const Matrix& x, double gap, int sweeps) {
    RelaxationResult res;
    res.status = FeasStatus::Feasible;
    SymMatrix xs{x};
    const Spectrum spec = eigendecompose(xs);
    res.rank = numerical_rank(spec.eigenvalues);
    res.entropy = von_neumann_entropy(spec.eigenvalues);
    res.residual = max_constraint_residual(qs, alpha, x);
    res.gap = gap;
    res.sweeps = sweeps;
    res.x = std::move(xs);
    return res;
}

}  // namespace

RelaxationResult solve_feasibility(const std::vector<SymMatrix>& qs, const Vector& alpha,
                                   const SolveOptions& opts) {
    if (qs.empty()) throw std::invalid_argument("solve_feasibility: empty constraint list");
    if (static_cast<Index>(qs.size()) != alpha.size()) {
        throw std::invalid_argument("solve_feasibility: constraint/rhs length mismatch");
    }
    if (opts.max_sweeps < 1) throw std::invalid_argument("solve_feasibility: max_sweeps < 1");
    const Index n = qs.front().dim();
    if (opts.start && opts.start->dim() != n) {
        throw std::invalid_argument("solve_feasibility: start point dimension mismatch");
    }

    const AffineSlice slice = build_slice(qs, alpha);
    if (!slice.consistent) {
        RelaxationResult res;
        res.status = FeasStatus::Infeasible;
        res.notes.push_back("linear constraints are inconsistent on dependent inputs (empty slice)");
        return res;
    }

    const double feas_scale = 1.0 + alpha.cwiseAbs().maxCoeff();
    Matrix x = opts.start ? opts.start->mat() : project_affine(slice, Matrix::Identity(n, n));
    Matrix correction = Matrix::Zero(n, n);

    std::deque<double> window;
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        const Matrix y = project_affine(slice, x);
        const Matrix z = project_psd(y + correction);
        correction = y + correction - z;
        const double gap = (y - z).norm();
        x = z;

        const double residual = max_constraint_residual(qs, alpha, z);
        if (residual <= opts.feas_tol * feas_scale) {
            return finish_feasible(qs, alpha, z, gap, sweep);
        }

        window.push_back(gap);
        if (static_cast<int>(window.size()) > opts.plateau_window) window.pop_front();
        if (static_cast<int>(window.size()) == opts.plateau_window) {
            const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
            if (*lo > opts.plateau_level && (*hi - *lo) <= 1e-3 * *lo) {
                RelaxationResult res;
                res.status = FeasStatus::Infeasible;
                res.gap = gap;
                res.sweeps = sweep;
                res.notes.push_back(
                    "numerically infeasible: projection gap plateaued above tolerance "
                    "(heuristic verdict, not a dual certificate)");
                return res;
            }
        }
    }

    std::ostringstream os;
    os << "solve_feasibility: sweep cap " << opts.max_sweeps
       << " reached without stabilization (gap=" << window.back() << ")";
    throw IndeterminateError(os.str(), window.back());
}

RelaxationResult interiorize(const RelaxationResult& result, const std::vector<SymMatrix>& qs,
                             const Vector& alpha, int steps) {
    if (result.status != FeasStatus::Feasible || !result.x) {
        throw std::invalid_argument("interiorize: requires a Feasible input");
    }
    const Index n = result.x->dim();

    // Pin the trace to its incoming value so the ascent is well posed even
    // when the feasible set is unbounded.
    std::vector<SymMatrix> constraints = qs;
    constraints.push_back(SymMatrix::Identity(n));
    Vector rhs(alpha.size() + 1);
    rhs.head(alpha.size()) = alpha;
    rhs[alpha.size()] = result.x->trace();
    const AffineSlice slice = build_slice(constraints, rhs);

    const double feas_scale = 1.0 + alpha.cwiseAbs().maxCoeff();

    Matrix x = result.x->mat();
    Spectrum spec = eigendecompose(SymMatrix(x));
    double entropy = von_neumann_entropy(spec.eigenvalues);
    int rank = numerical_rank(spec.eigenvalues);

    RelaxationResult out = result;
    out.ascent_entropies.clear();
    out.ascent_entropies.push_back(entropy);
    int accepted = 0;

    for (int step = 0; step < steps; ++step) {
        const double top = std::max(spec.eigenvalues.maxCoeff(), 0.0);
        const double floor = 1e-12 * std::max(1.0, top);
        Vector g(spec.eigenvalues.size());
        for (Index j = 0; j < g.size(); ++j) {
            g[j] = -std::log(std::max(spec.eigenvalues[j], floor)) - 1.0;
        }
        Matrix grad = spec.eigenvectors * g.asDiagonal() * spec.eigenvectors.transpose();
        // restrict to the affine tangent space
        for (std::size_t i = 0; i < slice.basis.size(); ++i) {
            grad -= slice.basis[i].cwiseProduct(grad).sum() * slice.basis[i];
        }
        const double gnorm = grad.norm();
        if (gnorm <= 1e-12) break;  // ascent fixed point
        grad /= gnorm;

        bool moved = false;
        for (double t = 0.1; t >= 1e-8; t /= 2) {
            Matrix cand = x + t * grad;
            // re-project: alternate between the slice and the cone
            Matrix correction = Matrix::Zero(n, n);
            Matrix z = cand;
            bool projected = false;
            for (int k = 0; k < 2000; ++k) {
                const Matrix y = project_affine(slice, z);
                z = project_psd(y + correction);
                correction = y + correction - z;
                if (max_constraint_residual(qs, alpha, z) <= 1e-6 * feas_scale) {
                    projected = true;
                    break;
                }
            }
            if (!projected) continue;
            const Spectrum cand_spec = eigendecompose(SymMatrix(z));
            const double cand_entropy = von_neumann_entropy(cand_spec.eigenvalues);
            const int cand_rank = numerical_rank(cand_spec.eigenvalues);
            if (cand_entropy >= entropy - 1e-9 && cand_rank >= rank) {
                x = std::move(z);
                spec = cand_spec;
                entropy = cand_entropy;
                rank = cand_rank;
                moved = true;
                ++accepted;
                out.ascent_entropies.push_back(entropy);
                break;
            }
        }
        if (!moved) break;
    }

    out.x = SymMatrix(x);
    out.rank = rank;
    out.entropy = entropy;
    out.residual = max_constraint_residual(qs, alpha, x);
    {
        std::ostringstream os;
        os << "entropy ascent: " << accepted << " accepted step(s)";
        out.notes.push_back(os.str());
    }
    return out;
}

TransformedSystem factor_and_transform(const RelaxationResult& result,
                                       const std::vector<SymMatrix>& qs) {
    if (result.status != FeasStatus::Feasible || !result.x) {
        throw std::invalid_argument("factor_and_transform: requires a Feasible input");
    }
    const Index n = result.x->dim();
    const Spectrum spec = eigendecompose(*result.x);
    const double top = std::max(spec.eigenvalues.maxCoeff(), 0.0);
    const int r = numerical_rank(spec.eigenvalues);
    if (r == 0 || top <= 0.0) {
        throw std::runtime_error("factor_and_transform: trivial face (X has rank 0)");
    }

    Matrix t(n, r);
    for (int j = 0; j < r; ++j) {
        t.col(j) = spec.eigenvectors.col(j) * std::sqrt(spec.eigenvalues[j]);
    }

    TransformedSystem sys;
    sys.t = std::move(t);
    sys.reduced_dim = r;
    sys.equivalent = (r == n);
    sys.qhat.reserve(qs.size());
    sys.alpha.resize(static_cast<Index>(qs.size()));
    for (std::size_t i = 0; i < qs.size(); ++i) {
        SymMatrix qhat{Matrix(sys.t.transpose() * qs[i].mat() * sys.t)};
        sys.alpha[static_cast<Index>(i)] = qhat.trace();
        sys.qhat.push_back(std::move(qhat));
    }
    return sys;
}

SmallMDecision exact_small_m(const std::vector<SymMatrix>& qs, const Vector& alpha,
                             const SolveOptions& opts) {
    const OrthoBasis ob = orthonormalize(qs);
    if (ob.m() > 2) {
        throw std::invalid_argument("exact_small_m: span dimension exceeds 2");
    }
    const RelaxationResult res = solve_feasibility(qs, alpha, opts);
    return res.status == FeasStatus::Feasible ? SmallMDecision::Solvable
                                              : SmallMDecision::Unsolvable;
}

int extreme_rank_bound(int m) {
    if (m < 1) throw std::invalid_argument("extreme_rank_bound: m must be >= 1");
    int r = static_cast<int>(std::floor((std::sqrt(8.0 * m + 1.0) - 1.0) / 2.0));
    while ((r + 1) * (r + 2) / 2 <= m) ++r;
    while (r > 0 && r * (r + 1) / 2 > m) --r;
    return r;
}

}  // namespace quadcert::relax

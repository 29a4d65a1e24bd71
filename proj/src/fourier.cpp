#include "quadcert/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "quadcert/parallel.hpp"
#include "quadcert/rng.hpp"

namespace quadcert::fourier {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 15-point Kronrod extension of 7-point Gauss (abscissae >= 0 and weights).
constexpr int kKronrodHalf = 8;
constexpr double kXgk[kKronrodHalf] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
constexpr double kWgk[kKronrodHalf] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                           0.4179591836734694};

struct Panel {
    double a, b;
    Complex integral;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel eval_panel(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    Complex kron{0.0, 0.0};
    Complex gauss{0.0, 0.0};
    for (int j = 0; j < kKronrodHalf - 1; ++j) {
        const Complex fl = f(c - h * kXgk[j]);
        const Complex fr = f(c + h * kXgk[j]);
        kron += kWgk[j] * (fl + fr);
        if (j % 2 == 1) gauss += kWg[j / 2] * (fl + fr);
    }
    const Complex fc = f(c);
    kron += kWgk[kKronrodHalf - 1] * fc;
    gauss += kWg[3] * fc;
    kron *= h;
    gauss *= h;
    return Panel{a, b, kron, std::abs(kron - gauss)};
}

// Adaptive Gauss-Kronrod over [a, b]; refines the worst panel until the
// summed error estimate meets abs_tol or the panel budget runs out.
template <typename F>
std::pair<Complex, double> adaptive_quadrature(const F& f, double a, double b, double abs_tol,
                                               int initial_panels, int max_panels = 20000) {
    initial_panels = std::clamp(initial_panels, 1, max_panels);
    std::priority_queue<Panel> heap;
    Complex total{0.0, 0.0};
    double err = 0.0;
    const double width = (b - a) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
        Panel p = eval_panel(f, a + i * width, a + (i + 1) * width);
        total += p.integral;
        err += p.error;
        heap.push(p);
    }
    int panels = initial_panels;
    while (err > abs_tol && panels < max_panels) {
        const Panel worst = heap.top();
        heap.pop();
        total -= worst.integral;
        err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        for (const Panel& p : {eval_panel(f, worst.a, mid), eval_panel(f, mid, worst.b)}) {
            total += p.integral;
            err += p.error;
            heap.push(p);
        }
        ++panels;
    }
    if (err > abs_tol) {
        std::ostringstream os;
        os << "quadrature did not reach tolerance " << abs_tol << " (achieved " << err
           << " with " << panels << " panels)";
        throw std::runtime_error(os.str());
    }
    return {total, err};
}

double envelope_modulus(const Vector& lambdas, double tau) {
    double logsum = 0.0;
    for (Index j = 0; j < lambdas.size(); ++j) {
        const double t = tau * lambdas[j];
        logsum += std::log1p(t * t);
    }
    return std::exp(-0.25 * logsum);
}

// Remainder of the modulus integral beyond t1: anchor the envelope at t1
// and decay it through the k largest |eigenvalues| (k chosen just past the
// divergence threshold 2m). Infinite when too few eigenvalues are nonzero.
double analytic_envelope_remainder(const Vector& lambdas, int m, double t1) {
    std::vector<double> mags(static_cast<std::size_t>(lambdas.size()));
    for (Index j = 0; j < lambdas.size(); ++j) mags[static_cast<std::size_t>(j)] = std::abs(lambdas[j]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    const int k = std::min<int>(static_cast<int>(mags.size()), 2 * m + 2);
    if (k <= 2 * m) return kInf;
    const double mu = mags[static_cast<std::size_t>(k - 1)];
    if (mu <= 0.0) return kInf;

    const double env_t1 = envelope_modulus(lambdas, t1);
    const double anchor = std::pow(1.0 + t1 * t1 * mu * mu, 0.25 * k);
    const double power = 0.5 * k - m;  // > 0 here
    const double integral = std::pow(mu, -0.5 * k) * std::pow(t1, m - 0.5 * k) / power;
    return env_t1 * anchor * integral;
}

struct SampleOutcome {
    Complex value;
    double quad_error;
    double tail;
};

IntegralEstimate aggregate(const std::vector<SampleOutcome>& outcomes) {
    IntegralEstimate est;
    est.samples = static_cast<int>(outcomes.size());
    Complex sum{0.0, 0.0};
    double quad = 0.0;
    double tail = 0.0;
    for (const auto& o : outcomes) {
        sum += o.value;
        quad += o.quad_error;
        tail += o.tail;
    }
    const double inv = 1.0 / est.samples;
    est.value = sum * inv;
    est.quadrature_error = quad * inv;
    est.tail_bound = tail * inv;

    double var = 0.0;
    for (const auto& o : outcomes) {
        const double d = o.value.real() - est.value.real();
        var += d * d;
    }
    est.mc_stderr = est.samples > 1 ? std::sqrt(var / (est.samples - 1.0) / est.samples) : kInf;
    est.positive_real = est.value.real() > est.total_uncertainty();
    return est;
}

IntegralEstimate run_sphere_estimate(const OrthoBasis& basis, const Vector& alpha,
                                     const VerifyOptions& opts) {
    if (opts.samples < 2) throw std::invalid_argument("sphere estimate: need >= 2 samples");
    const int m = basis.m();
    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(opts.samples));
    parallel_for(static_cast<std::size_t>(opts.samples), opts.threads, [&](std::size_t s) {
        Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
        const Vector w = rng.haar_sphere(m);
        const SymMatrix aw = sphere_combination(basis, w);
        RadialIntegrand ri;
        ri.eigenvalues = eigendecompose(aw).eigenvalues;
        ri.trace_half = alpha.dot(w);
        ri.m = m;
        const RadialResult r = radial_integral(ri);
        outcomes[s] = SampleOutcome{r.value, r.quadrature_error, r.tail_bound};
    });
    return aggregate(outcomes);
}

}  // namespace

Complex det_power(const Vector& lambdas, double tau) {
    Complex logsum{0.0, 0.0};
    for (Index j = 0; j < lambdas.size(); ++j) {
        logsum += std::log(Complex{1.0, -tau * lambdas[j]});
    }
    return std::exp(-0.5 * logsum);
}

double benchmark_integral(int m) {
    if (m < 1) throw std::invalid_argument("benchmark_integral: m must be >= 1");
    return std::pow(2.0, m - 1) * std::tgamma(0.5 * m);
}

double benchmark_truncated(int m, double c) {
    if (m < 1 || c < 0) throw std::invalid_argument("benchmark_truncated: bad arguments");
    const auto f = [m](double tau) {
        return Complex{std::pow(tau, m - 1) * std::exp(-0.25 * tau * tau), 0.0};
    };
    auto [value, err] =
        adaptive_quadrature(f, 0.0, c, 1e-12 * benchmark_integral(m), std::max(8, m));
    (void)err;
    return value.real();
}

double benchmark_tail(int m, double a) {
    if (m < 1 || a < 0) throw std::invalid_argument("benchmark_tail: bad arguments");
    // integrand underflows well before a + 80
    const auto f = [m](double tau) {
        return Complex{std::pow(tau, m - 1) * std::exp(-0.25 * tau * tau), 0.0};
    };
    auto [value, err] = adaptive_quadrature(f, a, a + 80.0, 1e-14 * benchmark_integral(m), 64);
    (void)err;
    return value.real();
}

double small_norm_tail_bound(int m) {
    return std::exp(0.5 * m * std::log(static_cast<double>(m)) - 3.0 * m) / (20.0 * m);
}

RadialResult radial_integral(const RadialIntegrand& ri, double cutoff, double abs_tol) {
    const int m = ri.m;
    if (m < 1) throw std::invalid_argument("radial_integral: m must be >= 1");
    const double sqrt_m = std::sqrt(static_cast<double>(m));
    if (cutoff <= 0.0) cutoff = 5.0 * sqrt_m;
    if (abs_tol <= 0.0) abs_tol = 1e-9 * benchmark_integral(m);

    const Vector& lam = ri.eigenvalues;
    const double c = ri.trace_half;
    const auto f = [&](double tau) {
        return std::pow(tau, m - 1) * det_power(lam, tau) *
               std::exp(Complex{0.0, -tau * c});
    };
    // initial panels sized so the estimated phase change per panel is ~pi/4
    const double phase_rate = std::abs(c) + 0.5 * lam.cwiseAbs().sum();
    const int initial = std::clamp(
        static_cast<int>(std::ceil(cutoff * phase_rate / (0.25 * M_PI))), 8, 4096);
    auto [value, err] = adaptive_quadrature(f, 0.0, cutoff, abs_tol, initial);

    RadialResult out;
    out.value = value;
    out.quadrature_error = err;

    const Norms nm = norms_from_eigenvalues(lam);
    const bool small_norm = m >= 2 && nm.op <= 1.0 / (10.0 * sqrt_m) &&
                            std::abs(nm.hs - 1.0) <= 1e-8 && cutoff >= 5.0 * sqrt_m;
    if (small_norm) {
        out.tail_bound = small_norm_tail_bound(m);
    } else {
        const double t1 = std::max(10.0 * sqrt_m * 5.0, 2.0 * cutoff);
        const double remainder = analytic_envelope_remainder(lam, m, t1);
        if (std::isinf(remainder)) {
            out.tail_bound = kInf;
        } else {
            const auto env = [&](double tau) {
                return Complex{std::pow(tau, m - 1) * envelope_modulus(lam, tau), 0.0};
            };
            auto [env_val, env_err] =
                adaptive_quadrature(env, cutoff, t1, 1e-6 * benchmark_integral(m), 64);
            out.tail_bound = env_val.real() + env_err + remainder;
        }
    }
    return out;
}

TamenessReport classify_tameness(const Vector& lambdas, int m) {
    if (m < 1) throw std::invalid_argument("classify_tameness: m must be >= 1");
    TamenessReport rep;
    for (Index j = 0; j < lambdas.size(); ++j) {
        const double l = lambdas[j];
        rep.s3 += l * l * l;
        rep.s4 += l * l * l * l;
    }
    const double md = static_cast<double>(m);
    const double s3_limit = 1.0 / (25.0 * md * std::sqrt(md));
    const double s4_limit = 1.0 / (625.0 * md * md);
    if (rep.s4 > s4_limit) {
        rep.cls = TameClass::WildOmega2;
    } else if (std::abs(rep.s3) > s3_limit) {
        rep.cls = TameClass::WildOmega1;
    } else {
        rep.cls = TameClass::Tame;
    }
    return rep;
}

TameThresholds scaled_tame_thresholds(double b_op, int m) {
    if (m < 1 || b_op < 0) throw std::invalid_argument("scaled_tame_thresholds: bad arguments");
    const double md = static_cast<double>(m);
    TameThresholds th;
    // Markov at exceedance 3/40 against E (sum lambda^3)^2 <= 120 b_op / ((m+2)(m+4))
    th.s3 = std::sqrt(120.0 * b_op / ((md + 2.0) * (md + 4.0)) * 40.0 / 3.0);
    // Markov at exceedance 3/1600 against E sum lambda^4 <= 3 b_op / (m+2)
    th.s4 = 3.0 * b_op / (md + 2.0) * 1600.0 / 3.0;
    return th;
}

Vector half_form_alpha(const OrthoBasis& basis) {
    Vector alpha(basis.m());
    for (int i = 0; i < basis.m(); ++i) {
        alpha[i] = 0.5 * basis.mats[static_cast<std::size_t>(i)].trace();
    }
    return alpha;
}

IntegralEstimate attest_solvable(const OrthoBasis& basis, const Vector& alpha,
                                 const VerifyOptions& opts) {
    if (alpha.size() != basis.m()) {
        throw std::invalid_argument("attest_solvable: alpha length does not match basis");
    }
    return run_sphere_estimate(basis, alpha, opts);
}

IntegralEstimate attest_nontrivial_zero(const OrthoBasis& basis, const VerifyOptions& opts) {
    for (int i = 0; i < basis.m(); ++i) {
        if (std::abs(basis.mats[static_cast<std::size_t>(i)].trace()) > 1e-8) {
            std::ostringstream os;
            os << "attest_nontrivial_zero: basis matrix " << i << " has nonzero trace";
            throw std::invalid_argument(os.str());
        }
    }
    if (basis.m() >= basis.dim()) {
        throw std::invalid_argument("attest_nontrivial_zero: requires m < n");
    }
    return run_sphere_estimate(basis, Vector::Zero(basis.m()), opts);
}

namespace {

// 16-point Gauss-Legendre half-abscissae and weights.
constexpr int kGlHalf = 8;
constexpr double kGlX[kGlHalf] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                  0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                  0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[kGlHalf] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                  0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                  0.0622535239386479, 0.0271524594117541};

std::vector<std::pair<double, double>> gl_nodes(double lo, double hi, int panels) {
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(panels) * 2 * kGlHalf);
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = lo + (p + 0.5) * width;
        const double h = 0.5 * width;
        for (int j = 0; j < kGlHalf; ++j) {
            out.emplace_back(c - h * kGlX[j], h * kGlW[j]);
            out.emplace_back(c + h * kGlX[j], h * kGlW[j]);
        }
    }
    return out;
}

template <typename F>
Complex tensor_quad(const F& f, int dim, double lo, double hi, int panels) {
    const auto nodes = gl_nodes(lo, hi, panels);
    Complex total{0.0, 0.0};
    if (dim == 1) {
        for (const auto& [x, w] : nodes) total += w * f(Vector::Constant(1, x));
        return total;
    }
    Vector point(2);
    for (const auto& [x, wx] : nodes) {
        Complex row{0.0, 0.0};
        for (const auto& [y, wy] : nodes) {
            point[0] = x;
            point[1] = y;
            row += wy * f(point);
        }
        total += wx * row;
    }
    return total;
}

template <typename F>
Complex tensor_quad_converged(const F& f, int dim, double lo, double hi, double tol) {
    Complex prev = tensor_quad(f, dim, lo, hi, 48);
    for (int panels = 96; panels <= 384; panels *= 2) {
        const Complex cur = tensor_quad(f, dim, lo, hi, panels);
        if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw std::runtime_error("tensor quadrature did not converge");
}

}  // namespace

DualQuadratureResult gaussian_identity_check(const std::vector<SymMatrix>& qs,
                                             const Vector& alpha, double sigma) {
    if (qs.empty()) throw std::invalid_argument("gaussian_identity_check: empty system");
    if (sigma <= 0) throw std::invalid_argument("gaussian_identity_check: sigma must be > 0");
    const Index n = qs.front().dim();
    const auto m = static_cast<Index>(qs.size());
    if (n > 2 || m > 2) {
        throw std::invalid_argument("gaussian_identity_check: limited to n <= 2, m <= 2");
    }
    if (alpha.size() != m) {
        throw std::invalid_argument("gaussian_identity_check: alpha length mismatch");
    }

    // left side: smoothed residual integral against the Gaussian on R^n,
    // with half-form values q_i(x) = 1/2 <Q_i x, x>
    const double gauss_norm = std::pow(2.0 * M_PI, -0.5 * static_cast<double>(n));
    const auto lhs_f = [&](const Vector& x) {
        double s = 0.0;
        for (Index i = 0; i < m; ++i) {
            const double d = 0.5 * quad_form(qs[static_cast<std::size_t>(i)], x) - alpha[i];
            s += d * d;
        }
        const double expo = -0.5 * sigma * sigma * s - 0.5 * x.squaredNorm();
        return Complex{gauss_norm * std::exp(expo), 0.0};
    };
    const double lhs =
        tensor_quad_converged(lhs_f, static_cast<int>(n), -12.0, 12.0, 1e-10).real();

    // right side: damped determinant integral over R^m
    const double rhs_norm =
        std::pow(sigma, -static_cast<double>(m)) * std::pow(2.0 * M_PI, -0.5 * static_cast<double>(m));
    // det(I - i C) in closed form; for n <= 2 the factor arguments stay in
    // (-pi/2, pi/2), so the principal log of the determinant matches the
    // continuous branch anchored at 1.
    const auto log_det = [n](const Matrix& combo) {
        if (n == 1) return std::log(Complex{1.0, -combo(0, 0)});
        const Complex d = Complex{1.0, -combo(0, 0)} * Complex{1.0, -combo(1, 1)} +
                          Complex{combo(0, 1) * combo(0, 1), 0.0};
        return std::log(d);
    };
    const auto rhs_f = [&](const Vector& t) {
        Matrix combo = Matrix::Zero(n, n);
        for (Index i = 0; i < m; ++i) combo += t[i] * qs[static_cast<std::size_t>(i)].mat();
        const double phase = -alpha.dot(t);
        const double damp = -0.5 * t.squaredNorm() / (sigma * sigma);
        return std::exp(-0.5 * log_det(combo) + Complex{damp, phase});
    };
    const double lt = 12.0 * sigma;
    const Complex rhs =
        rhs_norm * tensor_quad_converged(rhs_f, static_cast<int>(m), -lt, lt, 1e-10);

    DualQuadratureResult out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.gap = std::abs(Complex{lhs, 0.0} - rhs);
    return out;
}

}  // namespace quadcert::fourier

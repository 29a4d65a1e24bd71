#include "quadcert/ensembles.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "quadcert/basis.hpp"
#include "quadcert/fourier.hpp"
#include "quadcert/parallel.hpp"
#include "quadcert/relaxation.hpp"
#include "quadcert/rng.hpp"

namespace quadcert::ensembles {

namespace {

Matrix goe_matrix(Rng& rng, Index n) {
    Matrix g(n, n);
    for (Index i = 0; i < n; ++i) {
        g(i, i) = std::sqrt(2.0) * rng.gaussian();
        for (Index j = i + 1; j < n; ++j) {
            const double v = rng.gaussian();
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

SymMatrix traceless(Matrix g) {
    const Index n = g.rows();
    g.diagonal().array() -= g.trace() / static_cast<double>(n);
    // second pass removes the rounding residue of the first
    g.diagonal().array() -= g.trace() / static_cast<double>(n);
    return SymMatrix(std::move(g));
}

}  // namespace

SampleSet sample(const EnsembleSpec& spec) {
    if (spec.n < 1 || spec.m < 1) throw std::invalid_argument("sample: need n >= 1 and m >= 1");
    Rng rng(spec.seed);
    SampleSet out;
    out.qs.reserve(static_cast<std::size_t>(spec.m));

    switch (spec.kind) {
        case EnsembleKind::Goe:
            for (int i = 0; i < spec.m; ++i) out.qs.emplace_back(goe_matrix(rng, spec.n));
            break;
        case EnsembleKind::TracelessGoe:
            for (int i = 0; i < spec.m; ++i) out.qs.push_back(traceless(goe_matrix(rng, spec.n)));
            break;
        case EnsembleKind::PlantedSolvable: {
            for (int i = 0; i < spec.m; ++i) out.qs.emplace_back(goe_matrix(rng, spec.n));
            Vector x0 = rng.gaussian_vector(spec.n);
            Vector alpha(spec.m);
            for (int i = 0; i < spec.m; ++i) {
                alpha[i] = quad_form(out.qs[static_cast<std::size_t>(i)], x0);
            }
            out.planted_x = std::move(x0);
            out.alpha = std::move(alpha);
            break;
        }
        case EnsembleKind::Blocked: {
            if (spec.block < 1) throw std::invalid_argument("sample: block size must be >= 1");
            if (spec.m * spec.block > spec.n) {
                throw std::invalid_argument("sample: m * block exceeds n for Blocked kind");
            }
            for (int i = 0; i < spec.m; ++i) {
                Matrix blockmat(spec.block, spec.block);
                for (Index a = 0; a < spec.block; ++a) {
                    blockmat(a, a) = rng.gaussian();
                    for (Index b = a + 1; b < spec.block; ++b) {
                        const double v = rng.gaussian();
                        blockmat(a, b) = v;
                        blockmat(b, a) = v;
                    }
                }
                blockmat /= blockmat.norm();
                Matrix full = Matrix::Zero(spec.n, spec.n);
                full.block(i * spec.block, i * spec.block, spec.block, spec.block) = blockmat;
                out.qs.emplace_back(std::move(full));
            }
            break;
        }
    }
    return out;
}

std::vector<ScalingRow> scaling_experiment(const std::vector<Index>& n_list,
                                           const std::vector<int>& m_list, int trials,
                                           std::uint64_t seed, int threads) {
    if (trials < 1) throw std::invalid_argument("scaling_experiment: trials must be >= 1");
    std::vector<ScalingRow> rows;
    for (Index n : n_list) {
        for (int m : m_list) {
            for (int t = 0; t < trials; ++t) {
                rows.push_back(ScalingRow{n, m, t, 0.0, 0.0});
            }
        }
    }
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        ScalingRow& row = rows[i];
        EnsembleSpec spec{EnsembleKind::Goe, row.n, row.m, derive_seed(seed, i)};
        const OrthoBasis basis = orthonormalize(sample(spec).qs);
        row.norm_b_op = operator_norm(basis.b);
        const double heuristic = 4.0 * row.m / static_cast<double>(row.n);
        row.ratio_to_heuristic = row.norm_b_op / heuristic;
    });
    return rows;
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
    os << "n,m,trial,norm_B_op,ratio_to_4m_over_n\r\n";
    char buf[64];
    for (const auto& r : rows) {
        os << r.n << "," << r.m << "," << r.trial;
        std::snprintf(buf, sizeof buf, ",%.17g", r.norm_b_op);
        os << buf;
        std::snprintf(buf, sizeof buf, ",%.17g", r.ratio_to_heuristic);
        os << buf << "\r\n";
    }
}

SliceOutcome affine_slice_experiment(Index n, int codim, int trials, const SliceOptions& opts) {
    if (n < 1 || codim < 1) throw std::invalid_argument("affine_slice_experiment: bad size");
    if (static_cast<long>(codim) > static_cast<long>(n) * (n + 1) / 2) {
        throw std::invalid_argument("affine_slice_experiment: codim exceeds dim of matrix space");
    }
    if (trials < 1) throw std::invalid_argument("affine_slice_experiment: trials must be >= 1");

    std::vector<int> feasible(static_cast<std::size_t>(trials), 0);
    std::vector<int> certified(static_cast<std::size_t>(trials), 0);
    std::vector<int> solved(static_cast<std::size_t>(trials), 0);

    parallel_for(static_cast<std::size_t>(trials), opts.threads, [&](std::size_t t) {
        EnsembleSpec spec{EnsembleKind::Goe, n, codim, derive_seed(opts.seed, t)};
        const SampleSet set = sample(spec);
        Vector alpha(codim);
        for (int i = 0; i < codim; ++i) alpha[i] = set.qs[static_cast<std::size_t>(i)].trace();

        try {
            const auto res = relax::solve_feasibility(set.qs, alpha);
            feasible[t] = res.status == relax::FeasStatus::Feasible ? 1 : 0;
        } catch (const relax::IndeterminateError&) {
            feasible[t] = 0;
        }
        const auto cert = certify_inhomogeneous(set.qs, opts.eta);
        certified[t] = cert.decision == Decision::CertifiedSolvable ? 1 : 0;

        oracle::OracleOptions oopts = opts.oracle;
        oopts.seed = derive_seed(opts.seed, t + 1000003);
        const auto wit = oracle::solve(set.qs, alpha, oopts);
        solved[t] = wit.solved ? 1 : 0;
    });

    SliceOutcome out;
    out.trials = trials;
    for (int t = 0; t < trials; ++t) {
        out.feasible_count += feasible[static_cast<std::size_t>(t)];
        out.certified_count += certified[static_cast<std::size_t>(t)];
        out.solved_count += solved[static_cast<std::size_t>(t)];
    }
    out.frequency = static_cast<double>(out.solved_count) / trials;
    return out;
}

std::vector<MomentRow> haar_moment_experiment(int m, long samples, std::uint64_t seed) {
    if (m < 3) throw std::invalid_argument("haar_moment_experiment: m must be >= 3");
    if (samples < 2) throw std::invalid_argument("haar_moment_experiment: samples must be >= 2");
    const double md = m;

    std::vector<MomentRow> rows{
        {"w1sq_w2sq", 0, 1.0 / (md * (md + 2)), 0},
        {"w1_pow4", 0, 3.0 / (md * (md + 2)), 0},
        {"w1sq_w2sq_w3sq", 0, 1.0 / (md * (md + 2) * (md + 4)), 0},
        {"w1sq_w2_pow4", 0, 3.0 / (md * (md + 2) * (md + 4)), 0},
        {"w1_pow6", 0, 15.0 / (md * (md + 2) * (md + 4)), 0},
    };

    std::vector<double> sum(rows.size(), 0.0);
    std::vector<double> sumsq(rows.size(), 0.0);
    Rng rng(seed);
    for (long s = 0; s < samples; ++s) {
        const Vector w = rng.haar_sphere(m);
        const double a = w[0] * w[0];
        const double b = w[1] * w[1];
        const double c = w[2] * w[2];
        const double vals[5] = {a * b, a * a, a * b * c, a * b * b, a * a * a};
        for (std::size_t k = 0; k < rows.size(); ++k) {
            sum[k] += vals[k];
            sumsq[k] += vals[k] * vals[k];
        }
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double mean = sum[k] / samples;
        const double var = std::max(0.0, sumsq[k] / samples - mean * mean);
        rows[k].mean = mean;
        rows[k].stderr_ = std::sqrt(var / samples);
    }
    return rows;
}

TamenessOutcome tameness_experiment(Index n, int m, long samples, std::uint64_t seed,
                                    int threads) {
    if (samples < 1) throw std::invalid_argument("tameness_experiment: samples must be >= 1");
    EnsembleSpec spec{EnsembleKind::Goe, n, m, seed};
    const OrthoBasis basis = orthonormalize(sample(spec).qs);

    TamenessOutcome out;
    out.samples = samples;
    out.b_op = operator_norm(basis.b);
    const fourier::TameThresholds scaled = fourier::scaled_tame_thresholds(out.b_op, m);

    std::vector<std::uint8_t> fixed_cls(static_cast<std::size_t>(samples), 0);
    std::vector<std::uint8_t> scaled_ok(static_cast<std::size_t>(samples), 0);
    parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t s) {
        Rng rng(derive_seed(seed, s + 1));
        const Vector w = rng.haar_sphere(m);
        const Vector lam = eigendecompose(sphere_combination(basis, w)).eigenvalues;
        const fourier::TamenessReport rep = fourier::classify_tameness(lam, m);
        fixed_cls[s] = static_cast<std::uint8_t>(rep.cls);
        scaled_ok[s] = (std::abs(rep.s3) <= scaled.s3 && rep.s4 <= scaled.s4) ? 1 : 0;
    });
    for (long s = 0; s < samples; ++s) {
        switch (static_cast<fourier::TameClass>(fixed_cls[static_cast<std::size_t>(s)])) {
            case fourier::TameClass::Tame: ++out.tame; break;
            case fourier::TameClass::WildOmega1: ++out.wild_s3; break;
            case fourier::TameClass::WildOmega2: ++out.wild_s4; break;
        }
        out.scaled_tame += scaled_ok[static_cast<std::size_t>(s)];
    }
    return out;
}

}  // namespace quadcert::ensembles

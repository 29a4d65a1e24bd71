#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quadcert/basis.hpp"
#include "quadcert/certifier.hpp"
#include "quadcert/ensembles.hpp"
#include "quadcert/fourier.hpp"
#include "quadcert/instance.hpp"
#include "quadcert/oracle.hpp"
#include "quadcert/parallel.hpp"
#include "quadcert/relaxation.hpp"

namespace {

using nlohmann::json;
using namespace quadcert;

constexpr int kExitSolvable = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInfeasible = 3;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json certificate_json(const CertificateReport& rep) {
    return json{{"decision", rep.decision == Decision::CertifiedSolvable ? "certified-solvable"
                                                                         : "inconclusive"},
                {"norm_value", rep.norm_value},
                {"threshold", rep.threshold},
                {"eta", rep.eta},
                {"m_effective", rep.m_effective},
                {"homogeneous", rep.homogeneous},
                {"borderline", rep.borderline},
                {"notes", rep.notes}};
}

void print_certificate(const CertificateReport& rep) {
    std::cout << "certificate: "
              << (rep.decision == Decision::CertifiedSolvable ? "certified-solvable"
                                                              : "inconclusive")
              << "\n";
    std::cout << "  norm value  " << rep.norm_value << "\n";
    std::cout << "  threshold   " << rep.threshold << "  (eta " << rep.eta << " / m "
              << rep.m_effective << ")\n";
    for (const auto& note : rep.notes) std::cout << "  note: " << note << "\n";
}

// ---------------------------------------------------------------- certify

int run_certify(const std::string& path, double eta, bool as_json) {
    const Instance inst = load_instance(path);
    const auto qs = inst.full_matrices();

    CertificateReport rep =
        inst.homogeneous ? certify_homogeneous(qs, eta) : certify_inhomogeneous(qs, eta);

    if (!inst.homogeneous && inst.alpha) {
        double maxdiff = 0.0;
        const Vector alpha = inst.system_alpha();
        for (int i = 0; i < inst.m; ++i) {
            maxdiff = std::max(maxdiff,
                               std::abs(alpha[i] - qs[static_cast<std::size_t>(i)].trace()));
        }
        if (maxdiff > 1e-9 * (1.0 + std::abs(alpha.cwiseAbs().maxCoeff()))) {
            rep.notes.push_back(
                "explicit alpha differs from tr Q; the certificate concerns the "
                "trace-matched right-hand side (run pipeline for general alpha)");
        }
    }

    if (as_json) {
        json out{{"report_version", 1},
                 {"command", "certify"},
                 {"instance", path},
                 {"certificate", certificate_json(rep)}};
        std::cout << out.dump(2) << "\n";
    } else {
        print_certificate(rep);
    }
    return rep.decision == Decision::CertifiedSolvable ? kExitSolvable : kExitInconclusive;
}

// ---------------------------------------------------------------- pipeline

struct PipelineFlags {
    double eta = kDefaultEta;
    bool verify_integral = false;
    bool run_oracle = false;
    bool as_json = false;
    int samples = 2000;
    int starts = 50;
    int steps = 100;
    int threads = 1;
    std::uint64_t seed = 0;
};

void stage_line(bool as_json, const std::string& text) {
    if (!as_json) std::cout << text << "\n";
}

int run_pipeline(const std::string& path, const PipelineFlags& flags) {
    const Instance inst = load_instance(path);
    std::vector<SymMatrix> qs = inst.full_matrices();
    Vector alpha = inst.system_alpha();
    const bool homogeneous = inst.homogeneous;
    const int threads = resolve_threads(flags.threads);

    json stages = json::array();
    bool attested = false;
    bool infeasible = false;

    stage_line(flags.as_json, "seed: " + std::to_string(flags.seed));
    const OrthoBasis basis0 = orthonormalize(qs);

    // homogeneous systems always have the trivial zero, so the exact small-m
    // decision would be vacuous there; they go through the nontrivial path
    if (basis0.m() <= 2 && !homogeneous) {
        const auto decision = relax::exact_small_m(qs, alpha);
        const bool solvable = decision == relax::SmallMDecision::Solvable;
        stages.push_back({{"stage", "exact-small-m"},
                          {"m_effective", basis0.m()},
                          {"solvable", solvable}});
        stage_line(flags.as_json, std::string("[exact-small-m] span dimension ") +
                                      std::to_string(basis0.m()) +
                                      (solvable ? ": solvable" : ": unsolvable"));
        if (flags.as_json) {
            json out{{"report_version", 1}, {"command", "pipeline"},
                     {"instance", path},    {"seed", flags.seed},
                     {"eta", flags.eta},    {"stages", stages},
                     {"verdict", solvable ? "solvable" : "no-solution"}};
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << "verdict: " << (solvable ? "solvable" : "no-solution") << "\n";
        }
        return solvable ? kExitSolvable : kExitInfeasible;
    }

    // current working system; the homogeneous path may reduce it
    std::vector<SymMatrix> cur = qs;
    Vector cur_alpha = alpha;
    std::vector<SymMatrix> transformed;
    bool have_transform = false;

    for (int round = 0; round < 8; ++round) {
        const Index n_cur = cur.front().dim();

        // relaxation (homogeneous runs exclude the zero matrix by pinning tr X = n)
        std::vector<SymMatrix> relax_qs = cur;
        Vector relax_alpha = cur_alpha;
        if (homogeneous) {
            relax_qs.push_back(SymMatrix::Identity(n_cur));
            relax_alpha.conservativeResize(relax_alpha.size() + 1);
            relax_alpha[relax_alpha.size() - 1] = static_cast<double>(n_cur);
        }

        relax::RelaxationResult res;
        try {
            res = relax::solve_feasibility(relax_qs, relax_alpha);
        } catch (const relax::IndeterminateError& e) {
            stages.push_back(
                {{"stage", "relaxation"}, {"status", "indeterminate"}, {"gap", e.final_gap}});
            stage_line(flags.as_json,
                       std::string("[relaxation] indeterminate (gap ") + fmt(e.final_gap) + ")");
            break;
        }
        if (res.status == relax::FeasStatus::Infeasible) {
            stages.push_back(
                {{"stage", "relaxation"}, {"status", "infeasible"}, {"gap", res.gap},
                 {"notes", res.notes}});
            stage_line(flags.as_json, "[relaxation] infeasible: no solution");
            infeasible = true;
            break;
        }
        stages.push_back({{"stage", "relaxation"},
                          {"status", "feasible"},
                          {"rank", res.rank},
                          {"residual", res.residual},
                          {"entropy", res.entropy},
                          {"sweeps", res.sweeps}});
        stage_line(flags.as_json, std::string("[relaxation] feasible: rank=") +
                                      std::to_string(res.rank) + " residual=" + fmt(res.residual) +
                                      " entropy=" + fmt(res.entropy));

        const double entropy_before = res.entropy;
        res = relax::interiorize(res, relax_qs, relax_alpha, flags.steps);
        stages.push_back({{"stage", "interiorize"},
                          {"entropy_before", entropy_before},
                          {"entropy_after", res.entropy},
                          {"rank", res.rank},
                          {"steps_logged", res.ascent_entropies.size()}});
        stage_line(flags.as_json, std::string("[interiorize] entropy ") + fmt(entropy_before) +
                                      " -> " + fmt(res.entropy) + ", rank=" +
                                      std::to_string(res.rank));

        const relax::TransformedSystem ts = relax::factor_and_transform(res, cur);
        stages.push_back({{"stage", "transform"},
                          {"reduced_dim", ts.reduced_dim},
                          {"ambient_dim", n_cur},
                          {"equivalent", ts.equivalent}});
        stage_line(flags.as_json, std::string("[transform] r=") + std::to_string(ts.reduced_dim) +
                                      " of n=" + std::to_string(n_cur) +
                                      (ts.equivalent ? " (equivalent)" : " (face reduced)"));

        transformed = ts.qhat;
        have_transform = true;
        if (homogeneous && !ts.equivalent && ts.reduced_dim < n_cur && round + 1 < 8) {
            // not equivalent in the homogeneous case: recurse into the face
            stages.push_back({{"stage", "recurse"}, {"reduced_dim", ts.reduced_dim}});
            stage_line(flags.as_json, "[recurse] homogeneous system reduced; solving the face");
            cur = ts.qhat;
            for (auto& q : cur) {
                // keep the reduced forms exactly traceless
                const Index r = q.dim();
                q = q - SymMatrix::Identity(r) * (q.trace() / static_cast<double>(r));
            }
            cur_alpha = Vector::Zero(static_cast<Index>(cur.size()));
            continue;
        }
        break;
    }

    if (!infeasible && have_transform) {
        // operator-norm certificate on the trace-matched transformed system
        std::vector<SymMatrix> cert_input = transformed;
        if (homogeneous) {
            for (auto& q : cert_input) {
                const Index r = q.dim();
                q = q - SymMatrix::Identity(r) * (q.trace() / static_cast<double>(r));
            }
        }
        try {
            const CertificateReport cert = homogeneous
                                               ? certify_homogeneous(cert_input, flags.eta)
                                               : certify_inhomogeneous(cert_input, flags.eta);
            stages.push_back({{"stage", "certificate"}, {"report", certificate_json(cert)}});
            stage_line(flags.as_json,
                       std::string("[certificate] ") +
                           (cert.decision == Decision::CertifiedSolvable ? "certified-solvable"
                                                                         : "inconclusive") +
                           ": norm=" + fmt(cert.norm_value) + " threshold=" + fmt(cert.threshold));
            if (cert.decision == Decision::CertifiedSolvable) attested = true;
        } catch (const std::exception& e) {
            stages.push_back({{"stage", "certificate"}, {"error", e.what()}});
            stage_line(flags.as_json, std::string("[certificate] error: ") + e.what());
        }

        if (flags.verify_integral) {
            try {
                const OrthoBasis vb = orthonormalize(cert_input);
                fourier::VerifyOptions vopts;
                vopts.samples = flags.samples;
                vopts.seed = flags.seed;
                vopts.threads = threads;
                const fourier::IntegralEstimate est =
                    homogeneous ? fourier::attest_nontrivial_zero(vb, vopts)
                                : fourier::attest_solvable(vb, fourier::half_form_alpha(vb), vopts);
                stages.push_back({{"stage", "integral"},
                                  {"re", est.value.real()},
                                  {"im", est.value.imag()},
                                  {"quadrature_error", est.quadrature_error},
                                  {"tail_bound", est.tail_bound},
                                  {"mc_stderr", est.mc_stderr},
                                  {"samples", est.samples},
                                  {"positive_real", est.positive_real}});
                stage_line(flags.as_json,
                           std::string("[integral] Re=") + fmt(est.value.real()) +
                               " uncertainty=" + fmt(est.total_uncertainty()) +
                               (est.positive_real ? " => positive-real verdict" : " (no verdict)"));
                if (est.positive_real) attested = true;
            } catch (const std::exception& e) {
                stages.push_back({{"stage", "integral"}, {"error", e.what()}});
                stage_line(flags.as_json, std::string("[integral] error: ") + e.what());
            }
        }
    }

    if (!infeasible && flags.run_oracle) {
        oracle::OracleOptions oopts;
        oopts.starts = flags.starts;
        oopts.seed = flags.seed;
        const oracle::OracleResult wit = homogeneous ? oracle::solve_homogeneous(qs, oopts)
                                                     : oracle::solve(qs, alpha, oopts);
        stages.push_back({{"stage", "oracle"},
                          {"residual", wit.residual},
                          {"solved", wit.solved},
                          {"converged", wit.converged},
                          {"starts", wit.starts}});
        stage_line(flags.as_json, std::string("[oracle] residual=") + fmt(wit.residual) +
                                      (wit.solved ? " => witness found" : " (no witness)"));
        if (wit.solved) attested = true;
    }

    std::string verdict;
    int code;
    if (infeasible) {
        verdict = "no-solution";
        code = kExitInfeasible;
    } else if (attested) {
        verdict = "solvable";
        code = kExitSolvable;
    } else {
        verdict = "inconclusive";
        code = kExitInconclusive;
    }

    if (flags.as_json) {
        json out{{"report_version", 1}, {"command", "pipeline"}, {"instance", path},
                 {"seed", flags.seed},  {"eta", flags.eta},      {"stages", stages},
                 {"verdict", verdict}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "verdict: " << verdict << "\n";
    }
    return code;
}

// -------------------------------------------------------------- experiment

struct ExperimentFlags {
    std::vector<long> n_list;
    std::vector<int> m_list;
    int trials = 20;
    long samples = 100000;
    int codim = 1;
    double eta = kDefaultEta;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_path;
};

class CsvSink {
public:
    explicit CsvSink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw InstanceError("out", "cannot open " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    // summary lines must not corrupt CSV sent to stdout
    std::ostream& summary() { return file_.is_open() ? std::cout : std::cerr; }

private:
    std::ofstream file_;
};

int run_experiment(const std::string& kind, const ExperimentFlags& flags) {
    const int threads = resolve_threads(flags.threads);

    if (kind == "scaling") {
        std::vector<Index> ns(flags.n_list.begin(), flags.n_list.end());
        if (ns.empty()) ns = {400};
        std::vector<int> ms = flags.m_list.empty() ? std::vector<int>{5} : flags.m_list;
        const auto rows = ensembles::scaling_experiment(ns, ms, flags.trials, flags.seed, threads);
        CsvSink sink(flags.out_path);
        ensembles::write_scaling_csv(sink.stream(), rows);
        for (Index n : ns) {
            for (int m : ms) {
                double sum = 0.0, sumsq = 0.0;
                int count = 0;
                for (const auto& r : rows) {
                    if (r.n == n && r.m == m) {
                        sum += r.norm_b_op;
                        sumsq += r.norm_b_op * r.norm_b_op;
                        ++count;
                    }
                }
                const double mean = sum / count;
                const double spread =
                    count > 1 ? std::sqrt(std::max(0.0, sumsq / count - mean * mean)) : 0.0;
                sink.summary() << "scaling n=" << n << " m=" << m << ": mean ||B||_op = "
                               << fmt(mean) << " spread " << fmt(spread)
                               << " (4m/n = " << fmt(4.0 * m / n) << ", trials " << count
                               << ", seed " << flags.seed << ")\n";
            }
        }
        return 0;
    }

    if (kind == "slice") {
        if (flags.n_list.size() != 1) throw InstanceError("n", "slice needs exactly one --n");
        const Index n = flags.n_list.front();
        ensembles::SliceOptions sopts;
        sopts.eta = flags.eta;
        sopts.seed = flags.seed;
        sopts.threads = threads;
        const auto out = ensembles::affine_slice_experiment(n, flags.codim, flags.trials, sopts);
        CsvSink sink(flags.out_path);
        sink.stream() << "n,codim,trials,feasible,certified,solved,frequency\r\n"
                      << n << "," << flags.codim << "," << out.trials << "," << out.feasible_count
                      << "," << out.certified_count << "," << out.solved_count << ","
                      << fmt(out.frequency) << "\r\n";
        sink.summary() << "slice n=" << n << " codim=" << flags.codim << ": frequency "
                       << fmt(out.frequency) << " (" << out.solved_count << "/" << out.trials
                       << " solved, seed " << flags.seed << ")\n";
        return 0;
    }

    if (kind == "moments") {
        if (flags.m_list.size() != 1) throw InstanceError("m", "moments needs exactly one --m");
        const int m = flags.m_list.front();
        const auto rows = ensembles::haar_moment_experiment(m, flags.samples, flags.seed);
        CsvSink sink(flags.out_path);
        sink.stream() << "m,samples,moment,mean,expected,stderr\r\n";
        double worst = 0.0;
        for (const auto& r : rows) {
            sink.stream() << m << "," << flags.samples << "," << r.name << "," << fmt(r.mean)
                          << "," << fmt(r.expected) << "," << fmt(r.stderr_) << "\r\n";
            if (r.stderr_ > 0) {
                worst = std::max(worst, std::abs(r.mean - r.expected) / r.stderr_);
            }
        }
        sink.summary() << "moments m=" << m << ": worst deviation " << fmt(worst)
                       << " standard errors over " << flags.samples << " samples (seed "
                       << flags.seed << ")\n";
        return 0;
    }

    if (kind == "tameness") {
        if (flags.n_list.size() != 1 || flags.m_list.size() != 1) {
            throw InstanceError("n", "tameness needs exactly one --n and one --m");
        }
        const Index n = flags.n_list.front();
        const int m = flags.m_list.front();
        const auto out = ensembles::tameness_experiment(n, m, flags.samples, flags.seed, threads);
        CsvSink sink(flags.out_path);
        const double total = static_cast<double>(out.samples);
        sink.stream() << "n,m,samples,norm_B_op,tame,wild_s3,wild_s4,frac_tame,frac_wild_s3,"
                         "frac_wild_s4,scaled_tame,scaled_frac\r\n"
                      << n << "," << m << "," << out.samples << "," << fmt(out.b_op) << ","
                      << out.tame << "," << out.wild_s3 << "," << out.wild_s4 << ","
                      << fmt(out.tame / total) << "," << fmt(out.wild_s3 / total) << ","
                      << fmt(out.wild_s4 / total) << "," << out.scaled_tame << ","
                      << fmt(out.scaled_tame / total) << "\r\n";
        sink.summary() << "tameness n=" << n << " m=" << m << ": tame " << out.tame << "/"
                       << out.samples << ", scaled-threshold tame " << out.scaled_tame << "/"
                       << out.samples << " (seed " << flags.seed << ")\n";
        return 0;
    }

    std::cerr << "unknown experiment kind: " << kind
              << " (expected scaling, slice, moments, or tameness)\n";
    return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadcert: solvability certificates for systems of real quadratic equations"};
    app.require_subcommand(1);

    std::string path;
    double eta = kDefaultEta;
    bool as_json = false;

    auto* certify = app.add_subcommand(
        "certify", "Operator-norm certificate for a trace-matched system");
    certify->add_option("path", path, "instance file (JSON)")->required();
    certify->add_option("--eta", eta, "certificate constant (default 1e-6)");
    certify->add_flag("--json", as_json, "machine-readable report");

    PipelineFlags pf;
    auto* pipeline = app.add_subcommand(
        "pipeline", "Relax, interiorize, transform, certify; optional integral and oracle");
    pipeline->add_option("path", path, "instance file (JSON)")->required();
    pipeline->add_option("--eta", pf.eta, "certificate constant (default 1e-6)");
    pipeline->add_flag("--verify-integral", pf.verify_integral,
                       "run the determinant-integral attestation");
    pipeline->add_flag("--oracle", pf.run_oracle, "run the multistart witness search");
    pipeline->add_flag("--json", pf.as_json, "machine-readable report");
    pipeline->add_option("--samples", pf.samples, "sphere samples for the integral (default 2000)");
    pipeline->add_option("--starts", pf.starts, "oracle multistarts (default 50)");
    pipeline->add_option("--steps", pf.steps, "entropy ascent steps (default 100)");
    pipeline->add_option("--seed", pf.seed, "random seed");
    pipeline->add_option("--threads", pf.threads, "worker threads (QUADCERT_THREADS overrides)");

    ExperimentFlags ef;
    std::string kind;
    auto* experiment =
        app.add_subcommand("experiment", "Random-ensemble studies (CSV output)");
    experiment->add_option("kind", kind, "scaling | slice | moments | tameness")->required();
    experiment->add_option("--n", ef.n_list, "matrix dimension(s)");
    experiment->add_option("--m", ef.m_list, "equation count(s)");
    experiment->add_option("--trials", ef.trials, "trials per configuration (default 20)");
    experiment->add_option("--samples", ef.samples, "sphere samples (default 100000)");
    experiment->add_option("--codim", ef.codim, "slice codimension (default 1)");
    experiment->add_option("--eta", ef.eta, "certificate constant for slice runs");
    experiment->add_option("--seed", ef.seed, "random seed");
    experiment->add_option("--threads", ef.threads, "worker threads (QUADCERT_THREADS overrides)");
    experiment->add_option("--out", ef.out_path, "CSV output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInputError;
    }

    try {
        if (*certify) return run_certify(path, eta, as_json);
        if (*pipeline) return run_pipeline(path, pf);
        if (*experiment) return run_experiment(kind, ef);
    } catch (const InstanceError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "quadcert/certifier.hpp"
#include "quadcert/oracle.hpp"
#include "quadcert/sym_matrix.hpp"

namespace quadcert::ensembles {

enum class EnsembleKind { Goe, TracelessGoe, PlantedSolvable, Blocked };

/// Gaussian Orthogonal Ensemble convention: independent entries up to
/// symmetry, off-diagonal variance 1, diagonal variance 2 (unscaled).
struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Goe;
    Index n = 0;
    int m = 0;
    std::uint64_t seed = 0;
    Index block = 2;  // Blocked only: size of each disjoint diagonal block
};

struct SampleSet {
    std::vector<SymMatrix> qs;
    std::optional<Vector> planted_x;  // PlantedSolvable: the hidden witness
    std::optional<Vector> alpha;      // PlantedSolvable: alpha_i = q_i(x0)
};

SampleSet sample(const EnsembleSpec& spec);

struct ScalingRow {
    Index n = 0;
    int m = 0;
    int trial = 0;
    double norm_b_op = 0.0;
    double ratio_to_heuristic = 0.0;  // norm_b_op / (4m/n)
};

/// For each (n, m) pair and trial: orthonormalize m GOE samples and record
/// the operator norm of the basis invariant B, plus its ratio to the 4m/n
/// heuristic. Trials use seeds derived as seed + running row index.
std::vector<ScalingRow> scaling_experiment(const std::vector<Index>& n_list,
                                           const std::vector<int>& m_list, int trials,
                                           std::uint64_t seed, int threads = 1);

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows);

struct SliceOptions {
    double eta = kDefaultEta;
    std::uint64_t seed = 0;
    int threads = 1;
    oracle::OracleOptions oracle;
};

struct SliceOutcome {
    int trials = 0;
    int feasible_count = 0;   // relaxation feasible
    int certified_count = 0;  // operator-norm certificate fired
    int solved_count = 0;     // oracle found a witness
    double frequency = 0.0;   // solved_count / trials
};

/// Random affine slices through the identity of a given codimension:
/// constraints tr(Q_i X) = tr Q_i with GOE directions. Each trial runs the
/// relax -> certify -> oracle pipeline; frequency reports how often the
/// oracle exhibits a rank-one point, i.e. the quadratic system is solvable.
SliceOutcome affine_slice_experiment(Index n, int codim, int trials,
                                     const SliceOptions& opts = {});

struct MomentRow {
    std::string name;
    double mean = 0.0;
    double expected = 0.0;
    double stderr_ = 0.0;
};

/// Sample means of the five even quartic/sextic coordinate moments of a
/// Haar point on the sphere S^{m-1}, against their closed forms. m >= 3.
std::vector<MomentRow> haar_moment_experiment(int m, long samples, std::uint64_t seed);

struct TamenessOutcome {
    long samples = 0;
    long tame = 0;       // fixed thresholds
    long wild_s3 = 0;
    long wild_s4 = 0;
    long scaled_tame = 0;  // thresholds scaled to eta = m * ||B||_op
    double b_op = 0.0;
};

/// Classifies Haar samples of A(w) over a GOE-derived basis, with both the
/// fixed thresholds and the Markov-scaled ones.
TamenessOutcome tameness_experiment(Index n, int m, long samples, std::uint64_t seed,
                                    int threads = 1);

}  // namespace quadcert::ensembles

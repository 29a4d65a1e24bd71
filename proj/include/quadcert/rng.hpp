#pragma once

#include <cstdint>
#include <random>

#include "quadcert/sym_matrix.hpp"

namespace quadcert {

/// Seedable random source for all stochastic code paths. Identical seed
/// gives an identical stream; independent work items (trials, sphere
/// samples) use seeds derived as seed + item index.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double gaussian() { return normal_(gen_); }
    double uniform() { return uniform_(gen_); }

    Vector gaussian_vector(Index k) {
        Vector v(k);
        for (Index i = 0; i < k; ++i) v[i] = gaussian();
        return v;
    }

    /// Haar-uniform point on the unit sphere in R^m (normalized Gaussian).
    Vector haar_sphere(Index m) {
        while (true) {
            Vector v = gaussian_vector(m);
            const double n = v.norm();
            if (n > 1e-300) return v / n;
        }
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed + index;
}

}  // namespace quadcert

// SPDX-License-Identifier: Apache-2.0

#ifndef GAMSIM_RANDOM_HPP
#define GAMSIM_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gamsim {

/// splitmix64 step, used for seed derivation only (never as the main stream).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives the seed of substream `index` from a master seed.
///
/// The scheme is a fixed counter hash: every (channel realization, SNR point,
/// frame) gets an independent stream so parallel schedules reproduce the
/// sequential results bit for bit.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x2545F4914F6CDD1DULL));
}

/// Deterministic random stream: mt19937_64 uniforms plus an explicit
/// Box-Muller map, so sequences do not depend on the standard library's
/// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::int64_t uniform_index(std::int64_t n) {
        const auto idx = static_cast<std::int64_t>(uniform() * static_cast<double>(n));
        return idx < n ? idx : n - 1;
    }

    double gauss() {
        // N(0,1) from two uniforms; sqrt(-2 ln u) e^{j2pi v} has N(0,1) parts.
        const double u = uniform();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log1p(-u)) * std::cos(2.0 * M_PI * v);
    }

    /// Standard circularly-symmetric complex Gaussian CN(0,1):
    /// real and imaginary parts each N(0, 1/2).
    std::complex<double> cgauss() {
        const double u = uniform();
        const double v = uniform();
        const double r = std::sqrt(-std::log1p(-u));  // |z|^2 ~ Exp(1)
        return {r * std::cos(2.0 * M_PI * v), r * std::sin(2.0 * M_PI * v)};
    }

    Eigen::VectorXcd cgauss_vector(Eigen::Index n) {
        Eigen::VectorXcd w(n);
        for (Eigen::Index i = 0; i < n; ++i) w(i) = cgauss();
        return w;
    }

    Eigen::MatrixXcd cgauss_matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXcd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cgauss();
        return m;
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace gamsim

#endif  // GAMSIM_RANDOM_HPP

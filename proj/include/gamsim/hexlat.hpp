// SPDX-License-Identifier: Apache-2.0

#ifndef GAMSIM_HEXLAT_HPP
#define GAMSIM_HEXLAT_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace gamsim {

/// Reachable moduli of c1 e^{j t1} + c2 e^{j t2}: the closed annulus
/// [ ||c1|-|c2||, |c1|+|c2| ].
struct Annulus {
    double r_in = 0.0;
    double r_out = 0.0;
    std::complex<double> c1{0.0, 0.0};
    std::complex<double> c2{0.0, 0.0};
};

/// One lattice constellation point, with its integer coordinates kept for
/// dumps and exact bookkeeping: value = eta * (z1 + z2 e^{j pi/3}).
struct LatticePoint {
    long long k = 0;   ///< squared lattice norm z1^2 + z1 z2 + z2^2
    long long z1 = 0;
    long long z2 = 0;
    std::complex<double> value{0.0, 0.0};
};

/// Hexagonal-lattice points inside a closed annulus, scaled by eta.
/// Points are sorted by (|s|^2, angle) so enumeration order is reproducible.
struct AnnularConstellation {
    Annulus annulus;
    double eta = 1.0;
    std::vector<LatticePoint> points;
    double med = 0.0;  ///< minimum pairwise distance; +inf with fewer than 2 points
};

/// Uniform phase constellation of a given radius.
struct PskConstellation {
    double radius = 1.0;
    int order = 2;
    std::vector<std::complex<double>> points;
    bool med_deficient = false;  ///< set when even order 2 misses the MED target

    double med() const;  ///< 2 radius sin(pi / order)
};

/// Two phases in [0, 2pi) reproducing a constellation point through a
/// coefficient pair.
struct PhasePair {
    double theta1 = 0.0;
    double theta2 = 0.0;
};

/// Minimum of |sum_i eps_i |p_i|| over sign choices eps_i in {-1, +1},
/// by exhaustive search (global sign symmetry halves the space).
/// Sizes above 30 are rejected.
double signed_min_magnitude(std::span<const std::complex<double>> p);

/// Sum of the moduli, the outer reach of the same combination.
double signed_max_magnitude(std::span<const std::complex<double>> p);

Annulus annulus_from_pair(std::complex<double> c1, std::complex<double> c2);

/// Number of hexagonal lattice points with squared norm k (theta-series
/// coefficient), via the multiplicative character formula.
long long hex_count(long long k);

/// Brute-force count of integer solutions of z1^2 + z1 z2 + z2^2 = k.
/// Test oracle only; quadratic in the bounding box.
long long hex_count_oracle(long long k);

/// Enumerates all scaled lattice points inside the closed annulus by solving
/// the norm equation for each feasible squared norm k.
AnnularConstellation enumerate_annulus(const Annulus& annulus, double eta);

/// Splits a point of the annulus into the canonical two-phase drive:
/// c1 e^{j theta1} + c2 e^{j theta2} = s, nonnegative law-of-cosines branch.
PhasePair decompose_point(std::complex<double> s, std::complex<double> c1,
                          std::complex<double> c2);

/// Largest order M >= 2 whose MED 2 radius sin(pi/M) still meets target_med;
/// falls back to a flagged order-2 constellation when even that misses it.
PskConstellation build_psk(double radius, double target_med);

/// Largest lattice scale eta whose annular constellation holds at least
/// target_points points (bisection to 1e-9 bracketing).
double scale_for_cardinality(const Annulus& annulus, long long target_points);

}  // namespace gamsim

#endif  // GAMSIM_HEXLAT_HPP

// SPDX-License-Identifier: Apache-2.0

#include "gamsim/hexlat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace gamsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::complex<double> hex_basis_point(long long z1, long long z2) {
    // z1 + z2 e^{j pi/3} = (z1 + z2/2) + j (z2 sqrt(3)/2)
    return {static_cast<double>(z1) + 0.5 * static_cast<double>(z2),
            0.8660254037844386467637 * static_cast<double>(z2)};
}

double wrap_2pi(double theta) {
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t = 0.0;  // fmod can land exactly on 2pi after the add
    return t;
}

/// k-range bound with the exact-boundary epsilon: values that sit on a lattice
/// shell up to rounding are kept inside the range.
long long ceil_with_eps(double x) {
    const double eps = 1e-12 * std::max(1.0, std::abs(x));
    return static_cast<long long>(std::ceil(x - eps));
}

long long floor_with_eps(double x) {
    const double eps = 1e-12 * std::max(1.0, std::abs(x));
    return static_cast<long long>(std::floor(x + eps));
}

struct PairHash {
    std::size_t operator()(const std::pair<long long, long long>& p) const {
        return std::hash<long long>()(p.first * 1000003LL + p.second);
    }
};

}  // namespace

double PskConstellation::med() const { return 2.0 * radius * std::sin(kPi / order); }

double signed_min_magnitude(std::span<const std::complex<double>> p) {
    const std::size_t m = p.size();
    if (m < 1) throw std::invalid_argument("signed_min_magnitude: empty vector");
    if (m > 30) throw std::invalid_argument("signed_min_magnitude: more than 30 terms");

    std::vector<double> mags(m);
    for (std::size_t i = 0; i < m; ++i) mags[i] = std::abs(p[i]);

    // Fix the first sign to +1; |sum| is invariant under global negation.
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t patterns = 1ULL << (m - 1);
    for (std::uint64_t bits = 0; bits < patterns; ++bits) {
        double sum = mags[0];
        for (std::size_t i = 1; i < m; ++i)
            sum += (bits >> (i - 1)) & 1ULL ? -mags[i] : mags[i];
        best = std::min(best, std::abs(sum));
    }
    return best;
}

double signed_max_magnitude(std::span<const std::complex<double>> p) {
    double sum = 0.0;
    for (const auto& v : p) sum += std::abs(v);
    return sum;
}

Annulus annulus_from_pair(std::complex<double> c1, std::complex<double> c2) {
    if (c1 == std::complex<double>(0.0, 0.0) && c2 == std::complex<double>(0.0, 0.0))
        throw std::invalid_argument("annulus_from_pair: both coefficients are zero");
    Annulus a;
    a.c1 = c1;
    a.c2 = c2;
    a.r_in = std::abs(std::abs(c1) - std::abs(c2));
    a.r_out = std::abs(c1) + std::abs(c2);
    return a;
}

long long hex_count(long long k) {
    if (k < 0) throw std::invalid_argument("hex_count: negative k");
    if (k == 0) return 1;

    long long count = 6;
    long long rest = k;
    for (long long p = 2; p * p <= rest; ++p) {
        if (rest % p != 0) continue;
        int nu = 0;
        while (rest % p == 0) {
            rest /= p;
            ++nu;
        }
        if (p == 3) continue;       // chi factor 1
        if (p % 3 == 1) count *= (nu + 1);
        else if (nu % 2 == 1) return 0;  // p = 2 (mod 3), odd multiplicity
        // even multiplicity contributes factor 1
    }
    if (rest > 1) {
        // leftover prime factor with multiplicity 1
        if (rest % 3 == 1) count *= 2;
        else if (rest % 3 == 2) return 0;
    }
    return count;
}

long long hex_count_oracle(long long k) {
    if (k < 0) throw std::invalid_argument("hex_count_oracle: negative k");
    const long long bound = static_cast<long long>(std::ceil(2.0 * std::sqrt(static_cast<double>(k) / 3.0))) + 1;
    long long count = 0;
    for (long long z1 = -bound; z1 <= bound; ++z1)
        for (long long z2 = -bound; z2 <= bound; ++z2)
            if (z1 * z1 + z1 * z2 + z2 * z2 == k) ++count;
    return count;
}

AnnularConstellation enumerate_annulus(const Annulus& annulus, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("enumerate_annulus: eta must be positive");
    AnnularConstellation cst;
    cst.annulus = annulus;
    cst.eta = eta;

    const double t_in = (annulus.r_in / eta) * (annulus.r_in / eta);
    const double t_out = (annulus.r_out / eta) * (annulus.r_out / eta);
    const long long k_lo = std::max<long long>(0, ceil_with_eps(t_in));
    const long long k_hi = floor_with_eps(t_out);

    for (long long k = k_lo; k <= k_hi; ++k) {
        if (hex_count(k) == 0) continue;
        if (k == 0) {
            cst.points.push_back({0, 0, 0, {0.0, 0.0}});
            continue;
        }
        const long long z1_max =
            static_cast<long long>(std::ceil(2.0 * std::sqrt(static_cast<double>(k) / 3.0)));
        for (long long z1 = -z1_max; z1 <= z1_max; ++z1) {
            // z2^2 + z1 z2 + (z1^2 - k) = 0
            const long long disc = 4 * k - 3 * z1 * z1;
            if (disc < 0) continue;
            const long long root = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(disc))));
            long long isqrt = root;
            while (isqrt * isqrt > disc) --isqrt;
            while ((isqrt + 1) * (isqrt + 1) <= disc) ++isqrt;
            if (isqrt * isqrt != disc) continue;
            if (((-z1 + isqrt) & 1LL) != 0) continue;  // -z1 and isqrt must share parity
            const long long z2a = (-z1 + isqrt) / 2;
            const long long z2b = (-z1 - isqrt) / 2;
            cst.points.push_back({k, z1, z2a, eta * hex_basis_point(z1, z2a)});
            if (z2b != z2a) cst.points.push_back({k, z1, z2b, eta * hex_basis_point(z1, z2b)});
        }
    }

    std::sort(cst.points.begin(), cst.points.end(), [](const LatticePoint& a, const LatticePoint& b) {
        if (a.k != b.k) return a.k < b.k;
        const double aa = std::arg(a.value);
        const double ab = std::arg(b.value);
        if (aa != ab) return aa < ab;
        if (a.z1 != b.z1) return a.z1 < b.z1;
        return a.z2 < b.z2;
    });

    if (cst.points.size() < 2) {
        cst.med = std::numeric_limits<double>::infinity();
        return cst;
    }

    // Nearest-neighbor lattice pair present -> MED is the lattice scale.
    std::unordered_set<std::pair<long long, long long>, PairHash> index;
    index.reserve(cst.points.size() * 2);
    for (const auto& pt : cst.points) index.insert({pt.z1, pt.z2});
    static constexpr long long kNeighbors[6][2] = {{1, 0},  {-1, 0}, {0, 1},
                                                   {0, -1}, {1, -1}, {-1, 1}};
    for (const auto& pt : cst.points) {
        for (const auto& nb : kNeighbors) {
            if (index.count({pt.z1 + nb[0], pt.z2 + nb[1]})) {
                cst.med = eta;
                return cst;
            }
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cst.points.size(); ++i)
        for (std::size_t j = i + 1; j < cst.points.size(); ++j)
            best = std::min(best, std::abs(cst.points[i].value - cst.points[j].value));
    cst.med = best;
    return cst;
}

PhasePair decompose_point(std::complex<double> s, std::complex<double> c1,
                          std::complex<double> c2) {
    const double m1 = std::abs(c1);
    const double m2 = std::abs(c2);
    if (m1 == 0.0 || m2 == 0.0)
        throw std::invalid_argument("decompose_point: both coefficients must be nonzero");

    const double rho = std::abs(s);
    const double r_in = std::abs(m1 - m2);
    const double r_out = m1 + m2;
    const double tol = 1e-9 * std::max({rho, r_out, 1.0});
    if (rho < r_in - tol || rho > r_out + tol)
        throw std::domain_error("decompose_point: point lies outside the annulus");

    // Law of cosines; clamp absorbs rounding at the annulus boundary.
    const double cos_delta = std::clamp((rho * rho - m1 * m1 - m2 * m2) / (2.0 * m1 * m2), -1.0, 1.0);
    const double delta = std::acos(cos_delta);  // canonical nonnegative branch
    const double phi = std::arg(c2) - std::arg(c1);

    const std::complex<double> denom =
        c1 + c2 * std::polar(1.0, delta - phi);
    const double theta1 = std::arg(s / denom);
    const double theta2 = delta + theta1 - phi;

    return {wrap_2pi(theta1), wrap_2pi(theta2)};
}

PskConstellation build_psk(double radius, double target_med) {
    if (!(radius > 0.0)) throw std::invalid_argument("build_psk: radius must be positive");
    if (!(target_med > 0.0)) throw std::invalid_argument("build_psk: target MED must be positive");

    PskConstellation psk;
    psk.radius = radius;

    const double ratio = target_med / (2.0 * radius);
    if (ratio > 1.0 + 1e-12) {
        psk.order = 2;
        psk.med_deficient = true;
    } else {
        const double half_angle = std::asin(std::min(1.0, ratio));
        const double order_real = kPi / half_angle;
        if (order_real > 1e6)
            throw std::invalid_argument("build_psk: order above 1e6, MED target too small");
        int m = std::max(2, static_cast<int>(std::floor(order_real + 1e-9)));
        // floor can land one off at exact boundaries; settle by direct check
        while (2.0 * radius * std::sin(kPi / (m + 1)) >= target_med * (1.0 - 1e-12)) ++m;
        while (m > 2 && 2.0 * radius * std::sin(kPi / m) < target_med * (1.0 - 1e-12)) --m;
        psk.order = m;
    }

    psk.points.resize(psk.order);
    for (int i = 0; i < psk.order; ++i)
        psk.points[i] = std::polar(radius, 2.0 * kPi * i / psk.order);
    return psk;
}

double scale_for_cardinality(const Annulus& annulus, long long target_points) {
    if (target_points < 1) throw std::invalid_argument("scale_for_cardinality: target must be >= 1");
    if (!(annulus.r_out > 0.0)) throw std::invalid_argument("scale_for_cardinality: degenerate annulus");

    const auto cardinality = [&](double eta) {
        return static_cast<long long>(enumerate_annulus(annulus, eta).points.size());
    };

    double hi = 2.0 * annulus.r_out;
    if (cardinality(hi) >= target_points) return hi;

    double lo = hi;
    while (cardinality(lo) < target_points) {
        lo *= 0.5;
        if (lo < 1e-12 * annulus.r_out)
            throw std::runtime_error("scale_for_cardinality: bracketing failed");
    }

    // lo meets the target, hi does not; shrink to the boundary.
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (cardinality(mid) >= target_points) lo = mid;
        else hi = mid;
    }
    return lo;
}

}  // namespace gamsim

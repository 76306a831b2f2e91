// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <map>

#include "gamsim/hexlat.hpp"
#include "gamsim/random.hpp"

using namespace gamsim;
using cd = std::complex<double>;

TEST_CASE("signed minimum magnitude") {
    const std::array<cd, 2> p34{cd(3, 0), cd(0, 4)};
    CHECK(signed_min_magnitude(p34) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(signed_max_magnitude(p34) == doctest::Approx(7.0).epsilon(1e-15));

    const std::array<cd, 2> ones{cd(1, 0), cd(0, 1)};
    CHECK(signed_min_magnitude(ones) == doctest::Approx(0.0).epsilon(1e-15));

    // |1 + 2 - 4| = 1 is the best sign pattern
    const std::array<cd, 3> p124{cd(1, 0), cd(2, 0), cd(4, 0)};
    CHECK(signed_min_magnitude(p124) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(signed_min_magnitude(std::span<const cd>{}), std::invalid_argument);
    const std::vector<cd> too_big(31, cd(1, 0));
    CHECK_THROWS_AS(signed_min_magnitude(too_big), std::invalid_argument);
}

TEST_CASE("annulus from a coefficient pair") {
    const Annulus a = annulus_from_pair(cd(2, 0), cd(0, 3));
    CHECK(a.r_in == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.r_out == doctest::Approx(5.0).epsilon(1e-15));

    const Annulus circle = annulus_from_pair(cd(0, -2.5), cd(0, 0));
    CHECK(circle.r_in == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(circle.r_out == doctest::Approx(2.5).epsilon(1e-15));

    // equal moduli sqrt(2) cancel to zero
    const Annulus wide = annulus_from_pair(cd(1, 1), cd(1, -1));
    CHECK(wide.r_in == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(wide.r_out == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(annulus_from_pair(cd(0, 0), cd(0, 0)), std::invalid_argument);
}

TEST_CASE("theta series coefficients") {
    // leading terms 1 + 6q + 6q^3 + 6q^4 + 12q^7
    const std::array<long long, 8> expected{1, 6, 0, 6, 6, 0, 0, 12};
    for (std::size_t k = 0; k < expected.size(); ++k)
        CHECK(hex_count(static_cast<long long>(k)) == expected[k]);

    // 49 = 7^2, split prime with multiplicity 2
    CHECK(hex_count(49) == 18);
    CHECK(hex_count_oracle(49) == 18);

    for (long long k = 0; k <= 1000; ++k) CHECK(hex_count(k) == hex_count_oracle(k));
}

TEST_CASE("annulus enumeration") {
    SUBCASE("origin plus first shell") {
        Annulus a;
        a.r_in = 0.0;
        a.r_out = 1.05;
        const AnnularConstellation cst = enumerate_annulus(a, 1.0);
        CHECK(cst.points.size() == 7);
        CHECK(cst.med == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("degenerate circle and boundary semantics") {
        Annulus on_shell;
        on_shell.r_in = 1.0;
        on_shell.r_out = 1.0;
        CHECK(enumerate_annulus(on_shell, 1.0).points.size() == 6);

        Annulus off_shell;
        off_shell.r_in = std::sqrt(2.0);
        off_shell.r_out = std::sqrt(2.0);
        CHECK(enumerate_annulus(off_shell, 1.0).points.empty());
    }
    SUBCASE("cardinality equals the theta-series sum") {
        Annulus a;
        a.r_in = 1.7;
        a.r_out = 9.3;
        const double eta = 0.77;
        const AnnularConstellation cst = enumerate_annulus(a, eta);

        const auto k_lo = static_cast<long long>(std::ceil(std::pow(a.r_in / eta, 2) - 1e-9));
        const auto k_hi = static_cast<long long>(std::floor(std::pow(a.r_out / eta, 2) + 1e-9));
        long long total = 0;
        std::map<long long, long long> per_shell;
        for (long long k = k_lo; k <= k_hi; ++k) {
            total += hex_count(k);
            per_shell[k] = hex_count_oracle(k);
        }
        CHECK(static_cast<long long>(cst.points.size()) == total);

        std::map<long long, long long> seen;
        for (const auto& pt : cst.points) {
            seen[pt.k] += 1;
            CHECK(pt.k == pt.z1 * pt.z1 + pt.z1 * pt.z2 + pt.z2 * pt.z2);
            CHECK(std::abs(pt.value) >= a.r_in - 1e-12);
            CHECK(std::abs(pt.value) <= a.r_out + 1e-12);
        }
        for (const auto& [k, count] : seen) CHECK(count == per_shell.at(k));
    }
    SUBCASE("points are sorted and distinct") {
        Annulus a;
        a.r_in = 0.0;
        a.r_out = 4.2;
        const AnnularConstellation cst = enumerate_annulus(a, 0.9);
        for (std::size_t i = 1; i < cst.points.size(); ++i) {
            const auto& prev = cst.points[i - 1];
            const auto& cur = cst.points[i];
            CHECK((prev.z1 != cur.z1 || prev.z2 != cur.z2));
            CHECK(prev.k <= cur.k);
            if (prev.k == cur.k) CHECK(std::arg(prev.value) <= std::arg(cur.value));
        }
    }
    SUBCASE("empty range is a valid constellation") {
        Annulus a;
        a.r_in = 1.01;
        a.r_out = 1.2;
        const AnnularConstellation cst = enumerate_annulus(a, 1.0);
        CHECK(cst.points.empty());
        CHECK(std::isinf(cst.med));
    }
}

TEST_CASE("minimum distance law") {
    Rng rng(55);
    for (int trial = 0; trial < 10; ++trial) {
        const cd c1 = rng.cgauss();
        const cd c2 = rng.cgauss();
        if (std::abs(c1) < 0.1 || std::abs(c2) < 0.1) continue;
        const Annulus a = annulus_from_pair(c1, c2);
        const double eta = a.r_out / 6.0;
        const AnnularConstellation cst = enumerate_annulus(a, eta);
        if (cst.points.size() < 2) continue;

        double brute = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cst.points.size(); ++i)
            for (std::size_t j = i + 1; j < cst.points.size(); ++j)
                brute = std::min(brute, std::abs(cst.points[i].value - cst.points[j].value));
        CHECK(cst.med == doctest::Approx(brute).epsilon(1e-12));
        CHECK(brute >= eta - 1e-12);
    }
}

TEST_CASE("point decomposition") {
    SUBCASE("outer radius aligns both phasors") {
        const cd c1(1.5, 0.5);
        const cd c2(-0.3, 1.1);
        const Annulus a = annulus_from_pair(c1, c2);
        const cd s = std::polar(a.r_out, 0.7);
        const PhasePair pp = decompose_point(s, c1, c2);
        const cd t1 = c1 * std::polar(1.0, pp.theta1);
        const cd t2 = c2 * std::polar(1.0, pp.theta2);
        CHECK(std::abs(t1 + t2 - s) <= 1e-9 * std::abs(s));
        // both phasors point along s
        CHECK(std::abs(std::arg(t1 / s)) <= 1e-9);
        CHECK(std::abs(std::arg(t2 / s)) <= 1e-9);
    }
    SUBCASE("inner radius anti-aligns the phasors") {
        const cd c1(2.0, 0.0);
        const cd c2(0.0, 0.7);
        const Annulus a = annulus_from_pair(c1, c2);
        const cd s = std::polar(a.r_in, -1.2);
        const PhasePair pp = decompose_point(s, c1, c2);
        const cd t1 = c1 * std::polar(1.0, pp.theta1);
        const cd t2 = c2 * std::polar(1.0, pp.theta2);
        CHECK(std::abs(t1 + t2 - s) <= 1e-9);
        // arccos loses half the digits where its argument grazes -1
        CHECK(std::abs(std::abs(std::arg(t1 / t2)) - M_PI) <= 2e-7);
    }
    SUBCASE("round trip over whole constellations") {
        Rng rng(77);
        int checked = 0;
        while (checked < 5) {
            const cd c1 = rng.cgauss();
            const cd c2 = rng.cgauss();
            if (std::abs(c1) < 0.05 || std::abs(c2) < 0.05) continue;
            const Annulus a = annulus_from_pair(c1, c2);
            const AnnularConstellation cst = enumerate_annulus(a, a.r_out / 8.0);
            if (cst.points.empty()) continue;
            ++checked;
            for (const auto& pt : cst.points) {
                const PhasePair pp = decompose_point(pt.value, c1, c2);
                CHECK(pp.theta1 >= 0.0);
                CHECK(pp.theta1 < 2.0 * M_PI);
                CHECK(pp.theta2 >= 0.0);
                CHECK(pp.theta2 < 2.0 * M_PI);
                const cd back = c1 * std::polar(1.0, pp.theta1) + c2 * std::polar(1.0, pp.theta2);
                CHECK(std::abs(back - pt.value) <= 1e-9 * std::max(1.0, std::abs(pt.value)));
            }
        }
    }
    SUBCASE("geometry violations rejected") {
        const cd c1(1.0, 0.0);
        const cd c2(0.0, 0.5);
        CHECK_THROWS_AS(decompose_point(cd(3.0, 0.0), c1, c2), std::domain_error);
        CHECK_THROWS_AS(decompose_point(cd(0.1, 0.0), c1, c2), std::domain_error);
        CHECK_THROWS_AS(decompose_point(cd(1.0, 0.0), cd(0, 0), c2), std::invalid_argument);
    }
}

TEST_CASE("psk construction") {
    SUBCASE("named orders") {
        CHECK(build_psk(1.0, std::sqrt(2.0)).order == 4);  // QPSK MED
        const PskConstellation bpsk = build_psk(1.0, 2.0);
        CHECK(bpsk.order == 2);
        CHECK(!bpsk.med_deficient);
        const PskConstellation starved = build_psk(1.0, 2.5);
        CHECK(starved.order == 2);
        CHECK(starved.med_deficient);
    }
    SUBCASE("med formula matches pairwise distances") {
        for (int m = 2; m <= 64; ++m) {
            const double med = 2.0 * std::sin(M_PI / m);
            const PskConstellation psk = build_psk(1.0, med * (1.0 - 1e-9));
            CHECK(psk.order == m);
            double brute = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j)
                    brute = std::min(brute, std::abs(psk.points[i] - psk.points[j]));
            CHECK(psk.med() == doctest::Approx(brute).epsilon(1e-12));
        }
    }
    SUBCASE("invalid inputs rejected") {
        CHECK_THROWS_AS(build_psk(0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(build_psk(1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("scale for a target cardinality") {
    Annulus a;
    a.r_in = 0.0;
    a.r_out = 2.0;
    a.c1 = cd(1.0, 0.0);
    a.c2 = cd(1.0, 0.0);

    SUBCASE("target one is always reachable") {
        const double eta = scale_for_cardinality(a, 1);
        CHECK(enumerate_annulus(a, eta).points.size() >= 1);
    }
    SUBCASE("seven points on a disc need eta near the radius") {
        const double eta = scale_for_cardinality(a, 7);
        CHECK(enumerate_annulus(a, eta).points.size() >= 7);
        CHECK(eta == doctest::Approx(a.r_out).epsilon(1e-6));
    }
    SUBCASE("doubling the target never increases eta") {
        Annulus ring;
        ring.r_in = 0.4;
        ring.r_out = 3.1;
        double prev = std::numeric_limits<double>::infinity();
        for (long long target = 2; target <= 512; target *= 2) {
            const double eta = scale_for_cardinality(ring, target);
            CHECK(enumerate_annulus(ring, eta).points.size() >= static_cast<std::size_t>(target));
            CHECK(eta <= prev + 1e-12);
            prev = eta;
        }
    }
    SUBCASE("invalid target rejected") {
        CHECK_THROWS_AS(scale_for_cardinality(a, 0), std::invalid_argument);
    }
}

TEST_CASE("reachable moduli stay inside the annulus") {
    Rng rng(303);
    for (int trial = 0; trial < 10; ++trial) {
        const cd c1 = rng.cgauss();
        const cd c2 = rng.cgauss();
        if (std::abs(c1) < 0.05 || std::abs(c2) < 0.05) continue;
        const Annulus a = annulus_from_pair(c1, c2);

        double seen_min = std::numeric_limits<double>::infinity();
        double seen_max = 0.0;
        for (int s = 0; s < 10000; ++s) {
            const double t1 = 2.0 * M_PI * rng.uniform();
            const double t2 = 2.0 * M_PI * rng.uniform();
            const double rho = std::abs(c1 * std::polar(1.0, t1) + c2 * std::polar(1.0, t2));
            CHECK(rho >= a.r_in - 1e-12);
            CHECK(rho <= a.r_out + 1e-12);
            seen_min = std::min(seen_min, rho);
            seen_max = std::max(seen_max, rho);
        }
        // a fine grid over the phase difference reaches both radii
        for (int g = 0; g <= 200000; ++g) {
            const double phi = 2.0 * M_PI * g / 200000.0;
            const double rho = std::abs(c1 + c2 * std::polar(1.0, phi));
            seen_min = std::min(seen_min, rho);
            seen_max = std::max(seen_max, rho);
        }
        CHECK(seen_min <= a.r_in + 1e-4);
        CHECK(seen_max >= a.r_out - 1e-4);
    }
}

// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "gamsim/corrchan.hpp"
#include "gamsim/random.hpp"

using namespace gamsim;

namespace {

ChannelRealization make_fixed_channel(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& g,
                                      const Eigen::VectorXcd& d) {
    ChannelRealization ch;
    ch.H = H;
    ch.g = g;
    ch.d = d;
    ch.grid = make_grid(static_cast<int>(H.cols()), 1, 0.5);
    return ch;
}

}  // namespace

TEST_CASE("sinc correlation values") {
    CHECK(sinc_correlation(0.0) == 1.0);
    // half-wavelength spacing: sin(pi)/pi
    CHECK(std::abs(sinc_correlation(0.5)) < 1e-15);
    // quarter-wavelength spacing: sin(pi/2)/(pi/2) = 2/pi
    CHECK(sinc_correlation(0.25) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("correlation matrix structure") {
    const RisGrid grid = make_grid(4, 2, 0.25);
    const CorrelationMatrix corr = build_correlation_matrix(grid);
    const Eigen::Index n = grid.size();
    REQUIRE(corr.R.rows() == n);

    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(corr.R(i, i) == 1.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            CHECK(std::abs(corr.R(i, j)) <= 1.0 + 1e-12);
            CHECK(std::abs(corr.R(i, j) - corr.R(j, i)) <= 1e-12);
        }
    }
    // adjacent elements at quarter-wavelength pitch
    CHECK(corr.R(0, 1) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("clamped square root reconstructs R") {
    // dense grid: the sinc matrix is numerically rank-deficient here
    const RisGrid grid = make_grid(8, 8, 0.125);
    const CorrelationMatrix corr = build_correlation_matrix(grid);
    CHECK(corr.eigen_floor > 0.0);
    const Eigen::MatrixXd err =
        (corr.sqrt_factor * corr.sqrt_factor.transpose() - corr.R).cwiseAbs();
    CHECK(err.maxCoeff() <= 1e-8);
}

TEST_CASE("non-finite positions rejected") {
    RisGrid grid = make_grid(2, 2, 0.5);
    grid.positions(0, 1) = std::nan("");
    CHECK_THROWS_AS(build_correlation_matrix(grid), std::invalid_argument);
}

TEST_CASE("sampling determinism and scaling") {
    const RisGrid grid = make_grid(4, 4, 0.125);
    const CorrelationMatrix corr = build_correlation_matrix(grid);
    AttenuationSpec att{-20.0, -5.0, -5.0};

    const ChannelRealization a = sample_channel(grid, att, 3, corr, 1234);
    const ChannelRealization b = sample_channel(grid, att, 3, corr, 1234);
    CHECK((a.H.array() == b.H.array()).all());
    CHECK((a.g.array() == b.g.array()).all());
    CHECK((a.d.array() == b.d.array()).all());

    const ChannelRealization c = sample_channel(grid, att, 3, corr, 1235);
    CHECK((a.H.array() != c.H.array()).any());

    // -300 dB amplitude zeroes the surface-to-receiver gains
    AttenuationSpec silent{-20.0, -300.0, -5.0};
    const ChannelRealization s = sample_channel(grid, silent, 3, corr, 42);
    for (int k = 0; k < 3; ++k) CHECK(s.H.row(k).norm() < 1e-10);
}

TEST_CASE("empirical covariance of h matches mu^2 R") {
    const RisGrid grid = make_grid(2, 2, 0.125);
    const CorrelationMatrix corr = build_correlation_matrix(grid);
    AttenuationSpec att{-60.0, -5.0, -5.0};
    const double mu2 = att.mu_rr() * att.mu_rr();
    const Eigen::Index n = grid.size();

    const int samples = 100000;
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(n, n);
    for (int s = 0; s < samples; ++s) {
        const ChannelRealization ch = sample_channel(grid, att, 1, corr, 1000 + s);
        const Eigen::VectorXcd h = ch.H.row(0).transpose();
        cov += h * h.adjoint();
    }
    cov /= samples;

    for (Eigen::Index i = 0; i < n; ++i)
        CHECK(cov(i, i).real() == doctest::Approx(mu2 * corr.R(i, i)).epsilon(0.05));
    // empirical correlation coefficients within 0.02 absolute
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double rho =
                cov(i, j).real() / std::sqrt(cov(i, i).real() * cov(j, j).real());
            CHECK(std::abs(rho - corr.R(i, j)) <= 0.02);
        }
}

TEST_CASE("rank-one reduction") {
    Eigen::MatrixXcd H(1, 3);
    H << std::complex<double>(1.0, 2.0), std::complex<double>(0.0, -1.0),
        std::complex<double>(0.5, 0.0);
    Eigen::VectorXcd g(3);
    g << 1.0, std::complex<double>(0.0, 1.0), 2.0;
    Eigen::VectorXcd d(1);
    d << std::complex<double>(0.3, 0.4);

    const ChannelRealization ch = make_fixed_channel(H, g, d);
    Eigen::MatrixXcd G(1, 4);
    G.leftCols(3) = H * g.asDiagonal();
    G.col(3) = d;

    const EquivalentChannel eq = reduce_to_equivalent(ch);
    REQUIRE(eq.tau == 1);
    CHECK(eq.n_check == 4);
    CHECK(eq.Hcheck.norm() == doctest::Approx(G.norm()).epsilon(1e-12));
}

TEST_CASE("orthonormal-column reduction") {
    const ChannelRealization ch = make_fixed_channel(Eigen::MatrixXcd::Identity(2, 2),
                                                     Eigen::VectorXcd::Ones(2),
                                                     Eigen::VectorXcd::Zero(2));
    const EquivalentChannel eq = reduce_to_equivalent(ch);
    REQUIRE(eq.tau == 2);
    CHECK(eq.singular_values(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eq.singular_values(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reduction invariants on a correlated channel") {
    const RisGrid grid = make_grid(16, 16, 0.125);
    const CorrelationMatrix corr = build_correlation_matrix(grid);
    AttenuationSpec att{-25.0, -5.0, -5.0};
    const ChannelRealization ch = sample_channel(grid, att, 3, corr, 99);
    const EquivalentChannel eq = reduce_to_equivalent(ch);

    REQUIRE(eq.tau >= 1);
    REQUIRE(eq.n_check == grid.size() + 1);
    for (int i = 0; i + 1 < eq.tau; ++i)
        CHECK(eq.singular_values(i) >= eq.singular_values(i + 1));

    // rows are orthogonal with norms rho_i
    const Eigen::MatrixXcd gram = eq.Hcheck * eq.Hcheck.adjoint();
    for (int i = 0; i < eq.tau; ++i)
        for (int j = 0; j < eq.tau; ++j) {
            const double expect = i == j ? eq.singular_values(i) * eq.singular_values(i) : 0.0;
            CHECK(std::abs(gram(i, j) - expect) <= 1e-9 * gram.real().diagonal().maxCoeff());
        }

    // G is reconstructed by the (recovered) left factor within 1e-9 ||G||_F
    Eigen::MatrixXcd G(ch.H.rows(), grid.size() + 1);
    G.leftCols(grid.size()) = ch.H * ch.g.asDiagonal();
    G.col(grid.size()) = ch.d;
    Eigen::MatrixXcd U = G * eq.Hcheck.adjoint();
    for (int i = 0; i < eq.tau; ++i)
        U.col(i) /= eq.singular_values(i) * eq.singular_values(i);
    CHECK((U * eq.Hcheck - G).norm() <= 1e-9 * G.norm());
}

TEST_CASE("degenerate channel rejected") {
    const ChannelRealization ch = make_fixed_channel(Eigen::MatrixXcd::Zero(2, 3),
                                                     Eigen::VectorXcd::Zero(3),
                                                     Eigen::VectorXcd::Zero(2));
    CHECK_THROWS_AS(reduce_to_equivalent(ch), std::domain_error);
}

TEST_CASE("rank tolerance truncates weak directions") {
    Eigen::MatrixXcd G(2, 3);
    G.setZero();
    G(0, 0) = 1.0;
    G(1, 1) = 1e-14;
    const EquivalentChannel eq = reduce_matrix(G);
    CHECK(eq.tau == 1);
    const EquivalentChannel full = reduce_matrix(G, 1e-16);
    CHECK(full.tau == 2);
}

TEST_CASE("seed derivation gives distinct streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    Rng r1(derive_seed(7, 0));
    Rng r2(derive_seed(7, 1));
    CHECK(r1.uniform() != r2.uniform());
}

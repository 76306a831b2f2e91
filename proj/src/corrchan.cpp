// SPDX-License-Identifier: Apache-2.0

#include "gamsim/corrchan.hpp"

#include <cmath>
#include <stdexcept>

#include "gamsim/random.hpp"

namespace gamsim {

namespace {

double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

}  // namespace

double AttenuationSpec::mu_los() const { return db_to_amplitude(mu_los_db); }
double AttenuationSpec::mu_rr() const { return db_to_amplitude(mu_rr_db); }
double AttenuationSpec::mu_tr() const { return db_to_amplitude(mu_tr_db); }

RisGrid make_grid(int n_x, int n_y, double spacing) {
    if (n_x < 1 || n_y < 1) throw std::invalid_argument("grid dimensions must be positive");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("grid spacing must be positive and finite");
    RisGrid grid;
    grid.n_x = n_x;
    grid.n_y = n_y;
    grid.spacing = spacing;
    grid.positions.resize(2, static_cast<Eigen::Index>(n_x) * n_y);
    Eigen::Index idx = 0;
    for (int row = 0; row < n_y; ++row)
        for (int col = 0; col < n_x; ++col, ++idx)
            grid.positions.col(idx) = Eigen::Vector2d(col * spacing, row * spacing);
    return grid;
}

double sinc_correlation(double dist_wavelengths) {
    const double x = 2.0 * dist_wavelengths;
    if (x == 0.0) return 1.0;
    return std::sin(M_PI * x) / (M_PI * x);
}

CorrelationMatrix build_correlation_matrix(const RisGrid& grid) {
    const Eigen::Index n = grid.size();
    if (n < 1) throw std::invalid_argument("grid must have at least one element");
    if (grid.positions.cols() != n)
        throw std::invalid_argument("grid position list inconsistent with n_x * n_y");
    if (!grid.positions.allFinite())
        throw std::invalid_argument("grid positions must be finite");

    CorrelationMatrix corr;
    corr.R.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        corr.R(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dist = (grid.positions.col(i) - grid.positions.col(j)).norm();
            const double r = sinc_correlation(dist);
            corr.R(i, j) = r;
            corr.R(j, i) = r;
        }
    }

    // The sinc matrix is PSD in exact arithmetic but not numerically; clamp
    // small/negative eigenvalues so the factor has the clamped rank.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr.R);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition of correlation matrix failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    corr.eigen_floor = 1e-12 * lambda.maxCoeff();
    Eigen::VectorXd root = lambda.unaryExpr([&](double l) {
        return l < corr.eigen_floor ? 0.0 : std::sqrt(l);
    });
    corr.sqrt_factor = eig.eigenvectors() * root.asDiagonal();
    return corr;
}

ChannelRealization sample_channel(const RisGrid& grid, const AttenuationSpec& attenuation,
                                  int n_r, const CorrelationMatrix& corr, std::uint64_t seed) {
    const Eigen::Index n = grid.size();
    if (n_r < 1) throw std::invalid_argument("n_R must be at least 1");
    if (corr.sqrt_factor.rows() != n || corr.sqrt_factor.cols() != n)
        throw std::invalid_argument("correlation matrix does not match the grid");

    ChannelRealization ch;
    ch.grid = grid;
    ch.attenuation = attenuation;
    ch.seed = seed;
    ch.H.resize(n_r, n);
    Rng rng(seed);

    const double mu_rr = attenuation.mu_rr();
    for (int k = 0; k < n_r; ++k)
        ch.H.row(k) = (mu_rr * (corr.sqrt_factor * rng.cgauss_vector(n))).transpose();
    ch.g = attenuation.mu_tr() * (corr.sqrt_factor * rng.cgauss_vector(n));
    ch.d = attenuation.mu_los() * rng.cgauss_vector(n_r);
    return ch;
}

EquivalentChannel reduce_matrix(const Eigen::Ref<const Eigen::MatrixXcd>& G,
                                double rank_tolerance) {
    if (G.rows() < 1 || G.cols() < 1) throw std::invalid_argument("empty channel matrix");

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    if (sigma(0) <= 1e-300) throw std::domain_error("degenerate channel: all singular values vanish");

    int tau = 0;
    while (tau < sigma.size() && sigma(tau) > rank_tolerance * sigma(0)) ++tau;

    EquivalentChannel eq;
    eq.tau = tau;
    eq.n_check = static_cast<int>(G.cols());
    eq.rank_tolerance = rank_tolerance;
    eq.singular_values = sigma.head(tau);
    eq.Hcheck = sigma.head(tau).asDiagonal() * svd.matrixV().leftCols(tau).adjoint();
    return eq;
}

EquivalentChannel reduce_to_equivalent(const ChannelRealization& ch, double rank_tolerance) {
    const Eigen::Index n = ch.g.size();
    if (ch.H.cols() != n || ch.d.size() != ch.H.rows())
        throw std::invalid_argument("inconsistent channel dimensions");
    Eigen::MatrixXcd G(ch.H.rows(), n + 1);
    G.leftCols(n) = ch.H * ch.g.asDiagonal();
    G.col(n) = ch.d;  // virtual element for the direct path
    return reduce_matrix(G, rank_tolerance);
}

}  // namespace gamsim

// SPDX-License-Identifier: Apache-2.0

#ifndef GAMSIM_CORRCHAN_HPP
#define GAMSIM_CORRCHAN_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace gamsim {

/// Planar reflective surface on a rectangular grid. Coordinates are stored in
/// wavelengths, so the carrier never appears explicitly.
struct RisGrid {
    int n_x = 1;      ///< columns
    int n_y = 1;      ///< rows
    double spacing = 0.5;  ///< inter-element pitch d / lambda
    Eigen::Matrix2Xd positions;  ///< (x, y) per element, row-major over the grid

    int size() const { return n_x * n_y; }
};

/// Builds the grid with element (col, row) at (col*d, row*d), row-major.
RisGrid make_grid(int n_x, int n_y, double spacing);

/// Amplitude attenuation coefficients, stored as 20*log10(mu) decibels.
struct AttenuationSpec {
    double mu_los_db = -60.0;
    double mu_rr_db = -5.0;
    double mu_tr_db = -5.0;

    double mu_los() const;
    double mu_rr() const;
    double mu_tr() const;
};

/// Spatial correlation of the surface elements together with a factor
/// F such that F F^T ~ R, used to color i.i.d. Gaussian draws.
struct CorrelationMatrix {
    Eigen::MatrixXd R;
    Eigen::MatrixXd sqrt_factor;  ///< F, clamped-eigenvalue symmetric square root
    double eigen_floor = 0.0;     ///< eigenvalues below this were zeroed
};

/// One drop of raw channel gains.
struct ChannelRealization {
    Eigen::MatrixXcd H;   ///< n_R x n, rows are per-antenna gains from the surface
    Eigen::VectorXcd g;   ///< n, transmitter -> surface
    Eigen::VectorXcd d;   ///< n_R, direct path
    std::uint64_t seed = 0;
    RisGrid grid;
    AttenuationSpec attenuation;
};

/// Reduced full-row-rank purely-reflective channel.
struct EquivalentChannel {
    Eigen::MatrixXcd Hcheck;        ///< tau x n_check
    int tau = 0;                    ///< numerical row rank
    int n_check = 0;                ///< n + 1 (one virtual element for the direct path)
    Eigen::VectorXd singular_values;  ///< rho_1 >= ... >= rho_tau > 0
    double rank_tolerance = 1e-10;
};

/// Correlation coefficient between two elements a distance `dist` apart
/// (in wavelengths): sinc(2 dist), normalized sinc.
double sinc_correlation(double dist_wavelengths);

/// Pairwise sinc correlation matrix of the grid plus its clamped square root.
/// Eigenvalues below 1e-12 * lambda_max are zeroed before taking the root.
CorrelationMatrix build_correlation_matrix(const RisGrid& grid);

/// Draws one correlated channel realization. Draw order is fixed:
/// h_1, ..., h_{n_R}, then g, then d; each correlated vector is mu * F * w
/// with w i.i.d. CN(0,1), and d uses identity correlation.
ChannelRealization sample_channel(const RisGrid& grid, const AttenuationSpec& attenuation,
                                  int n_r, const CorrelationMatrix& corr, std::uint64_t seed);

/// Reduces an arbitrary gain matrix G to its full-row-rank equivalent
/// Hcheck = Sigma_tau V_tau^H via the SVD, keeping singular values above
/// rank_tolerance * sigma_1.
EquivalentChannel reduce_matrix(const Eigen::Ref<const Eigen::MatrixXcd>& G,
                                double rank_tolerance = 1e-10);

/// Forms the augmented matrix [H diag(g), d] and reduces it. The direct path
/// becomes the last (virtual) equivalent element.
EquivalentChannel reduce_to_equivalent(const ChannelRealization& ch,
                                       double rank_tolerance = 1e-10);

}  // namespace gamsim

#endif  // GAMSIM_CORRCHAN_HPP

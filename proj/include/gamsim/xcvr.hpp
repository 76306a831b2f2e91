// SPDX-License-Identifier: Apache-2.0

#ifndef GAMSIM_XCVR_HPP
#define GAMSIM_XCVR_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gamsim/echelon.hpp"
#include "gamsim/hexlat.hpp"
#include "gamsim/random.hpp"

namespace gamsim {

enum class SubchannelMode { Annular, Circle };

/// One phase-modulated subchannel of the plan: the row, the columns it owns,
/// its constellation, and the canonical phase drive per symbol.
struct SubchannelEntry {
    int row = 0;      ///< 0-based row of C
    int pivot = 0;    ///< 0-based first owned column
    int width = 1;    ///< owned columns (2 = annular pair, 1 = circle)
    SubchannelMode mode = SubchannelMode::Circle;
    std::complex<double> c1{0.0, 0.0};
    std::complex<double> c2{0.0, 0.0};

    AnnularConstellation annular;  ///< populated in annular mode
    PskConstellation psk;          ///< populated in circle mode
    bool rate_zero = false;        ///< single fixed point, no information
    bool med_deficient = false;    ///< circle mode could not reach the MED target

    std::vector<std::complex<double>> symbols;  ///< effective transmitted points
    std::vector<PhasePair> phases;              ///< canonical drive per symbol
    double med_tx = 0.0;   ///< transmit-domain MED (+inf when rate_zero)
    double bits = 0.0;     ///< log2(cardinality)

    std::int64_t cardinality() const { return static_cast<std::int64_t>(symbols.size()); }
};

/// Full transmission plan for one decomposition: tau-1 phase-modulated
/// subchannels plus the beamforming row, with constellations sized so the
/// received MED at the design SNR equals med_target_rx.
struct SubchannelPlan {
    EchelonDecomposition dec;
    double snr_ref_db = 0.0;
    double med_target_rx = 0.0;
    std::vector<SubchannelEntry> entries;  ///< rows 0..tau-2
    Eigen::VectorXd base_theta;            ///< beamforming phases; entry positions zeroed
    int beam_pivot = 0;
    double beam_gain = 0.0;

    int tau() const { return dec.tau(); }
    int n_check() const { return dec.n_check(); }
};

/// One transmitted frame (L = 1): per-subchannel symbol indices, the
/// assembled phase vector (in the permuted column order of C), and the
/// unit-norm active input.
struct SymbolFrame {
    std::vector<std::int64_t> indices;
    Eigen::VectorXd theta;
    std::complex<double> x{1.0, 0.0};
};

struct DofSummary {
    double gam = 0.0;
    double qr_sic = 0.0;
    double max = 0.0;
};

struct SubchannelStat {
    int subchannel = 0;   ///< 1-based row; 0 marks the aggregate
    std::string mode;
    double cardinality = 0.0;
    double mod_order_bits = 0.0;
    std::int64_t trials = 0;
    std::int64_t errors = 0;
    double ser_empirical = 0.0;
    double ser_theory = 0.0;
    double med_received = 0.0;
};

struct SerPoint {
    double snr_db = 0.0;
    std::vector<SubchannelStat> sub;
    SubchannelStat aggregate;
};

struct SerRunConfig {
    std::vector<double> snr_db;
    std::int64_t frames = 1000;
    double constellation_snr_db = 49.0;  ///< design SNR for the constellations
    double med_target_rx = 5.0;          ///< received MED at the design SNR
    std::uint64_t seed = 1;
    bool noise = true;
};

struct SerReport {
    std::vector<SerPoint> points;
    std::vector<std::uint64_t> realization_seeds;
    std::int64_t frames = 0;
    std::uint64_t seed = 0;
};

/// Gaussian tail Q(u).
double q_function(double u);

/// Received-domain MED whose union-bound annular SER equals `ser`.
double med_for_annular_ser(double ser);

/// Builds the per-subchannel plan at the design SNR: eta_i = med / sqrt(snr)
/// for annular rows, PSK with the same received-MED target for circle rows,
/// and coherent beamforming phases on the last row.
SubchannelPlan plan_subchannels(const EchelonDecomposition& dec, double snr_db,
                                double med_target_rx);

/// Maps symbol indices to the transmitted phase vector via the canonical
/// point decomposition.
SymbolFrame modulate(const SubchannelPlan& plan, std::span<const std::int64_t> indices);

/// y_check = sqrt(snr) Hcheck P e^{j theta} x + z, rotated by B^H at the
/// receiver. Noise is drawn in the reduced tau-dimensional domain.
Eigen::VectorXcd transmit_and_receive(const SubchannelPlan& plan, const SymbolFrame& frame,
                                      double snr_db, Rng& rng, bool add_noise = true,
                                      Eigen::VectorXcd* y_check_out = nullptr);

/// Bottom-to-top successive cancellation: each row subtracts every
/// already-decided column, then ML-demaps the residue. Leading-column
/// leakage is uncancellable interference.
std::vector<std::int64_t> sic_demodulate(const SubchannelPlan& plan,
                                         const Eigen::Ref<const Eigen::VectorXcd>& received,
                                         double snr_db);

DofSummary dof_summary(int n_check, int tau);

/// Union bound 6 Q(med / sqrt(2)) for the hexagonal packing, clamped to [0,1].
double ser_union_bound_annular(double med_received);

/// Exact single-integral MPSK symbol error rate at symbol SNR
/// gamma = snr_linear * radius^2.
double ser_psk_reference(int order, double radius, double snr_linear);

/// Monte Carlo SER over the SNR grid. One realization = fixed-channel mode;
/// several = averaged mode. Per-frame streams are derived from the master
/// seed by a counter scheme, so results do not depend on evaluation order.
SerReport monte_carlo_ser(std::span<const EchelonDecomposition> realizations,
                          const SerRunConfig& cfg);

}  // namespace gamsim

#endif  // GAMSIM_XCVR_HPP

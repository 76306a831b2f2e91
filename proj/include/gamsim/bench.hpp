// SPDX-License-Identifier: Apache-2.0

#ifndef GAMSIM_BENCH_HPP
#define GAMSIM_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamsim/corrchan.hpp"
#include "gamsim/echelon.hpp"
#include "gamsim/xcvr.hpp"

namespace gamsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

inline constexpr const char* kVersion = "gamsim-0.1.0";

/// How the received MED is chosen at the constellation design SNR.
struct MedPolicy {
    std::string mode = "target-ser";  ///< "target-ser" or "fixed-received"
    double value = 1e-3;              ///< target SER, or the received MED itself

    double received_med() const;
};

/// Full experiment description. Serializes losslessly to JSON; unknown keys
/// are rejected on parse.
struct ExperimentConfig {
    int grid_n_x = 32;
    int grid_n_y = 32;
    double grid_spacing = 0.125;   ///< d / lambda
    int n_r = 4;
    AttenuationSpec attenuation{-60.0, -5.0, -5.0};
    std::vector<double> snr_db = {49.0};
    double constellation_snr_db = 49.0;
    std::vector<int> element_sweep = {64, 256};
    std::vector<double> spacing_sweep = {0.125};
    std::vector<DecompositionMethod> methods = {
        DecompositionMethod::CP, DecompositionMethod::QR, DecompositionMethod::GramSchmidt,
        DecompositionMethod::RandomRotation};
    std::int64_t frames = 1000;
    int realizations = 100;
    int random_rotation_trials = 10000;
    MedPolicy med_policy;
    std::uint64_t seed = 1;
    std::string out_dir = "results";
    int threads = 1;

    void validate() const;  ///< throws ConfigError with an explanation
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Named parameter sets: fig3-small, fig3-paper, fig5, fig6.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// FNV-1a over the canonical JSON dump, hex string.
std::string config_hash(const ExperimentConfig& cfg);

/// Channel stream of realization r under this config's master seed. ser-sim
/// realization r and a constellation dump pinned to this value see the same
/// channel.
std::uint64_t channel_seed_for_realization(const ExperimentConfig& cfg, int realization);

struct RreCell {
    int n = 0;
    double d_over_lambda = 0.0;
    DecompositionMethod method = DecompositionMethod::CP;
    int realizations = 0;
    double rre_mean = 0.0;
    double rre_median = 0.0;
    double rre_p10 = 0.0;
    double rre_p90 = 0.0;
    double seconds_mean = 0.0;
};

struct RreReport {
    std::vector<RreCell> cells;
};

/// Runs one decomposition method per (element count, spacing, realization)
/// and aggregates the relative residual errors.
RreReport run_rre_bench(const ExperimentConfig& cfg);
std::string rre_report_csv(const RreReport& report);

/// Per-scheme summary of a constellation dump.
struct ConstellationSummaryRow {
    std::string scheme;   ///< "gam" or "qr-sic"
    int subchannel = 0;   ///< 1-based; 0 = total row
    std::string mode;
    double cardinality = 0.0;
    double mod_order_bits = 0.0;
};

struct ConstellationDump {
    std::vector<ConstellationSummaryRow> rows;
    std::vector<std::pair<std::string, std::string>> files;  ///< (name, csv content)
};

/// Pins one channel by seed and materializes both transceivers'
/// constellations at the design SNR.
ConstellationDump run_constellation_dump(const ExperimentConfig& cfg, std::uint64_t channel_seed);
std::string constellation_summary_csv(const std::vector<ConstellationSummaryRow>& rows);

/// Monte Carlo SER sweep for both schemes. realizations == 1 pins a single
/// channel; larger values average. Returns (gam, qr-sic) reports.
std::pair<SerReport, SerReport> run_ser_sim(const ExperimentConfig& cfg);
std::string ser_report_csv(const SerReport& report);

/// Command-line driver; argv-style arguments without the program name.
/// Returns a process exit code, writing human-readable errors to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace gamsim

#endif  // GAMSIM_BENCH_HPP

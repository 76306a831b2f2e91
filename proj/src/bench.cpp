// SPDX-License-Identifier: Apache-2.0

#include "gamsim/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gamsim/random.hpp"
#include "gamsim/serialize.hpp"

namespace gamsim {

namespace {

using nlohmann::json;

// seed-derivation tags for the independent substreams
constexpr std::uint64_t kChannelStream = 0xC4A1u;
constexpr std::uint64_t kRotationStream = 0x526F74u;

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

int square_side(int n) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) return 0;
    return side;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void check_no_unknown_keys(const json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
    for (const auto& item : j.items()) {
        bool found = false;
        for (const char* key : known)
            if (item.key() == key) {
                found = true;
                break;
            }
        if (!found) throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
}

EchelonDecomposition decompose_with(DecompositionMethod method, const Eigen::MatrixXcd& Hcheck,
                                    int rr_trials, std::uint64_t rr_seed) {
    switch (method) {
        case DecompositionMethod::CP: return cp_decompose(Hcheck);
        case DecompositionMethod::QR: return qr_decompose(Hcheck);
        case DecompositionMethod::GramSchmidt: return gram_schmidt_decompose(Hcheck);
        case DecompositionMethod::RandomRotation:
            return random_rotation_decompose(Hcheck, rr_trials, rr_seed);
    }
    throw std::logic_error("unknown method");
}

std::filesystem::path ensure_out_dir(const std::string& dir) {
    std::filesystem::path path(dir);
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create output directory " + path.string() + ": " + ec.message());
    return path;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

double MedPolicy::received_med() const {
    if (mode == "fixed-received") return value;
    if (mode == "target-ser") return med_for_annular_ser(value);
    throw ConfigError("med_policy.mode must be \"target-ser\" or \"fixed-received\"");
}

void ExperimentConfig::validate() const {
    require(grid_n_x >= 1 && grid_n_y >= 1, "grid dimensions must be >= 1");
    require(grid_spacing > 0.0, "grid spacing must be positive");
    require(n_r >= 1, "n_r must be >= 1");
    require(n_r <= grid_n_x * grid_n_y + 1,
            "n_r = " + std::to_string(n_r) + " exceeds n + 1 = " +
                std::to_string(grid_n_x * grid_n_y + 1) +
                ": the equivalent rank would exceed the equivalent element count");
    require(!snr_db.empty(), "snr_db list must not be empty");
    require(!element_sweep.empty(), "element_sweep must not be empty");
    for (int n : element_sweep) {
        require(n >= 1, "element_sweep entries must be >= 1");
        require(square_side(n) != 0,
                "element_sweep entry " + std::to_string(n) + " is not a perfect square");
        require(n_r <= n + 1, "n_r = " + std::to_string(n_r) + " exceeds n + 1 = " +
                                  std::to_string(n + 1) + " for sweep entry " + std::to_string(n) +
                                  ": the equivalent rank would exceed the equivalent element count");
    }
    require(!spacing_sweep.empty(), "spacing_sweep must not be empty");
    for (double d : spacing_sweep) require(d > 0.0, "spacing_sweep entries must be positive");
    require(!methods.empty(), "methods list must not be empty");
    require(frames >= 0, "frames must be >= 0");
    require(realizations >= 1, "realizations must be >= 1");
    require(random_rotation_trials >= 1, "random_rotation_trials must be >= 1");
    require(med_policy.value > 0.0, "med_policy.value must be positive");
    require(med_policy.mode == "target-ser" || med_policy.mode == "fixed-received",
            "med_policy.mode must be \"target-ser\" or \"fixed-received\"");
    require(threads >= 1, "threads must be >= 1");
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["grid"] = {{"n_x", cfg.grid_n_x}, {"n_y", cfg.grid_n_y}, {"spacing", cfg.grid_spacing}};
    j["n_r"] = cfg.n_r;
    j["attenuation"] = {{"mu_los_db", cfg.attenuation.mu_los_db},
                        {"mu_rr_db", cfg.attenuation.mu_rr_db},
                        {"mu_tr_db", cfg.attenuation.mu_tr_db}};
    j["snr_db"] = cfg.snr_db;
    j["constellation_snr_db"] = cfg.constellation_snr_db;
    j["element_sweep"] = cfg.element_sweep;
    j["spacing_sweep"] = cfg.spacing_sweep;
    json methods = json::array();
    for (auto m : cfg.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    j["frames"] = cfg.frames;
    j["realizations"] = cfg.realizations;
    j["random_rotation_trials"] = cfg.random_rotation_trials;
    j["med_policy"] = {{"mode", cfg.med_policy.mode}, {"value", cfg.med_policy.value}};
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["threads"] = cfg.threads;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    check_no_unknown_keys(j,
                          {"grid", "n_r", "attenuation", "snr_db", "constellation_snr_db",
                           "element_sweep", "spacing_sweep", "methods", "frames", "realizations",
                           "random_rotation_trials", "med_policy", "seed", "out_dir", "threads"},
                          "config");
    ExperimentConfig cfg;
    try {
        if (j.contains("grid")) {
            check_no_unknown_keys(j.at("grid"), {"n_x", "n_y", "spacing"}, "config.grid");
            cfg.grid_n_x = j.at("grid").value("n_x", cfg.grid_n_x);
            cfg.grid_n_y = j.at("grid").value("n_y", cfg.grid_n_y);
            cfg.grid_spacing = j.at("grid").value("spacing", cfg.grid_spacing);
        }
        cfg.n_r = j.value("n_r", cfg.n_r);
        if (j.contains("attenuation")) {
            check_no_unknown_keys(j.at("attenuation"), {"mu_los_db", "mu_rr_db", "mu_tr_db"},
                                  "config.attenuation");
            cfg.attenuation.mu_los_db = j.at("attenuation").value("mu_los_db", cfg.attenuation.mu_los_db);
            cfg.attenuation.mu_rr_db = j.at("attenuation").value("mu_rr_db", cfg.attenuation.mu_rr_db);
            cfg.attenuation.mu_tr_db = j.at("attenuation").value("mu_tr_db", cfg.attenuation.mu_tr_db);
        }
        if (j.contains("snr_db")) cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
        cfg.constellation_snr_db = j.value("constellation_snr_db", cfg.constellation_snr_db);
        if (j.contains("element_sweep"))
            cfg.element_sweep = j.at("element_sweep").get<std::vector<int>>();
        if (j.contains("spacing_sweep"))
            cfg.spacing_sweep = j.at("spacing_sweep").get<std::vector<double>>();
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const auto& name : j.at("methods"))
                cfg.methods.push_back(method_from_name(name.get<std::string>()));
        }
        cfg.frames = j.value("frames", cfg.frames);
        cfg.realizations = j.value("realizations", cfg.realizations);
        cfg.random_rotation_trials = j.value("random_rotation_trials", cfg.random_rotation_trials);
        if (j.contains("med_policy")) {
            check_no_unknown_keys(j.at("med_policy"), {"mode", "value"}, "config.med_policy");
            cfg.med_policy.mode = j.at("med_policy").value("mode", cfg.med_policy.mode);
            cfg.med_policy.value = j.at("med_policy").value("value", cfg.med_policy.value);
        }
        cfg.seed = j.value("seed", cfg.seed);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    if (name == "fig3-small") {
        cfg.element_sweep = {64, 256};
        cfg.spacing_sweep = {0.125};
        cfg.realizations = 100;
        cfg.random_rotation_trials = 10000;
        return cfg;
    }
    if (name == "fig3-paper") {
        cfg.element_sweep = {64, 256, 1024};
        cfg.spacing_sweep = {0.5, 0.25, 0.125};
        cfg.realizations = 1000;
        cfg.random_rotation_trials = 10000;
        return cfg;
    }
    if (name == "fig5") {
        cfg.snr_db = {43, 44, 45, 46, 47, 48, 49};
        cfg.constellation_snr_db = 49.0;
        cfg.frames = 20000;
        cfg.realizations = 1;
        return cfg;
    }
    if (name == "fig6") {
        cfg.snr_db = {43, 44, 45, 46, 47, 48, 49};
        cfg.constellation_snr_db = 49.0;
        cfg.frames = 4000;
        cfg.realizations = 25;
        return cfg;
    }
    throw ConfigError("unknown preset \"" + name + "\"; available: fig3-small, fig3-paper, fig5, fig6");
}

std::vector<std::string> preset_names() { return {"fig3-small", "fig3-paper", "fig5", "fig6"}; }

std::uint64_t channel_seed_for_realization(const ExperimentConfig& cfg, int realization) {
    return derive_seed(derive_seed(cfg.seed, kChannelStream),
                       static_cast<std::uint64_t>(realization));
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "fnv1a-%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RreReport run_rre_bench(const ExperimentConfig& cfg) {
    cfg.validate();
    RreReport report;

    int cell_index = 0;
    for (int n : cfg.element_sweep) {
        const int side = square_side(n);
        for (double spacing : cfg.spacing_sweep) {
            const RisGrid grid = make_grid(side, side, spacing);
            const CorrelationMatrix corr = build_correlation_matrix(grid);

            const auto n_methods = cfg.methods.size();
            std::vector<std::vector<double>> rre(n_methods,
                                                 std::vector<double>(cfg.realizations, 0.0));
            std::vector<std::vector<double>> secs(n_methods,
                                                  std::vector<double>(cfg.realizations, 0.0));

            parallel_for(cfg.realizations, cfg.threads, [&](int r) {
                const std::uint64_t seed_r = derive_seed(
                    derive_seed(cfg.seed, kChannelStream),
                    static_cast<std::uint64_t>(cell_index) * static_cast<std::uint64_t>(cfg.realizations) +
                        static_cast<std::uint64_t>(r));
                const ChannelRealization ch = sample_channel(grid, cfg.attenuation, cfg.n_r, corr, seed_r);
                const EquivalentChannel eq = reduce_to_equivalent(ch);
                for (std::size_t m = 0; m < n_methods; ++m) {
                    const auto start = std::chrono::steady_clock::now();
                    const EchelonDecomposition dec =
                        decompose_with(cfg.methods[m], eq.Hcheck, cfg.random_rotation_trials,
                                       derive_seed(seed_r, kRotationStream));
                    const auto stop = std::chrono::steady_clock::now();
                    rre[m][static_cast<std::size_t>(r)] = dec.rre;
                    secs[m][static_cast<std::size_t>(r)] =
                        std::chrono::duration<double>(stop - start).count();
                }
            });

            for (std::size_t m = 0; m < n_methods; ++m) {
                RreCell cell;
                cell.n = n;
                cell.d_over_lambda = spacing;
                cell.method = cfg.methods[m];
                cell.realizations = cfg.realizations;
                cell.rre_mean = mean(rre[m]);
                cell.rre_median = quantile(rre[m], 0.5);
                cell.rre_p10 = quantile(rre[m], 0.1);
                cell.rre_p90 = quantile(rre[m], 0.9);
                cell.seconds_mean = mean(secs[m]);
                report.cells.push_back(cell);
            }
            ++cell_index;
        }
    }
    return report;
}

std::string rre_report_csv(const RreReport& report) {
    std::ostringstream out;
    out << "n,d_over_lambda,method,realizations,rre_mean,rre_median,rre_p10,rre_p90,seconds_mean\n";
    for (const RreCell& c : report.cells)
        out << c.n << ',' << format_double(c.d_over_lambda) << ',' << method_name(c.method) << ','
            << c.realizations << ',' << format_double(c.rre_mean) << ','
            << format_double(c.rre_median) << ',' << format_double(c.rre_p10) << ','
            << format_double(c.rre_p90) << ',' << format_double(c.seconds_mean) << '\n';
    return out.str();
}

ConstellationDump run_constellation_dump(const ExperimentConfig& cfg, std::uint64_t channel_seed) {
    cfg.validate();
    const RisGrid grid = make_grid(cfg.grid_n_x, cfg.grid_n_y, cfg.grid_spacing);
    const CorrelationMatrix corr = build_correlation_matrix(grid);
    const ChannelRealization ch = sample_channel(grid, cfg.attenuation, cfg.n_r, corr, channel_seed);
    const EquivalentChannel eq = reduce_to_equivalent(ch);

    const double med = cfg.med_policy.received_med();
    ConstellationDump dump;

    const auto emit_scheme = [&](const std::string& scheme, const EchelonDecomposition& dec) {
        const SubchannelPlan plan = plan_subchannels(dec, cfg.constellation_snr_db, med);
        double bits_total = 0.0;
        double card_product = 1.0;
        for (std::size_t s = 0; s < plan.entries.size(); ++s) {
            const SubchannelEntry& e = plan.entries[s];
            ConstellationSummaryRow row;
            row.scheme = scheme;
            row.subchannel = static_cast<int>(s) + 1;
            row.mode = e.mode == SubchannelMode::Annular ? "annular" : "circle";
            row.cardinality = static_cast<double>(e.cardinality());
            row.mod_order_bits = e.bits;
            dump.rows.push_back(row);
            bits_total += e.bits;
            card_product *= row.cardinality;

            const std::string name = scheme + "_sub" + std::to_string(s + 1) + ".csv";
            dump.files.emplace_back(name, e.mode == SubchannelMode::Annular
                                              ? annular_constellation_csv(e.annular)
                                              : psk_constellation_csv(e.psk));
        }
        ConstellationSummaryRow total;
        total.scheme = scheme;
        total.subchannel = 0;
        total.mode = "total";
        total.cardinality = plan.entries.empty() ? 0.0 : card_product;
        total.mod_order_bits = bits_total;
        dump.rows.push_back(total);
    };

    emit_scheme("gam", cp_decompose(eq));
    emit_scheme("qrsic", qr_decompose(eq));
    return dump;
}

std::string constellation_summary_csv(const std::vector<ConstellationSummaryRow>& rows) {
    std::ostringstream out;
    out << "scheme,subchannel,mode,cardinality,mod_order_bits\n";
    for (const auto& r : rows) {
        out << r.scheme << ',';
        if (r.subchannel == 0) out << "total";
        else out << r.subchannel;
        out << ',' << r.mode << ',' << format_double(r.cardinality) << ','
            << format_double(r.mod_order_bits) << '\n';
    }
    return out.str();
}

std::pair<SerReport, SerReport> run_ser_sim(const ExperimentConfig& cfg) {
    cfg.validate();
    const RisGrid grid = make_grid(cfg.grid_n_x, cfg.grid_n_y, cfg.grid_spacing);
    const CorrelationMatrix corr = build_correlation_matrix(grid);

    std::vector<EchelonDecomposition> gam_decs;
    std::vector<EchelonDecomposition> qr_decs;
    gam_decs.reserve(static_cast<std::size_t>(cfg.realizations));
    qr_decs.reserve(static_cast<std::size_t>(cfg.realizations));
    for (int r = 0; r < cfg.realizations; ++r) {
        const ChannelRealization ch = sample_channel(grid, cfg.attenuation, cfg.n_r, corr,
                                                     channel_seed_for_realization(cfg, r));
        const EquivalentChannel eq = reduce_to_equivalent(ch);
        gam_decs.push_back(cp_decompose(eq));
        qr_decs.push_back(qr_decompose(eq));
    }

    SerRunConfig run;
    run.snr_db = cfg.snr_db;
    run.frames = cfg.frames;
    run.constellation_snr_db = cfg.constellation_snr_db;
    run.med_target_rx = cfg.med_policy.received_med();
    run.seed = cfg.seed;

    return {monte_carlo_ser(gam_decs, run), monte_carlo_ser(qr_decs, run)};
}

std::string ser_report_csv(const SerReport& report) {
    std::ostringstream out;
    out << "snr_db,subchannel,mode,cardinality,mod_order_bits,trials,errors,ser_empirical,"
           "ser_theory,med_received\n";
    const auto emit = [&](double snr_db, const SubchannelStat& s) {
        out << format_double(snr_db) << ',';
        if (s.subchannel == 0) out << "aggregate";
        else out << s.subchannel;
        out << ',' << s.mode << ',' << format_double(s.cardinality) << ','
            << format_double(s.mod_order_bits) << ',' << s.trials << ',' << s.errors << ','
            << format_double(s.ser_empirical) << ',' << format_double(s.ser_theory) << ','
            << format_double(s.med_received) << '\n';
    };
    for (const SerPoint& point : report.points) {
        for (const SubchannelStat& s : point.sub) emit(point.snr_db, s);
        emit(point.snr_db, point.aggregate);
    }
    return out.str();
}

namespace {

json manifest_base(const std::string& command, const ExperimentConfig& cfg) {
    json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["config"] = config_to_json(cfg);
    manifest["config_hash"] = config_hash(cfg);
    manifest["seed"] = cfg.seed;
    return manifest;
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"link-level simulator for passive-surface symbiotic radio"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset_name;
    std::string out_override;
    std::uint64_t seed_override = 0;
    int threads_override = 0;
    app.add_option("--config", config_path, "JSON experiment config")->expected(1);
    app.add_option("--preset", preset_name, "named parameter set")->expected(1);
    app.add_option("--out", out_override, "output directory")->expected(1);
    app.add_option("--seed", seed_override, "master seed");
    app.add_option("--threads", threads_override, "parallelism cap");

    auto* rre_cmd = app.add_subcommand("rre-bench", "residual-error sweep over element counts");
    auto* ser_cmd = app.add_subcommand("ser-sim", "Monte Carlo symbol-error-rate sweep");
    auto* dump_cmd = app.add_subcommand("constellation-dump", "materialize constellations for one channel");
    std::uint64_t channel_seed = 0;
    dump_cmd->add_option("--channel-seed", channel_seed, "channel pin seed");
    auto* dec_cmd = app.add_subcommand("decompose", "factor a matrix file");
    std::string matrix_file;
    std::string method_name_arg = "cp";
    dec_cmd->add_option("matrix_file", matrix_file, "channel dump or {\"matrix\": ...} JSON")
        ->required();
    dec_cmd->add_option("--method", method_name_arg, "cp | qr | gram-schmidt | random-rotation");
    auto* gen_cmd = app.add_subcommand("channel-gen", "sample one channel and dump it");

    std::vector<const char*> argv;
    argv.push_back("gamsim");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return kExitConfig;
    }

    // preset < config file < command-line overrides
    ExperimentConfig cfg;
    if (!preset_name.empty() && !config_path.empty())
        throw ConfigError("--preset and --config are mutually exclusive");
    if (!preset_name.empty()) cfg = preset(preset_name);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot open config file " + config_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        cfg = config_from_json(j);
    }
    if (app.count("--seed") > 0) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (threads_override > 0) cfg.threads = threads_override;
    cfg.validate();

    const std::filesystem::path out_dir = ensure_out_dir(cfg.out_dir);

    if (*rre_cmd) {
        const RreReport report = run_rre_bench(cfg);
        write_file(out_dir / "rre_bench.csv", rre_report_csv(report));
        json manifest = manifest_base("rre-bench", cfg);
        write_file(out_dir / "rre_manifest.json", manifest.dump(2) + "\n");
        std::cout << "wrote " << (out_dir / "rre_bench.csv").string() << " ("
                  << report.cells.size() << " cells)\n";
        return kExitOk;
    }

    if (*ser_cmd) {
        const auto [gam, qr] = run_ser_sim(cfg);
        write_file(out_dir / "gam_ser.csv", ser_report_csv(gam));
        write_file(out_dir / "qrsic_ser.csv", ser_report_csv(qr));
        json manifest = manifest_base("ser-sim", cfg);
        manifest["realization_seeds"] = gam.realization_seeds;
        std::vector<std::uint64_t> channel_seeds;
        for (int r = 0; r < cfg.realizations; ++r)
            channel_seeds.push_back(channel_seed_for_realization(cfg, r));
        manifest["channel_seeds"] = channel_seeds;
        write_file(out_dir / "ser_manifest.json", manifest.dump(2) + "\n");
        std::cout << "wrote " << (out_dir / "gam_ser.csv").string() << " and "
                  << (out_dir / "qrsic_ser.csv").string() << "\n";
        return kExitOk;
    }

    if (*dump_cmd) {
        // default: the same channel ser-sim uses for its first realization
        const std::uint64_t pin = dump_cmd->count("--channel-seed") > 0
                                      ? channel_seed
                                      : channel_seed_for_realization(cfg, 0);
        const ConstellationDump dump = run_constellation_dump(cfg, pin);
        for (const auto& [name, content] : dump.files) write_file(out_dir / name, content);
        write_file(out_dir / "summary.csv", constellation_summary_csv(dump.rows));
        json manifest = manifest_base("constellation-dump", cfg);
        manifest["channel_seed"] = pin;
        write_file(out_dir / "constellation_manifest.json", manifest.dump(2) + "\n");
        std::cout << "wrote " << dump.files.size() << " constellation files and summary.csv\n";
        return kExitOk;
    }

    if (*dec_cmd) {
        std::ifstream in(matrix_file);
        if (!in) throw IoError("cannot open matrix file " + matrix_file);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("matrix file parse error: ") + e.what());
        }
        Eigen::MatrixXcd m;
        DecompositionMethod method;
        try {
            method = method_from_name(method_name_arg);
            m = matrix_from_json(j, 1e-10);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        const EchelonDecomposition dec =
            decompose_with(method, m, cfg.random_rotation_trials,
                           derive_seed(cfg.seed, kRotationStream));
        write_file(out_dir / "decomposition.json", decomposition_to_json(dec).dump(2) + "\n");
        std::cout << "method " << method_name(dec.method) << " rre " << format_double(dec.rre)
                  << "\n";
        return kExitOk;
    }

    if (*gen_cmd) {
        const RisGrid grid = make_grid(cfg.grid_n_x, cfg.grid_n_y, cfg.grid_spacing);
        const CorrelationMatrix corr = build_correlation_matrix(grid);
        const ChannelRealization ch =
            sample_channel(grid, cfg.attenuation, cfg.n_r, corr, cfg.seed);
        write_file(out_dir / "channel.json", channel_to_json(ch).dump() + "\n");
        std::cout << "wrote " << (out_dir / "channel.json").string() << "\n";
        return kExitOk;
    }

    return kExitConfig;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    try {
        return cli_main(args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace gamsim

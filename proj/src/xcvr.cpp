// SPDX-License-Identifier: Apache-2.0

#include "gamsim/xcvr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace gamsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_2pi(double theta) {
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    if (t >= 2.0 * kPi) t = 0.0;
    return t;
}

double snr_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

/// Adaptive Simpson quadrature, absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 48);
}

SubchannelEntry build_entry(const EchelonDecomposition& dec, int row, int pivot, int width,
                            double med_tx) {
    SubchannelEntry e;
    e.row = row;
    e.pivot = pivot;
    e.width = width;
    e.c1 = dec.C(row, pivot);
    e.c2 = width == 2 ? dec.C(row, pivot + 1) : std::complex<double>(0.0, 0.0);

    const auto make_rate_zero = [&](std::complex<double> fixed_point) {
        e.rate_zero = true;
        e.symbols = {fixed_point};
        e.phases = {{0.0, 0.0}};
        e.med_tx = std::numeric_limits<double>::infinity();
        e.bits = 0.0;
    };

    if (width == 2) {
        e.mode = SubchannelMode::Annular;
        if (std::abs(e.c1) == 0.0 || std::abs(e.c2) == 0.0) {
            // Degenerate pair; hold the phases at zero.
            make_rate_zero(e.c1 + e.c2);
            return e;
        }
        e.annular = enumerate_annulus(annulus_from_pair(e.c1, e.c2), med_tx);
        if (e.annular.points.empty()) {
            make_rate_zero(e.c1 + e.c2);
            return e;
        }
        if (e.annular.points.size() == 1) {
            make_rate_zero(e.annular.points[0].value);
            e.phases = {decompose_point(e.annular.points[0].value, e.c1, e.c2)};
            return e;
        }
        e.symbols.reserve(e.annular.points.size());
        e.phases.reserve(e.annular.points.size());
        for (const auto& pt : e.annular.points) {
            e.symbols.push_back(pt.value);
            e.phases.push_back(decompose_point(pt.value, e.c1, e.c2));
        }
        e.med_tx = e.annular.med;
    } else {
        e.mode = SubchannelMode::Circle;
        const double radius = std::abs(e.c1);
        if (radius == 0.0) {
            make_rate_zero({0.0, 0.0});
            return e;
        }
        e.psk = build_psk(radius, med_tx);
        e.med_deficient = e.psk.med_deficient;
        const double offset = std::arg(e.c1);
        e.symbols = e.psk.points;  // radius * e^{j 2 pi m / M}
        e.phases.reserve(e.psk.points.size());
        for (int m = 0; m < e.psk.order; ++m) {
            // c1 e^{j theta} lands on the canonical PSK point.
            e.phases.push_back({wrap_2pi(2.0 * kPi * m / e.psk.order - offset), 0.0});
        }
        e.med_tx = e.psk.med();
    }
    e.bits = std::log2(static_cast<double>(e.symbols.size()));
    return e;
}

}  // namespace

double q_function(double u) { return 0.5 * std::erfc(u / std::sqrt(2.0)); }

double med_for_annular_ser(double ser) {
    if (!(ser > 0.0) || ser >= 3.0) throw std::invalid_argument("med_for_annular_ser: need 0 < ser < 3");
    const double target_q = ser / 6.0;
    double lo = 0.0;
    double hi = 60.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (q_function(mid) > target_q) lo = mid;
        else hi = mid;
    }
    return std::sqrt(2.0) * 0.5 * (lo + hi);
}

SubchannelPlan plan_subchannels(const EchelonDecomposition& dec, double snr_db,
                                double med_target_rx) {
    if (!(med_target_rx > 0.0))
        throw std::invalid_argument("plan_subchannels: MED target must be positive");
    const int tau = dec.tau();
    const int nch = dec.n_check();
    if (tau < 1 || static_cast<int>(dec.pivots.size()) != tau)
        throw std::invalid_argument("plan_subchannels: invalid decomposition");

    SubchannelPlan plan;
    plan.dec = dec;
    plan.snr_ref_db = snr_db;
    plan.med_target_rx = med_target_rx;

    const double med_tx = med_target_rx / std::sqrt(snr_linear(snr_db));

    plan.entries.reserve(static_cast<std::size_t>(tau) - 1);
    for (int row = 0; row + 1 < tau; ++row) {
        const int pivot = dec.pivots[row];
        const int width = dec.pivots[row + 1] - pivot;
        if (width != 1 && width != 2)
            throw std::invalid_argument("plan_subchannels: pivot spacing must be 1 or 2");
        plan.entries.push_back(build_entry(dec, row, pivot, width, med_tx));
    }

    plan.beam_pivot = dec.pivots[tau - 1];
    plan.base_theta = Eigen::VectorXd::Zero(nch);
    plan.beam_gain = 0.0;
    for (int k = plan.beam_pivot; k < nch; ++k) {
        const std::complex<double> c = dec.C(tau - 1, k);
        plan.beam_gain += std::abs(c);
        plan.base_theta(k) = std::abs(c) > 0.0 ? wrap_2pi(-std::arg(c)) : 0.0;
    }
    if (!(plan.beam_gain > 0.0))
        throw std::domain_error("plan_subchannels: beamforming row has zero gain");
    return plan;
}

SymbolFrame modulate(const SubchannelPlan& plan, std::span<const std::int64_t> indices) {
    if (indices.size() != plan.entries.size())
        throw std::invalid_argument("modulate: one index per subchannel required");

    SymbolFrame frame;
    frame.indices.assign(indices.begin(), indices.end());
    frame.theta = plan.base_theta;
    frame.x = {1.0, 0.0};

    for (std::size_t s = 0; s < plan.entries.size(); ++s) {
        const SubchannelEntry& e = plan.entries[s];
        const std::int64_t idx = indices[s];
        if (idx < 0 || idx >= e.cardinality())
            throw std::invalid_argument("modulate: symbol index out of range");
        frame.theta(e.pivot) = e.phases[static_cast<std::size_t>(idx)].theta1;
        if (e.width == 2)
            frame.theta(e.pivot + 1) = e.phases[static_cast<std::size_t>(idx)].theta2;
    }
    return frame;
}

Eigen::VectorXcd transmit_and_receive(const SubchannelPlan& plan, const SymbolFrame& frame,
                                      double snr_db, Rng& rng, bool add_noise,
                                      Eigen::VectorXcd* y_check_out) {
    const int tau = plan.tau();
    Eigen::VectorXcd drive(frame.theta.size());
    for (Eigen::Index k = 0; k < frame.theta.size(); ++k)
        drive(k) = std::polar(1.0, frame.theta(k));

    Eigen::VectorXcd y_check =
        std::sqrt(snr_linear(snr_db)) * frame.x * (plan.dec.B * (plan.dec.C * drive));
    if (add_noise) y_check += rng.cgauss_vector(tau);
    if (y_check_out) *y_check_out = y_check;
    return plan.dec.B.adjoint() * y_check;
}

std::vector<std::int64_t> sic_demodulate(const SubchannelPlan& plan,
                                         const Eigen::Ref<const Eigen::VectorXcd>& received,
                                         double snr_db) {
    const int tau = plan.tau();
    const int nch = plan.n_check();
    if (received.size() != tau) throw std::invalid_argument("sic_demodulate: dimension mismatch");

    const double amp = std::sqrt(snr_linear(snr_db));
    Eigen::VectorXd theta_hat = plan.base_theta;  // beamforming phases known a priori
    std::vector<std::int64_t> decided(plan.entries.size(), 0);

    for (int s = static_cast<int>(plan.entries.size()) - 1; s >= 0; --s) {
        const SubchannelEntry& e = plan.entries[s];
        const int cancel_from = e.pivot + e.width;

        // x_check is known at the receiver and fixed to 1 by convention.
        std::complex<double> residue = received(e.row);
        for (int k = cancel_from; k < nch; ++k)
            residue -= amp * plan.dec.C(e.row, k) * std::polar(1.0, theta_hat(k));

        // ML demap against the scaled constellation.
        std::int64_t arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t m = 0; m < e.cardinality(); ++m) {
            const double dist = std::norm(residue - amp * e.symbols[static_cast<std::size_t>(m)]);
            if (dist < best) {
                best = dist;
                arg = m;
            }
        }
        decided[static_cast<std::size_t>(s)] = arg;

        // Record the canonical phases so rows above cancel this decision exactly.
        theta_hat(e.pivot) = e.phases[static_cast<std::size_t>(arg)].theta1;
        if (e.width == 2) theta_hat(e.pivot + 1) = e.phases[static_cast<std::size_t>(arg)].theta2;
    }
    return decided;
}

DofSummary dof_summary(int n_check, int tau) {
    if (tau < 1 || tau > n_check) throw std::invalid_argument("dof_summary: need 1 <= tau <= n_check");
    DofSummary dof;
    dof.gam = n_check >= 2 * tau - 1 ? static_cast<double>(tau) : 0.5 * (n_check + 1);
    dof.qr_sic = 1.0 + 0.5 * (tau - 1);
    dof.max = std::min(static_cast<double>(tau), 0.5 * (n_check + 1));
    return dof;
}

double ser_union_bound_annular(double med_received) {
    if (med_received < 0.0) throw std::invalid_argument("ser_union_bound_annular: negative MED");
    return std::min(1.0, 6.0 * q_function(med_received / std::sqrt(2.0)));
}

double ser_psk_reference(int order, double radius, double snr_linear_value) {
    if (order < 2) throw std::invalid_argument("ser_psk_reference: order must be >= 2");
    if (!(radius > 0.0) || snr_linear_value < 0.0)
        throw std::invalid_argument("ser_psk_reference: invalid radius or SNR");

    const double gamma = snr_linear_value * radius * radius;
    const double s2 = std::sin(kPi / order) * std::sin(kPi / order);
    const auto integrand = [&](double theta) {
        const double st = std::sin(theta);
        if (st <= 0.0) return 0.0;
        return std::exp(-gamma * s2 / (st * st));
    };
    return integrate(integrand, 0.0, kPi - kPi / order, 1e-10) / kPi;
}

SerReport monte_carlo_ser(std::span<const EchelonDecomposition> realizations,
                          const SerRunConfig& cfg) {
    if (realizations.empty()) throw std::invalid_argument("monte_carlo_ser: no realizations");
    if (cfg.frames < 0) throw std::invalid_argument("monte_carlo_ser: negative frame count");
    if (cfg.snr_db.empty()) throw std::invalid_argument("monte_carlo_ser: empty SNR list");

    SerReport report;
    report.seed = cfg.seed;
    report.frames = cfg.frames;

    struct Accum {
        std::int64_t trials = 0;
        std::int64_t errors = 0;
        double theory = 0.0;
        double med = 0.0;
        int live = 0;  ///< realizations where the subchannel carries data
        double cardinality = 0.0;
        double bits = 0.0;
        int mode_annular = 0;
        int contributions = 0;
    };
    const std::size_t n_snr = cfg.snr_db.size();
    std::vector<std::vector<Accum>> acc(n_snr);

    for (std::size_t r = 0; r < realizations.size(); ++r) {
        const std::uint64_t realization_seed = derive_seed(cfg.seed, r);
        report.realization_seeds.push_back(realization_seed);
        const SubchannelPlan plan =
            plan_subchannels(realizations[r], cfg.constellation_snr_db, cfg.med_target_rx);
        const std::size_t n_sub = plan.entries.size();

        for (std::size_t si = 0; si < n_snr; ++si) {
            auto& slot = acc[si];
            if (slot.size() < n_sub) slot.resize(n_sub);
            const double snr_db = cfg.snr_db[si];
            const double amp = std::sqrt(snr_linear(snr_db));

            for (std::size_t s = 0; s < n_sub; ++s) {
                const SubchannelEntry& e = plan.entries[s];
                Accum& a = slot[s];
                a.cardinality += static_cast<double>(e.cardinality());
                a.bits += e.bits;
                a.mode_annular += e.mode == SubchannelMode::Annular ? 1 : 0;
                a.contributions += 1;
                if (e.rate_zero) continue;  // fixed point: no MED, no errors
                const double med_rx = amp * e.med_tx;
                a.med += med_rx;
                a.live += 1;
                a.theory += e.mode == SubchannelMode::Annular
                                ? ser_union_bound_annular(med_rx)
                                : ser_psk_reference(e.psk.order, e.psk.radius,
                                                    snr_linear(snr_db));
            }

            std::vector<std::int64_t> tx(n_sub);
            for (std::int64_t f = 0; f < cfg.frames; ++f) {
                Rng rng(derive_seed(realization_seed,
                                    static_cast<std::uint64_t>(si) * static_cast<std::uint64_t>(cfg.frames) +
                                        static_cast<std::uint64_t>(f)));
                for (std::size_t s = 0; s < n_sub; ++s)
                    tx[s] = rng.uniform_index(plan.entries[s].cardinality());
                const SymbolFrame frame = modulate(plan, tx);
                const Eigen::VectorXcd y = transmit_and_receive(plan, frame, snr_db, rng, cfg.noise);
                const std::vector<std::int64_t> rx = sic_demodulate(plan, y, snr_db);
                for (std::size_t s = 0; s < n_sub; ++s) {
                    slot[s].trials += 1;
                    if (rx[s] != tx[s]) slot[s].errors += 1;
                }
            }
        }
    }

    for (std::size_t si = 0; si < n_snr; ++si) {
        SerPoint point;
        point.snr_db = cfg.snr_db[si];
        point.aggregate.subchannel = 0;
        point.aggregate.mode = "aggregate";
        double card_product = 1.0;
        double med_min = std::numeric_limits<double>::infinity();
        double theory_sum = 0.0;
        std::int64_t theory_weight = 0;
        for (std::size_t s = 0; s < acc[si].size(); ++s) {
            const Accum& a = acc[si][s];
            if (a.contributions == 0) continue;
            SubchannelStat stat;
            stat.subchannel = static_cast<int>(s) + 1;
            stat.mode = a.mode_annular * 2 > a.contributions ? "annular" : "circle";
            stat.cardinality = a.cardinality / a.contributions;
            stat.mod_order_bits = a.bits / a.contributions;
            stat.trials = a.trials;
            stat.errors = a.errors;
            stat.ser_empirical = a.trials > 0 ? static_cast<double>(a.errors) / a.trials : 0.0;
            stat.ser_theory = a.live > 0 ? a.theory / a.live : 0.0;
            stat.med_received =
                a.live > 0 ? a.med / a.live : std::numeric_limits<double>::infinity();
            point.sub.push_back(stat);

            card_product *= stat.cardinality;
            med_min = std::min(med_min, stat.med_received);
            point.aggregate.trials += stat.trials;
            point.aggregate.errors += stat.errors;
            point.aggregate.mod_order_bits += stat.mod_order_bits;
            theory_sum += stat.ser_theory * static_cast<double>(stat.trials);
            theory_weight += stat.trials;
        }
        point.aggregate.cardinality = point.sub.empty() ? 0.0 : card_product;
        point.aggregate.med_received = point.sub.empty() ? 0.0 : med_min;
        point.aggregate.ser_empirical =
            point.aggregate.trials > 0
                ? static_cast<double>(point.aggregate.errors) / point.aggregate.trials
                : 0.0;
        point.aggregate.ser_theory = theory_weight > 0 ? theory_sum / theory_weight : 0.0;
        report.points.push_back(std::move(point));
    }
    return report;
}

}  // namespace gamsim

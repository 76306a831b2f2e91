// SPDX-License-Identifier: Apache-2.0

#include "gamsim/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace gamsim {

namespace {

using nlohmann::json;

json complex_pairs(const Eigen::Ref<const Eigen::MatrixXcd>& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out.push_back({m(r, c).real(), m(r, c).imag()});
    return out;
}

Eigen::MatrixXcd pairs_to_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                                 const std::string& name) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
        throw std::invalid_argument(name + ": expected " + std::to_string(rows * cols) +
                                    " [re, im] pairs");
    Eigen::MatrixXcd m(rows, cols);
    Eigen::Index idx = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c, ++idx) {
            const json& p = j[static_cast<std::size_t>(idx)];
            if (!p.is_array() || p.size() != 2)
                throw std::invalid_argument(name + ": element is not a [re, im] pair");
            m(r, c) = {p[0].get<double>(), p[1].get<double>()};
        }
    return m;
}

}  // namespace

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    // shortest representation that round-trips
    char buf[40];
    std::string best;
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value &&
            (best.empty() || std::strlen(buf) < best.size()))
            best = buf;
    }
    return best.empty() ? buf : best;
}

json channel_to_json(const ChannelRealization& ch) {
    json j;
    j["n_R"] = ch.H.rows();
    j["n"] = ch.H.cols();
    j["grid"] = {{"n_x", ch.grid.n_x}, {"n_y", ch.grid.n_y}, {"spacing", ch.grid.spacing}};
    j["attenuation"] = {{"mu_los_db", ch.attenuation.mu_los_db},
                        {"mu_rr_db", ch.attenuation.mu_rr_db},
                        {"mu_tr_db", ch.attenuation.mu_tr_db}};
    j["H"] = complex_pairs(ch.H);
    j["g"] = complex_pairs(ch.g);
    j["d"] = complex_pairs(ch.d);
    j["seed"] = ch.seed;
    return j;
}

ChannelRealization channel_from_json(const json& j) {
    ChannelRealization ch;
    const auto n_r = j.at("n_R").get<Eigen::Index>();
    const auto n = j.at("n").get<Eigen::Index>();
    if (n_r < 1 || n < 1) throw std::invalid_argument("channel: dimensions must be positive");
    const json& grid = j.at("grid");
    ch.grid = make_grid(grid.at("n_x").get<int>(), grid.at("n_y").get<int>(),
                        grid.at("spacing").get<double>());
    if (j.contains("attenuation")) {
        const json& att = j.at("attenuation");
        ch.attenuation.mu_los_db = att.at("mu_los_db").get<double>();
        ch.attenuation.mu_rr_db = att.at("mu_rr_db").get<double>();
        ch.attenuation.mu_tr_db = att.at("mu_tr_db").get<double>();
    }
    ch.H = pairs_to_matrix(j.at("H"), n_r, n, "H");
    ch.g = pairs_to_matrix(j.at("g"), n, 1, "g");
    ch.d = pairs_to_matrix(j.at("d"), n_r, 1, "d");
    ch.seed = j.value("seed", std::uint64_t{0});
    return ch;
}

json decomposition_to_json(const EchelonDecomposition& dec) {
    json j;
    j["method"] = method_name(dec.method);
    j["B"] = complex_pairs(dec.B);
    j["P"] = dec.perm;
    j["C"] = complex_pairs(dec.C);
    j["pivots"] = dec.pivots;
    j["rre"] = dec.rre;
    return j;
}

EchelonDecomposition decomposition_from_json(const json& j) {
    EchelonDecomposition dec;
    dec.method = method_from_name(j.at("method").get<std::string>());
    dec.perm = j.at("P").get<std::vector<int>>();
    dec.pivots = j.at("pivots").get<std::vector<int>>();
    const auto tau = static_cast<Eigen::Index>(dec.pivots.size());
    const auto nch = static_cast<Eigen::Index>(dec.perm.size());
    if (tau < 1 || nch < tau) throw std::invalid_argument("decomposition: bad dimensions");
    dec.B = pairs_to_matrix(j.at("B"), tau, tau, "B");
    dec.C = pairs_to_matrix(j.at("C"), tau, nch, "C");
    dec.rre = j.at("rre").get<double>();
    return dec;
}

Eigen::MatrixXcd matrix_from_json(const json& j, double rank_tolerance) {
    if (j.contains("H") && j.contains("g") && j.contains("d"))
        return reduce_to_equivalent(channel_from_json(j), rank_tolerance).Hcheck;
    if (!j.contains("matrix"))
        throw std::invalid_argument("matrix file: expected a channel dump or a \"matrix\" key");
    const json& rows = j.at("matrix");
    if (!rows.is_array() || rows.empty() || !rows[0].is_array())
        throw std::invalid_argument("matrix: expected an array of rows");
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = static_cast<Eigen::Index>(rows[0].size());
    Eigen::MatrixXcd m(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != n_cols)
            throw std::invalid_argument("matrix: ragged rows");
        for (Eigen::Index c = 0; c < n_cols; ++c) {
            const json& p = row[static_cast<std::size_t>(c)];
            if (!p.is_array() || p.size() != 2)
                throw std::invalid_argument("matrix: element is not a [re, im] pair");
            m(r, c) = {p[0].get<double>(), p[1].get<double>()};
        }
    }
    return m;
}

std::string annular_constellation_csv(const AnnularConstellation& cst) {
    std::ostringstream out;
    out << "k,z1,z2,re,im,modulus\n";
    for (const auto& pt : cst.points)
        out << pt.k << ',' << pt.z1 << ',' << pt.z2 << ',' << format_double(pt.value.real())
            << ',' << format_double(pt.value.imag()) << ',' << format_double(std::abs(pt.value))
            << '\n';
    return out.str();
}

std::string psk_constellation_csv(const PskConstellation& psk) {
    std::ostringstream out;
    out << "k,z1,z2,re,im,modulus\n";
    for (std::size_t m = 0; m < psk.points.size(); ++m)
        out << "-1," << m << ",0," << format_double(psk.points[m].real()) << ','
            << format_double(psk.points[m].imag()) << ','
            << format_double(std::abs(psk.points[m])) << '\n';
    return out.str();
}

}  // namespace gamsim

// SPDX-License-Identifier: Apache-2.0

#ifndef GAMSIM_SERIALIZE_HPP
#define GAMSIM_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "gamsim/corrchan.hpp"
#include "gamsim/echelon.hpp"
#include "gamsim/hexlat.hpp"
#include "gamsim/xcvr.hpp"

namespace gamsim {

/// Shortest round-trip decimal form of a double, for byte-stable CSV output.
std::string format_double(double value);

/// Complex numbers serialize as [re, im]; matrices as row-major pair lists.
nlohmann::json channel_to_json(const ChannelRealization& ch);
ChannelRealization channel_from_json(const nlohmann::json& j);

nlohmann::json decomposition_to_json(const EchelonDecomposition& dec);
EchelonDecomposition decomposition_from_json(const nlohmann::json& j);

/// Accepts either a channel dump (reduced first) or a bare {"matrix": rows of
/// [re, im] pairs} object, and returns the matrix to decompose.
Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j, double rank_tolerance);

/// CSV dump of an annular constellation: header k,z1,z2,re,im,modulus.
std::string annular_constellation_csv(const AnnularConstellation& cst);

/// Same column layout for PSK points: k = -1 marks off-lattice, z1 carries
/// the symbol index.
std::string psk_constellation_csv(const PskConstellation& psk);

}  // namespace gamsim

#endif  // GAMSIM_SERIALIZE_HPP

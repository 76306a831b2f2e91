// SPDX-License-Identifier: Apache-2.0

#ifndef GAMSIM_ECHELON_HPP
#define GAMSIM_ECHELON_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gamsim/corrchan.hpp"

namespace gamsim {

enum class DecompositionMethod { CP, QR, RandomRotation, GramSchmidt };

std::string method_name(DecompositionMethod method);
DecompositionMethod method_from_name(const std::string& name);

/// Factorization Hcheck = B C P^H: unitary rotation B (tau x tau), coefficient
/// matrix C (tau x n_check), and a column permutation.
///
/// The permutation is stored as the index array `perm`: column j of
/// Hcheck * P is column perm[j] of Hcheck (0-based). `pivots[i]` is the
/// 0-based column of C that row i targets as its first nonzero entry.
struct EchelonDecomposition {
    Eigen::MatrixXcd B;
    Eigen::MatrixXcd C;
    std::vector<int> perm;
    std::vector<int> pivots;
    DecompositionMethod method = DecompositionMethod::QR;
    double rre = 0.0;

    std::int64_t pair_evaluations = 0;   ///< CP only: pair scorings performed
    std::vector<int> skipped_columns;    ///< Gram-Schmidt only: zero columns skipped

    int tau() const { return static_cast<int>(C.rows()); }
    int n_check() const { return static_cast<int>(C.cols()); }
};

/// Best rank-one direction for a column pair (the dominant left singular
/// direction of [a1, a2]) plus the energy it cannot capture.
struct PairChoice {
    int i = 0;
    int j = 0;
    Eigen::VectorXcd basis;
    double error = 0.0;
};

/// Solves the 2x2 Gram eigenproblem of A = [a1, a2] in closed form and
/// returns the unit basis with the total projection error
/// ||a1 - (b^H a1) b||^2 + ||a2 - (b^H a2) b||^2 = ||A||_F^2 - lambda_max.
PairChoice pair_residual(const Eigen::Ref<const Eigen::VectorXcd>& a1,
                         const Eigen::Ref<const Eigen::VectorXcd>& a2);

/// Target row structure shared by the stepped-form methods: rows that get a
/// column pair take two adjacent positions, budget-limited so every later row
/// still receives at least one column; the last row owns the tail.
/// Returns per-row widths (2 or 1) for rows 0..tau-1.
std::vector<int> stepped_row_widths(int n_check, int tau);

/// Greedy least-residual pairing: per step scores every remaining unordered
/// column pair, keeps the best rank-one direction as the next basis vector,
/// moves the pair to the front of the permutation, and deflates the residual.
EchelonDecomposition cp_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck);
EchelonDecomposition cp_decompose(const EquivalentChannel& eq);

/// Householder QR with the diagonal phase absorbed into B, identity permutation.
EchelonDecomposition qr_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck);
EchelonDecomposition qr_decompose(const EquivalentChannel& eq);

/// Best of `trials` Haar rotations; the permutation is chosen greedily per
/// candidate by placing each row's largest-magnitude entries on its pivot
/// positions, earliest rows first, without column reuse.
EchelonDecomposition random_rotation_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck,
                                               int trials, std::uint64_t seed);
EchelonDecomposition random_rotation_decompose(const EquivalentChannel& eq, int trials,
                                               std::uint64_t seed);

/// Takes the first remaining nonzero column as each basis vector, removes it
/// together with its natural successor, and deflates the rest.
EchelonDecomposition gram_schmidt_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck);
EchelonDecomposition gram_schmidt_decompose(const EquivalentChannel& eq);

/// Energy of the entries that the stepped form wants to be zero,
/// sum_{i>=2} sum_{j<=2(i-1)} |c_ij|^2, normalized by ||C||_F^2.
double relative_residual_error(const EchelonDecomposition& dec);

}  // namespace gamsim

#endif  // GAMSIM_ECHELON_HPP

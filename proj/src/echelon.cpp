// SPDX-License-Identifier: Apache-2.0

#include "gamsim/echelon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gamsim/random.hpp"

namespace gamsim {

namespace {

constexpr double kZeroColumnFactor = 1e-14;  // columns below this * ||H||_F are not paired

/// Larger eigenvalue of the Hermitian 2x2 [[g11, g12], [conj(g12), g22]].
double gram_lambda_max(double g11, double g22, double g12_abs) {
    return 0.5 * ((g11 + g22) + std::hypot(g11 - g22, 2.0 * g12_abs));
}

double gram_pair_error(double g11, double g22, double g12_abs) {
    return std::max(0.0, 0.5 * ((g11 + g22) - std::hypot(g11 - g22, 2.0 * g12_abs)));
}

/// Orthonormality refresh of v against the first `count` columns of B.
void reorthogonalize(const Eigen::MatrixXcd& B, int count, Eigen::VectorXcd& v) {
    if (count <= 0) return;
    const auto Bk = B.leftCols(count);
    v -= Bk * (Bk.adjoint() * v);
    v -= Bk * (Bk.adjoint() * v);
}

/// Fills columns [filled, tau) of B with an orthonormal complement. The
/// Gaussian draws use a fixed internal seed so the decomposition stays a pure
/// function of its input.
void complete_unitary(Eigen::MatrixXcd& B, int filled) {
    const int tau = static_cast<int>(B.rows());
    Rng rng(0x5EEDBA5Eu);
    for (int t = filled; t < tau; ++t) {
        for (;;) {
            Eigen::VectorXcd v = rng.cgauss_vector(tau);
            reorthogonalize(B, t, v);
            const double norm = v.norm();
            if (norm > 1e-8) {
                B.col(t) = v / norm;
                break;
            }
        }
    }
}

Eigen::MatrixXcd permute_columns(const Eigen::Ref<const Eigen::MatrixXcd>& H,
                                 const std::vector<int>& perm) {
    Eigen::MatrixXcd out(H.rows(), H.cols());
    for (std::size_t j = 0; j < perm.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = H.col(perm[j]);
    return out;
}

void finalize(EchelonDecomposition& dec, const Eigen::Ref<const Eigen::MatrixXcd>& H) {
    dec.C = dec.B.adjoint() * permute_columns(H, dec.perm);
    dec.rre = relative_residual_error(dec);
}

std::vector<int> ascending_leftovers(const std::vector<int>& front, int n_check) {
    std::vector<char> used(n_check, 0);
    for (int c : front) used[c] = 1;
    std::vector<int> out = front;
    out.reserve(n_check);
    for (int c = 0; c < n_check; ++c)
        if (!used[c]) out.push_back(c);
    return out;
}

}  // namespace

std::string method_name(DecompositionMethod method) {
    switch (method) {
        case DecompositionMethod::CP: return "cp";
        case DecompositionMethod::QR: return "qr";
        case DecompositionMethod::RandomRotation: return "random-rotation";
        case DecompositionMethod::GramSchmidt: return "gram-schmidt";
    }
    throw std::logic_error("unknown method");
}

DecompositionMethod method_from_name(const std::string& name) {
    if (name == "cp") return DecompositionMethod::CP;
    if (name == "qr") return DecompositionMethod::QR;
    if (name == "random-rotation") return DecompositionMethod::RandomRotation;
    if (name == "gram-schmidt") return DecompositionMethod::GramSchmidt;
    throw std::invalid_argument("unknown decomposition method: " + name);
}

PairChoice pair_residual(const Eigen::Ref<const Eigen::VectorXcd>& a1,
                         const Eigen::Ref<const Eigen::VectorXcd>& a2) {
    if (a1.size() != a2.size()) throw std::invalid_argument("pair_residual: size mismatch");
    const double g11 = a1.squaredNorm();
    const double g22 = a2.squaredNorm();
    const std::complex<double> g12 = a1.dot(a2);  // a1^H a2
    if (g11 + g22 <= 0.0) throw std::invalid_argument("pair_residual: both vectors are zero");

    const double lam = gram_lambda_max(g11, g22, std::abs(g12));

    // Eigenvector of the 2x2 Gram matrix for lam; take the better-conditioned row.
    const std::complex<double> cand1[2] = {g12, {lam - g11, 0.0}};
    const std::complex<double> cand2[2] = {{lam - g22, 0.0}, std::conj(g12)};
    const double n1 = std::norm(cand1[0]) + std::norm(cand1[1]);
    const double n2 = std::norm(cand2[0]) + std::norm(cand2[1]);

    std::complex<double> v1;
    std::complex<double> v2;
    if (std::max(n1, n2) <= 1e-30 * (g11 + g22) * (g11 + g22)) {
        // Diagonal Gram with equal eigenvalues: either column is dominant.
        v1 = g11 >= g22 ? 1.0 : 0.0;
        v2 = g11 >= g22 ? 0.0 : 1.0;
    } else if (n1 >= n2) {
        v1 = cand1[0];
        v2 = cand1[1];
    } else {
        v1 = cand2[0];
        v2 = cand2[1];
    }

    PairChoice choice;
    choice.basis = v1 * a1 + v2 * a2;
    const double norm = choice.basis.norm();
    if (norm <= 0.0) {
        choice.basis = g11 >= g22 ? a1 / std::sqrt(g11) : a2 / std::sqrt(g22);
    } else {
        choice.basis /= norm;
    }
    choice.error = std::max(0.0, g11 + g22 - lam);
    return choice;
}

std::vector<int> stepped_row_widths(int n_check, int tau) {
    if (tau < 1 || n_check < tau)
        throw std::invalid_argument("stepped_row_widths: need 1 <= tau <= n_check");
    std::vector<int> widths(tau, 1);
    // Pair only while every later row can still receive a column of its own;
    // this reproduces the annular/circle split of the two DoF cases.
    for (int t = 0; t < tau; ++t)
        if (t + 1 <= n_check - tau) widths[t] = 2;
    return widths;
}

EchelonDecomposition cp_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck) {
    const int tau = static_cast<int>(Hcheck.rows());
    const int nch = static_cast<int>(Hcheck.cols());
    if (tau < 1 || nch < 1) throw std::invalid_argument("cp_decompose: empty matrix");
    if (nch < tau) throw std::invalid_argument("cp_decompose: more rows than columns");

    EchelonDecomposition dec;
    dec.method = DecompositionMethod::CP;
    dec.B.resize(tau, tau);

    const std::vector<int> widths = stepped_row_widths(nch, tau);
    const double zero_threshold = kZeroColumnFactor * Hcheck.norm();

    Eigen::MatrixXcd A = Hcheck;  // residual, deflated in place
    std::vector<int> remaining(nch);
    for (int c = 0; c < nch; ++c) remaining[c] = c;
    std::vector<int> front;
    front.reserve(2 * tau);
    dec.pivots.resize(tau);

    int filled = 0;
    for (int t = 0; t < tau; ++t) {
        dec.pivots[t] = static_cast<int>(front.size());

        std::vector<int> eligible;
        eligible.reserve(remaining.size());
        for (int c : remaining)
            if (A.col(c).norm() >= zero_threshold) eligible.push_back(c);

        Eigen::VectorXcd basis;
        if (widths[t] == 2 && eligible.size() >= 2) {
            // Gram matrix of the eligible residual columns; every pair is
            // scored in closed form from it.
            const int m = static_cast<int>(eligible.size());
            Eigen::MatrixXcd Ae(tau, m);
            for (int c = 0; c < m; ++c) Ae.col(c) = A.col(eligible[c]);
            const Eigen::MatrixXcd G = Ae.adjoint() * Ae;

            int best_p = 0;
            int best_q = 1;
            double best_err = std::numeric_limits<double>::infinity();
            for (int p = 0; p < m; ++p) {
                const double gpp = G(p, p).real();
                for (int q = p + 1; q < m; ++q) {
                    const double err = gram_pair_error(gpp, G(q, q).real(), std::abs(G(p, q)));
                    ++dec.pair_evaluations;
                    if (err < best_err) {  // ties keep the lexicographically first pair
                        best_err = err;
                        best_p = p;
                        best_q = q;
                    }
                }
            }

            const int ci = eligible[best_p];
            const int cj = eligible[best_q];
            PairChoice choice = pair_residual(A.col(ci), A.col(cj));
            basis = std::move(choice.basis);
            reorthogonalize(dec.B, filled, basis);
            basis.normalize();

            // Larger pivot coefficient goes first within the pair.
            const double wi = std::abs(basis.dot(A.col(ci)));
            const double wj = std::abs(basis.dot(A.col(cj)));
            if (wi >= wj) {
                front.push_back(ci);
                front.push_back(cj);
            } else {
                front.push_back(cj);
                front.push_back(ci);
            }
            remaining.erase(std::remove_if(remaining.begin(), remaining.end(),
                                           [&](int c) { return c == ci || c == cj; }),
                            remaining.end());
        } else if (!eligible.empty()) {
            // Not enough room for a pair: take the strongest residual column.
            int sel = eligible[0];
            double best_norm = A.col(sel).norm();
            for (int c : eligible) {
                const double norm = A.col(c).norm();
                if (norm > best_norm) {
                    best_norm = norm;
                    sel = c;
                }
            }
            basis = A.col(sel) / best_norm;
            reorthogonalize(dec.B, filled, basis);
            basis.normalize();
            front.push_back(sel);
            remaining.erase(std::remove(remaining.begin(), remaining.end(), sel), remaining.end());
        } else {
            break;  // residual vanished early; complete the basis below
        }

        dec.B.col(filled++) = basis;
        A -= basis * (basis.adjoint() * A);
    }

    complete_unitary(dec.B, filled);
    for (int t = filled; t < tau; ++t)
        dec.pivots[t] = std::min(static_cast<int>(front.size()), nch - 1);

    dec.perm = ascending_leftovers(front, nch);
    finalize(dec, Hcheck);
    return dec;
}

EchelonDecomposition qr_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck) {
    const int tau = static_cast<int>(Hcheck.rows());
    const int nch = static_cast<int>(Hcheck.cols());
    if (tau < 1 || nch < tau) throw std::invalid_argument("qr_decompose: need tau <= n_check");

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Hcheck);
    Eigen::MatrixXcd B = qr.householderQ() * Eigen::MatrixXcd::Identity(tau, tau);
    Eigen::MatrixXcd C = qr.matrixQR().topRows(tau);
    for (int j = 0; j < std::min(tau, nch); ++j)
        for (int i = j + 1; i < tau; ++i) C(i, j) = 0.0;  // stored reflectors

    // Absorb the diagonal phase into B so pivots are real positive.
    for (int i = 0; i < tau; ++i) {
        const std::complex<double> z = C(i, i);
        const double mag = std::abs(z);
        if (mag <= 0.0) continue;
        const std::complex<double> phase = z / mag;
        C.row(i) *= std::conj(phase);
        C(i, i) = mag;
        B.col(i) *= phase;
    }

    EchelonDecomposition dec;
    dec.method = DecompositionMethod::QR;
    dec.B = std::move(B);
    dec.C = std::move(C);
    dec.perm.resize(nch);
    for (int c = 0; c < nch; ++c) dec.perm[c] = c;
    dec.pivots.resize(tau);
    for (int i = 0; i < tau; ++i) dec.pivots[i] = i;
    dec.rre = relative_residual_error(dec);
    return dec;
}

EchelonDecomposition random_rotation_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck,
                                               int trials, std::uint64_t seed) {
    const int tau = static_cast<int>(Hcheck.rows());
    const int nch = static_cast<int>(Hcheck.cols());
    if (trials < 1) throw std::invalid_argument("random_rotation_decompose: trials must be >= 1");
    if (tau < 1 || nch < tau)
        throw std::invalid_argument("random_rotation_decompose: need tau <= n_check");

    const std::vector<int> widths = stepped_row_widths(nch, tau);
    Rng rng(seed);

    Eigen::MatrixXcd best_B;
    std::vector<std::vector<int>> best_sel;
    double best_num = std::numeric_limits<double>::infinity();

    std::vector<char> used(nch);
    for (int trial = 0; trial < trials; ++trial) {
        // Haar rotation: QR of a Ginibre draw with the R-diagonal phases folded in.
        Eigen::MatrixXcd Z = rng.cgauss_matrix(tau, tau);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
        Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(tau, tau);
        for (int i = 0; i < tau; ++i) {
            const std::complex<double> r = qr.matrixQR()(i, i);
            const double mag = std::abs(r);
            if (mag > 0.0) Q.col(i) *= r / mag;
        }

        const Eigen::MatrixXcd M = Q.adjoint() * Hcheck;

        // Greedy pivot placement: each row grabs its strongest unused columns.
        std::fill(used.begin(), used.end(), 0);
        std::vector<std::vector<int>> sel(tau);
        for (int r = 0; r < tau; ++r) {
            for (int pick = 0; pick < widths[r]; ++pick) {
                int arg = -1;
                double best_mag = -1.0;
                for (int c = 0; c < nch; ++c) {
                    if (used[c]) continue;
                    const double mag = std::abs(M(r, c));
                    if (mag > best_mag) {
                        best_mag = mag;
                        arg = c;
                    }
                }
                used[arg] = 1;
                sel[r].push_back(arg);
            }
        }

        double num = 0.0;
        for (int i = 1; i < tau; ++i)
            for (int r = 0; r < i; ++r)
                for (int c : sel[r]) num += std::norm(M(i, c));

        if (num < best_num) {
            best_num = num;
            best_B = Q;
            best_sel = sel;
        }
    }

    EchelonDecomposition dec;
    dec.method = DecompositionMethod::RandomRotation;
    dec.B = std::move(best_B);
    dec.pivots.resize(tau);
    std::vector<int> front;
    front.reserve(2 * tau);
    for (int r = 0; r < tau; ++r) {
        dec.pivots[r] = static_cast<int>(front.size());
        for (int c : best_sel[r]) front.push_back(c);
    }
    dec.perm = ascending_leftovers(front, nch);
    finalize(dec, Hcheck);
    return dec;
}

EchelonDecomposition gram_schmidt_decompose(const Eigen::Ref<const Eigen::MatrixXcd>& Hcheck) {
    const int tau = static_cast<int>(Hcheck.rows());
    const int nch = static_cast<int>(Hcheck.cols());
    if (tau < 1 || nch < tau)
        throw std::invalid_argument("gram_schmidt_decompose: need tau <= n_check");

    EchelonDecomposition dec;
    dec.method = DecompositionMethod::GramSchmidt;
    dec.B.resize(tau, tau);

    const std::vector<int> widths = stepped_row_widths(nch, tau);
    const double zero_threshold = kZeroColumnFactor * Hcheck.norm();

    Eigen::MatrixXcd A = Hcheck;
    std::vector<int> remaining(nch);
    for (int c = 0; c < nch; ++c) remaining[c] = c;
    std::vector<int> front;
    dec.pivots.resize(tau);

    int filled = 0;
    for (int t = 0; t < tau; ++t) {
        dec.pivots[t] = static_cast<int>(front.size());

        // First remaining column with nonvanishing residual becomes the basis.
        std::size_t sel_slot = remaining.size();
        for (std::size_t s = 0; s < remaining.size(); ++s) {
            if (A.col(remaining[s]).norm() >= zero_threshold) {
                sel_slot = s;
                break;
            }
            dec.skipped_columns.push_back(remaining[s]);
        }
        if (sel_slot == remaining.size()) break;  // nothing usable left

        const int sel = remaining[sel_slot];
        Eigen::VectorXcd basis = A.col(sel) / A.col(sel).norm();
        reorthogonalize(dec.B, filled, basis);
        basis.normalize();
        dec.B.col(filled++) = basis;

        front.push_back(sel);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(sel_slot));
        if (widths[t] == 2 && sel_slot < remaining.size()) {
            // Natural successor shares the pivot pair.
            front.push_back(remaining[sel_slot]);
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(sel_slot));
        }

        A -= basis * (basis.adjoint() * A);
    }

    complete_unitary(dec.B, filled);
    for (int t = filled; t < tau; ++t)
        dec.pivots[t] = std::min(static_cast<int>(front.size()), nch - 1);

    dec.perm = ascending_leftovers(front, nch);
    finalize(dec, Hcheck);
    return dec;
}

double relative_residual_error(const EchelonDecomposition& dec) {
    const double total = dec.C.squaredNorm();
    if (total <= 0.0) throw std::invalid_argument("relative_residual_error: zero-energy matrix");
    const int tau = dec.tau();
    const int nch = dec.n_check();
    double num = 0.0;
    for (int i = 1; i < tau; ++i) {
        const int limit = std::min(2 * i, nch);  // columns 1..2(i-1), 1-based
        for (int j = 0; j < limit; ++j) num += std::norm(dec.C(i, j));
    }
    return num / total;
}

EchelonDecomposition cp_decompose(const EquivalentChannel& eq) { return cp_decompose(eq.Hcheck); }
EchelonDecomposition qr_decompose(const EquivalentChannel& eq) { return qr_decompose(eq.Hcheck); }
EchelonDecomposition random_rotation_decompose(const EquivalentChannel& eq, int trials,
                                               std::uint64_t seed) {
    return random_rotation_decompose(eq.Hcheck, trials, seed);
}
EchelonDecomposition gram_schmidt_decompose(const EquivalentChannel& eq) {
    return gram_schmidt_decompose(eq.Hcheck);
}

}  // namespace gamsim

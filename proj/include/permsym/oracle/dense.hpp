#pragma once

// Exponential-size reference constructions. Everything here materializes
// operators on (C^d)^{⊗n} and is meant for small n only: unit tests, the
// acceptance suite and `permsym validate`.
//
// Dense index of a multi-index i = (i_0..i_{n-1}) is Σ_k i_k d^{n-1-k}.
// Bipartite operators from orbit coefficients are in interleaved order
// (A_0 B_0 A_1 B_1 ...); `interleaved_to_blocked` reorders to A^n B^n.

#include "permsym/link_product.hpp"
#include "permsym/orbit_core.hpp"

#include <random>

namespace permsym::oracle {

std::vector<int> decode(long idx, int d, int n);
long encode(std::span<const int> digits, int d);
long ipow(int d, int n);

Eigen::MatrixXd orbit_matrix(const CountMatrix& e, int n);
Eigen::MatrixXcd dense_from_coeffs(const OrbitCoefficients& x);
/// Reads one representative entry per orbit; x must be permutation invariant.
OrbitCoefficients coeffs_from_dense(const Eigen::MatrixXcd& x, BasisPtr basis);

/// Projects onto permutation-invariant operators by averaging over S_n.
Eigen::MatrixXcd symmetrize(const Eigen::MatrixXcd& x, int d, int n);
/// Same, acting only on the S^n factor of R ⊗ S^n (ref_first) or S^n ⊗ R.
Eigen::MatrixXcd symmetrize_with_reference(const Eigen::MatrixXcd& x, int d_r, int d, int n, bool ref_first);

/// Dense R ⊗ S^n (or S^n ⊗ R) matrix of reference coefficients.
Eigen::MatrixXcd dense_from_ref(const RefCoefficients& x);
RefCoefficients ref_from_dense(const Eigen::MatrixXcd& x, int d_r, BasisPtr basis, RefOrder order);

Eigen::MatrixXcd interleaved_to_blocked(const Eigen::MatrixXcd& x, int d_a, int d_b, int n);
Eigen::MatrixXcd blocked_to_interleaved(const Eigen::MatrixXcd& x, int d_a, int d_b, int n);

/// Partial trace / transpose on the second factor of a blocked X ⊗ Y ordering.
Eigen::MatrixXcd ptrace_second(const Eigen::MatrixXcd& x, long d1, long d2);
Eigen::MatrixXcd ptrace_first(const Eigen::MatrixXcd& x, long d1, long d2);
Eigen::MatrixXcd ptranspose_second(const Eigen::MatrixXcd& x, long d1, long d2);
Eigen::MatrixXcd ptranspose_first(const Eigen::MatrixXcd& x, long d1, long d2);

/// Kronecker product.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
/// n-fold Kronecker power.
Eigen::MatrixXcd kron_power(const Eigen::MatrixXcd& a, int n);

/// Choi of N2∘N1 from Γ^{N1}_{XY} (dims dx,dy) and Γ^{N2}_{YZ} (dims dy,dz):
/// Tr_Y[(Γ1)^{T_Y} Γ2].
Eigen::MatrixXcd link(const Eigen::MatrixXcd& g1, const Eigen::MatrixXcd& g2, long dx, long dy, long dz);

Eigen::MatrixXcd random_matrix(long rows, long cols, std::mt19937_64& rng);
Eigen::MatrixXcd random_psd(long dim, std::mt19937_64& rng);
/// Random CPTP Choi Γ_{in,out} (Tr_out Γ = 1_in).
Eigen::MatrixXcd random_cptp_choi(long d_in, long d_out, std::mt19937_64& rng, long kraus = 0);
/// Random coefficient vector over every orbit of the basis.
OrbitCoefficients random_coeffs(BasisPtr basis, std::mt19937_64& rng);

/// Channel power iteration on a dense Choi Γ^M_{RB} (d_r × d_b): maximal
/// fidelity of recovery, best over `restarts` random decoders.
double dense_fd(const Eigen::MatrixXcd& gamma_m, long d_r, long d_b, std::mt19937_64& rng, int restarts = 8,
                int max_iter = 20000, double tol = 1e-13);

}  // namespace permsym::oracle

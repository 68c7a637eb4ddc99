#pragma once

// Operations on BlockRep in the ORTHO gauge. With a reference of dimension
// d_R the (k,l) sub-block of block λ is rows k*m..k*m+m-1, cols l*m..l*m+m-1.

#include "permsym/schur_weyl.hpp"

#include <Eigen/SparseCore>

namespace permsym {

/// Eigenvalues below this fraction of the largest are treated as zero.
inline constexpr double kPinvCutoff = 1e-12;

struct PinvSqrt {
    Eigen::MatrixXcd inv_sqrt;  // X^{-1/2} on the support, 0 on the kernel
    Eigen::MatrixXcd kernel;    // projector onto the numerical kernel
};

/// Pseudoinverse square root of a Hermitian PSD matrix.
PinvSqrt pinv_sqrt(const Eigen::MatrixXcd& x);

/// Kronecker product a ⊗ b.
Eigen::MatrixXcd kron_blocks(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Σ_λ mult_λ Tr[b_λ].
cplx block_trace(const BlockRep& b);
/// Σ_λ mult_λ Tr[a_λ† b_λ].
cplx block_hs(const BlockRep& a, const BlockRep& b);
/// Σ_λ mult_λ Tr[a_λ b_λ]; the fidelity pairing of two Choi matrices.
cplx block_pairing(const BlockRep& a, const BlockRep& b);

/// Σ_k b_λ^{(k,k)} per block.
std::vector<Eigen::MatrixXcd> reference_trace(const BlockRep& b);
/// T = Σ_λ mult_λ Tr_{V_λ}[b_λ], a d_R × d_R matrix.
Eigen::MatrixXcd global_trace(const BlockRep& b);

/// max_λ ‖Σ_k b_λ^{(k,k)} − 1‖_∞ entrywise, one entry per block.
std::vector<double> cpu_residual(const BlockRep& b);
/// ‖T − 1_R‖_∞ entrywise.
double cptp_residual(const BlockRep& b);

/// Blockwise sandwich by (1 ⊗ M_λ^{-1/2}). Kernel directions of M_λ are
/// completed with (1_R/d_R) ⊗ P_ker so the result is exactly unital.
void enforce_cpu(BlockRep& b);
/// Global sandwich by (T^{-1/2} ⊗ 1). Kernel directions of T are completed
/// with P_ker ⊗ |0⟩⟨0| in the first block, whose multiplicity must be 1.
void enforce_cptp(BlockRep& b);

/// Sparse matrix of ψ̃ ∘ T_side ∘ ψ̃^{-1} on the flattened blocks of a
/// bipartite system [d_A, d_B] (cob built for d = d_A·d_B).
class PartialTransposeMap {
public:
    PartialTransposeMap(CobPtr cob, int d_a, int d_b, Side side = Side::B);
    BlockRep apply(const BlockRep& b) const;
    const Eigen::SparseMatrix<cplx>& matrix() const { return map_; }

private:
    CobPtr cob_;
    std::vector<long> offsets_;
    Eigen::SparseMatrix<cplx> map_;
};

BlockRep block_partial_transpose(const BlockRep& b, int d_a, int d_b, Side side = Side::B);

}  // namespace permsym

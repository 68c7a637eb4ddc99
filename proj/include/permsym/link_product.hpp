#pragma once

// Channel concatenation in the orbit basis.
//
// Encoder-side objects (Γ^E, Γ^M, Γ^{D*}) live on R ⊗ S^n and are stored as
// Σ_{k,l,r} c_{k,l,r} |k⟩⟨l| ⊗ C_r. Decoder-side objects (Γ^D, Γ^{M'}) live on
// S^n ⊗ R as Σ_{r,k,l} c_{r,k,l} C_r ⊗ |k⟩⟨l|. Both are RefCoefficients and
// the order flag records which one is meant; the coefficient of (k,l) is
// always stored at entries[k * d_r + l].

#include "permsym/orbit_core.hpp"

#include <optional>

namespace permsym {

/// Largest reference dimension accepted anywhere. The reference system must
/// stay a small fixed factor; a decoder whose reference is the full output
/// B^n is not a permutation-invariant object and is rejected.
inline constexpr int kMaxReferenceDim = 8;

enum class RefOrder { RefFirst, RefLast };

struct RefCoefficients {
    int d_r = 0;
    RefOrder order = RefOrder::RefFirst;
    BasisPtr basis;
    std::vector<OrbitCoefficients> entries;

    static RefCoefficients zeros(int d_r, BasisPtr basis, RefOrder order = RefOrder::RefFirst);

    OrbitCoefficients& at(int k, int l) { return entries[static_cast<std::size_t>(k * d_r + l)]; }
    const OrbitCoefficients& at(int k, int l) const { return entries[static_cast<std::size_t>(k * d_r + l)]; }
};

/// Choi coefficients of the Heisenberg adjoint: c*_{k,l,r} = c_{rᵀ,l,k}, with
/// the reference moved to the other side.
RefCoefficients adjoint(const RefCoefficients& x);

/// Γ^{N∘E} on R ⊗ B^n from Γ^N on A^n B^n and Γ^E on R ⊗ A^n:
/// c_{k,l,t} = Σ_{s: t(s)=t} κ_s^B c^E_{k,l,r(s)} c^N_s.
RefCoefficients compose_after_encoder(const OrbitCoefficients& channel, const RefCoefficients& encoder,
                                      const MarginalData& md);

/// Γ^{D∘N} on A^n ⊗ R from Γ^N on A^n B^n and Γ^D on B^n ⊗ R:
/// c_{r,k,l} = Σ_{s: r(s)=r} κ_s^A c^D_{t(s),k,l} c^N_s.
RefCoefficients compose_before_decoder(const OrbitCoefficients& channel, const RefCoefficients& decoder,
                                       const MarginalData& md);

struct TripartiteEntry {
    std::uint64_t s = 0;  // orbit on A B
    std::uint64_t u = 0;  // orbit on B C
    std::uint64_t w = 0;  // orbit on A C
    BigInt k;
    double k_f = 0.0;
};

/// Structure constants 𝒦_{s,u}^w of the covariant concatenation
/// Tr_B[(C_{s^{T_B}} ⊗ 1)(1 ⊗ C_u)] = Σ_w 𝒦_{s,u}^w C_w, sorted by (s,u,w).
struct TripartiteTable {
    std::vector<int> dims;  // d_A, d_B, d_C
    int n = 0;
    BasisPtr ab, bc, ac;
    std::vector<TripartiteEntry> entries;
};

/// Enumerates tripartite count matrices E_z. Positions are restricted to the
/// declared single-copy supports (row-major masks of the AB and BC Choi
/// matrices); without supports every position is allowed. Throws
/// CapacityError when the enumeration exceeds `budget`.
TripartiteTable build_tripartite(const std::vector<int>& dims, int n,
                                 const std::optional<std::vector<bool>>& support_ab = std::nullopt,
                                 const std::optional<std::vector<bool>>& support_bc = std::nullopt,
                                 std::uint64_t budget = kDefaultOrbitBudget);

/// Γ^{O∘N} on A^n C^n: c_w = Σ_{s,u} 𝒦_{s,u}^w c^N_s c^O_u.
OrbitCoefficients compose_covariant(const OrbitCoefficients& n_coeffs, const OrbitCoefficients& o_coeffs,
                                    const TripartiteTable& table);

/// N^{⊗n}-type action on a state of R ⊗ A^n (reference first); the output lives on R ⊗ B^n.
RefCoefficients apply_channel_to_state(const RefCoefficients& state, const OrbitCoefficients& channel,
                                       const MarginalData& md);
/// Action on a permutation-invariant state of R^n A^n; the table must be built
/// for [d_R, d_A, d_B] and the output lives on R^n B^n.
OrbitCoefficients apply_channel_to_state(const OrbitCoefficients& state, const OrbitCoefficients& channel,
                                         const TripartiteTable& table);

}  // namespace permsym

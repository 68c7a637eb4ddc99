#pragma once

// Block-diagonal algebras 𝒜 = ⊕_i C^{d_i×d_i} and their symmetric powers.
// 𝒜 embeds in C^{d×d} with d = Σ d_i; symbol a belongs to block i when
// offset_i ≤ a < offset_i + d_i. Orbits of End^{S_n}(𝒜^{⊗n}) are the
// block-diagonal count matrices.

#include "permsym/link_product.hpp"
#include "permsym/schur_weyl.hpp"

namespace permsym {

struct AlgebraSpec {
    std::vector<int> blocks;
    int copies = 1;

    AlgebraSpec() = default;
    AlgebraSpec(std::vector<int> b, int n);

    int d() const;
    std::size_t num_blocks() const { return blocks.size(); }
    std::vector<int> offsets() const;
    /// Row-major d×d mask of block-diagonal positions.
    std::vector<bool> mask() const;
};

bool is_block_diagonal(const CountMatrix& e, const std::vector<int>& blocks);

/// Block-diagonal count matrices in canonical order.
std::vector<CountMatrix> algebra_orbits(const AlgebraSpec& spec, std::uint64_t budget = kDefaultOrbitBudget);
/// C(n + Σ d_i² − 1, n).
BigInt algebra_orbit_count(const AlgebraSpec& spec);

struct SplitOrbit {
    std::vector<int> mu;
    std::vector<CountMatrix> parts;
};
SplitOrbit split_orbit(const CountMatrix& e, const std::vector<int>& blocks);
CountMatrix glue_orbit(const std::vector<CountMatrix>& parts);

struct FlagProfile {
    std::vector<int> mu;
    std::vector<Partition> lambdas;  // empty partition where μ_j = 0
    BigInt f = 1;                    // Π f_{λ_j}
    BigInt m = 1;                    // Π m_{λ_j}
    BigInt copies = 1;               // multinomial(n; μ)
};

/// Ordered lexicographically on μ (descending) then per-block partition order.
std::vector<FlagProfile> flag_profiles(const AlgebraSpec& spec);

/// Change of basis for End^{S_n}(𝒜^{⊗n}) with one block per FlagProfile.
/// The basis is the (lightweight) orbit basis of the embedding, optionally
/// with a bipartite spec; only block-diagonal orbits carry entries. Block
/// multiplicity is copies·f so trace and HS identities hold on the embedding.
ChangeOfBasis build_algebra_cob(const AlgebraSpec& spec, std::uint64_t budget = kDefaultOrbitBudget);

/// ψ̃ on the algebra; throws if x has weight outside the algebra.
BlockRep algebra_block_diag(const OrbitCoefficients& x, CobPtr cob);
BlockRep algebra_block_diag(const RefCoefficients& x, CobPtr cob);

/// κ^A of a joint orbit on [Σd^A, Σd^B] whose count matrix is block diagonal
/// in both factors, via the per-block decomposition
/// κ = Π_i multinomial(μ^A_i; μ_i·) · Π_j |O_{r_ij}| / |O_{r_i}| · Π_j κ_{s_ij}.
BigInt kappa_decomposed(const CountMatrix& e, const std::vector<int>& blocks_a, const std::vector<int>& blocks_b);

/// Serial composition through an algebra-valued output: the encoder side
/// (after) and decoder side (before) of the plain link product, after
/// checking that every channel orbit lies in 𝒜_A ⊗ 𝒜_B. With `cross_check`
/// each κ is also recomputed by the block decomposition.
RefCoefficients algebra_link_after_encoder(const OrbitCoefficients& channel, const RefCoefficients& encoder,
                                           const MarginalData& md, const std::vector<int>& blocks_a,
                                           const std::vector<int>& blocks_b, bool cross_check = false);
RefCoefficients algebra_link_before_decoder(const OrbitCoefficients& channel, const RefCoefficients& decoder,
                                            const MarginalData& md, const std::vector<int>& blocks_a,
                                            const std::vector<int>& blocks_b, bool cross_check = false);

}  // namespace permsym

#pragma once

// Symmetric seesaw: alternating channel power iterations for the decoder
// (F_D) and encoder (F_E) in the Schur–Weyl block basis.
//
// The encoder Γ^E lives on R ⊗ A^n (CPTP: Σ_λ mult_λ Tr_V Γ_λ = 1_R) and the
// decoder is held as its adjoint Γ^{D*} on R ⊗ B^n (CPU: Σ_k Γ_λ^{(k,k)} = 1).
// Fidelities are (1/d_R²) Σ_λ mult_λ Tr[M_λ X_λ].

#include "permsym/algebra_ext.hpp"
#include "permsym/block_space.hpp"
#include "permsym/cache.hpp"
#include "permsym/channels.hpp"

#include <random>

namespace permsym {

struct SeesawConfig {
    int n = 1;
    int d = 2;                   // reference (code) dimension
    double delta = 1e-7;         // outer threshold on F_E − F_D
    double delta_power = 1e-9;   // inner threshold on the fidelity gain
    int max_outer = 1000;
    int max_power = 10000;
    int seeds = 4;
    std::uint64_t rng_seed = 0;
    bool warm_start = true;      // seed 0 is an isometric encoder when possible
    std::uint64_t budget = kDefaultOrbitBudget;
};

/// Floor applied to `delta` so rounding cannot keep the loop alive.
inline constexpr double kDeltaFloor = 1e-12;

enum class SeedKind { Encoder, Decoder };

/// Deterministic generator for stream `stream` of run `seed`.
std::mt19937_64 split_rng(std::uint64_t seed, std::uint64_t stream);

/// Ginibre blocks weighted by Dirichlet(1,…,1)/mult_λ, then normalized.
BlockRep random_symmetric_seed(CobPtr cob, int d_r, SeedKind kind, std::mt19937_64& rng);
/// Isometry R → symmetric subspace, placed in the first (multiplicity-one)
/// block; nullopt when that block is smaller than d_r.
std::optional<BlockRep> isometric_seed(CobPtr cob, int d_r, std::mt19937_64& rng);

/// (1/d_R²) Re Σ_λ mult_λ Tr[m_λ x_λ].
double block_fidelity(const BlockRep& m, const BlockRep& x);

struct PowerResult {
    double fidelity = 0.0;
    BlockRep x;
    int iterations = 0;
    bool truncated = false;
    std::vector<double> trace;  // fidelity before the first step, then after each step
};

/// Decoder power iteration on M (Γ^M on R ⊗ B^n, ORTHO blocks).
PowerResult power_fd(const BlockRep& m, BlockRep seed, double delta_power, int max_power);
/// Encoder power iteration on M'* (Γ^{M'*} on R ⊗ A^n, ORTHO blocks).
PowerResult power_fe(const BlockRep& m_adj, BlockRep seed, double delta_power, int max_power);

/// Precomputed data for one (channel, n, d) problem.
struct SeesawTables {
    ChoiMatrix channel;
    int n = 0;
    bool flagged = false;
    std::vector<int> blocks_b;  // output algebra blocks (one block when unflagged)
    OrbitCoefficients coeffs;   // Γ^{N⊗n}, support orbits only
    MarginalData md;
    CobPtr cob_a, cob_b;
};

/// Builds tables; a flagged channel gets an algebra change of basis on B.
SeesawTables build_tables(const ChoiMatrix& channel, int n, bool use_flags, CobCache* cache = nullptr,
                          std::uint64_t budget = kDefaultOrbitBudget);

/// M = N^{⊗n} ∘ E in blocks of B.
BlockRep channel_after_encoder(const SeesawTables& t, const BlockRep& encoder);
/// M'* = (D ∘ N^{⊗n})^* in blocks of A, from the decoder adjoint.
BlockRep channel_before_decoder_adj(const SeesawTables& t, const BlockRep& decoder_adj);

struct TrajectoryPoint {
    int outer = 0;
    std::string phase;  // "fd" or "fe"
    double value = 0.0;
};

struct SeesawRun {
    std::uint64_t seed_index = 0;
    double fidelity = 0.0;
    double fd = 0.0;
    double fe = 0.0;
    int outer = 0;
    bool converged = false;
    bool truncated = false;
    BlockRep encoder;
    BlockRep decoder_adj;
    std::vector<TrajectoryPoint> trajectory;
};

struct SeesawResult {
    SeesawConfig config;
    double best_fidelity = 0.0;
    int best_n = 0;
    std::uint64_t best_seed = 0;
    bool converged = false;  // status of the best run; per-run flags are in `runs`
    bool truncated = false;
    double cpu_residual = 0.0;
    double cptp_residual = 0.0;
    std::vector<SeesawRun> runs;
    double wall_ms = 0.0;

    const SeesawRun& best() const;
};

/// One seesaw run from explicit seeds.
SeesawRun seesaw_single(const SeesawTables& t, const SeesawConfig& cfg, BlockRep encoder, BlockRep decoder_adj,
                        std::uint64_t seed_index = 0);
/// Best over `cfg.seeds` restarts; flags of the channel are ignored (plain embedding).
SeesawResult seesaw_run(const ChoiMatrix& channel, const SeesawConfig& cfg, CobCache* cache = nullptr);
SeesawResult seesaw_run(const SeesawTables& t, const SeesawConfig& cfg);
/// Same loop with the decoder in the flagged-output algebra.
SeesawResult seesaw_flagged(const ChoiMatrix& channel, const SeesawConfig& cfg, CobCache* cache = nullptr);

/// Γ^N as reference-tensored coefficients on one copy: RefFirst puts the
/// input as reference (Γ^N on R ⊗ out), RefLast the output (Γ^N on in ⊗ R).
RefCoefficients choi_as_ref(const ChoiMatrix& channel, RefOrder order);

/// Single-copy F_D and F_E of a channel (d_R = d_in, resp. d_out). With
/// `use_flags` the decoder lives in the flagged-output algebra.
double max_fidelity_recovery(const ChoiMatrix& channel, std::uint64_t rng_seed = 0, int seeds = 4,
                             double delta_power = 1e-12, int max_power = 100000, bool use_flags = false);
double max_fidelity_preparation(const ChoiMatrix& channel, std::uint64_t rng_seed = 0, int seeds = 4,
                                double delta_power = 1e-12, int max_power = 100000);

struct SweepRow {
    double param = 0.0;
    int n = 0;
    double fidelity = 0.0;
    bool best = false;  // best over n for this parameter; ties go to the smaller n
    bool converged = false;
};

enum class Family { Adc, Depolarizing };
ChoiMatrix family_channel(Family f, double param);
std::vector<SweepRow> sweep(Family family, const std::vector<double>& params, const std::vector<int>& ns,
                            const SeesawConfig& cfg, CobCache* cache = nullptr);

nlohmann::json result_to_json(const SeesawResult& r, bool include_timing);

}  // namespace permsym

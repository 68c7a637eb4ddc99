#pragma once

// Schur–Weyl block diagonalization of End^{S_n}((C^d)^{⊗n}).
//
// Blocks are indexed by partitions λ of n with at most d parts (reverse
// lexicographic order). Block λ has size m_λ (#SSYT of shape λ over [d]) and
// appears with multiplicity f_λ (#SYT). The encoding polynomial
// f_{τ,γ}(X) = Σ_E ⟨u_τ|C_E|u_γ⟩ x_E carries every block entry of every orbit
// matrix; it is stored sparsely as exponent count matrix → exact integer.

#include "permsym/orbit_core.hpp"

#include <map>
#include <memory>

namespace permsym {

struct Partition {
    std::vector<int> parts;  // non-increasing, positive

    int n() const;
    int height() const { return static_cast<int>(parts.size()); }
    int operator[](int i) const { return i < height() ? parts[static_cast<std::size_t>(i)] : 0; }
    /// Column heights λ*_j.
    std::vector<int> conjugate() const;
    auto operator<=>(const Partition&) const = default;
};

/// Semistandard filling; rows[i][j] holds the 0-based symbol in row i, column j.
struct Tableau {
    std::vector<std::vector<int>> rows;

    Partition shape() const;
    bool semistandard() const;
    /// Content vector w(τ): number of occurrences of each symbol.
    std::vector<int> weight(int d) const;
    /// E_τ: (E_τ)_{a,b} = number of entries a in row b.
    CountMatrix count_matrix(int d) const;
    /// Entries in row-major reading order (box k ↔ tensor position k).
    std::vector<int> reading_word() const;
    auto operator<=>(const Tableau&) const = default;
};

/// Partitions of n with at most d parts, reverse lexicographic.
std::vector<Partition> partitions(int d, int n);
/// Number of standard Young tableaux (hook length formula).
BigInt syt_count(const Partition& lambda);
/// Number of semistandard tableaux over [d] (hook content formula).
BigInt ssyt_count(const Partition& lambda, int d);
/// All semistandard tableaux over [d], sorted by reading word.
std::vector<Tableau> ssyt_enumerate(const Partition& lambda, int d);
/// The tableau whose row i is filled with symbol i.
Tableau constant_tableau(const Partition& lambda);

class Polynomial {
public:
    using Terms = std::map<std::vector<int>, BigInt>;  // d×d exponent grid, row-major

    Polynomial() = default;
    explicit Polynomial(int d) : d_(d) {}
    static Polynomial constant(int d, const BigInt& c);
    static Polynomial variable(int d, int a, int b);

    int d() const { return d_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    BigInt coeff(const CountMatrix& e) const;

    void add_term(const std::vector<int>& exps, const BigInt& c);
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const BigInt& c) const;
    Polynomial pow(int k) const;
    /// Exact division of every coefficient; throws when not divisible.
    Polynomial divide_exact(const BigInt& c) const;
    /// ∂/∂x_{a,b}.
    Polynomial derivative(int a, int b) const;
    /// Value at the identity matrix.
    BigInt at_identity() const;

    bool operator==(const Polynomial& o) const { return d_ == o.d_ && terms_ == o.terms_; }

private:
    int d_ = 0;
    Terms terms_;
};

/// d_{a→b} = Σ_c x_{c,a} ∂/∂x_{c,b}.
Polynomial diff_op(const Polynomial& p, int a, int b);
/// d*_{a→b} = Σ_c x_{a,c} ∂/∂x_{b,c}.
Polynomial diff_op_star(const Polynomial& p, int a, int b);

/// Count-function formula (validation path).
Polynomial encoding_poly_m1(const Tableau& tau, const Tableau& gamma, int d);
/// Product formula for the constant tableau plus differential operators
/// (production path).
Polynomial encoding_poly_m2(const Tableau& tau, const Tableau& gamma, int d);
/// P_λ = Π_k Q_k^{λ_k − λ_{k+1}} with Q_k = k!·det of the leading k×k minor.
Polynomial p_lambda(const Partition& lambda, int d);

enum class TransitionSide { Left, Right };
/// Right: C_E·T_{a→b}. Left: T_{a→b}·C_E. Returns the orbit expansion.
std::vector<std::pair<CountMatrix, BigInt>> transition_action(const CountMatrix& e, int a, int b, TransitionSide side);

/// One orbit's entries inside one block, restricted to its weight sub-block.
struct OrbitBlockEntry {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    double value = 0.0;
};

struct BlockInfo {
    std::string label;                 // human-readable block label
    Partition lambda;                  // plain case; algebra blocks leave it empty
    std::vector<Tableau> tableaux;     // plain case
    int m = 0;                         // block size without reference
    BigInt f;                          // Specht dimension
    BigInt copies = 1;                 // identical sector copies (algebra case)
    double mult = 0.0;                 // trace multiplicity, copies * f
    Eigen::MatrixXd gram;              // G (plain case; identity block of the raw map)
    Eigen::MatrixXd factor;            // R with R Rᵀ = G⁻¹
};

/// Per-orbit images [ψ(C_r)]_λ and [ψ̃(C_r)]_λ, stored sparsely.
class ChangeOfBasis {
public:
    ChangeOfBasis() = default;

    BasisPtr basis;
    std::vector<BlockInfo> blocks;
    /// raw[r] / ortho[r]: list of (block, entry) pairs for orbit r.
    std::vector<std::vector<std::pair<std::uint32_t, OrbitBlockEntry>>> raw;
    std::vector<std::vector<std::pair<std::uint32_t, OrbitBlockEntry>>> ortho;
    /// ‖C_r‖²_HS for each orbit.
    std::vector<double> orbit_norm2;

    std::size_t num_blocks() const { return blocks.size(); }
};

using CobPtr = std::shared_ptr<const ChangeOfBasis>;

/// Builds the change of basis for (C^d)^{⊗n}. Method 2 is used by default.
ChangeOfBasis build_change_of_basis(int d, int n, bool use_method1 = false,
                                    std::uint64_t budget = kDefaultOrbitBudget);
/// Same, for a composite system treated as one factor of dimension spec.dim();
/// the basis keeps `spec` so bipartite coefficients map directly.
ChangeOfBasis build_change_of_basis(const SystemSpec& spec, bool use_method1 = false,
                                    std::uint64_t budget = kDefaultOrbitBudget);

/// Gram matrix G_λ and its orthonormalizing factor, computed per weight block.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gram(const Partition& lambda, int d,
                                                 const std::vector<std::vector<Polynomial>>& polys);

enum class Gauge { Raw, Ortho };

/// Direct sum of blocks; with a reference factor of dimension d_r the block
/// index is k * m + τ.
struct BlockRep {
    CobPtr cob;
    int d_r = 1;
    Gauge gauge = Gauge::Ortho;
    std::vector<Eigen::MatrixXcd> blocks;

    static BlockRep zeros(CobPtr cob, int d_r, Gauge gauge);
    double mult(std::size_t b) const { return cob->blocks[b].mult; }
};

struct RefCoefficients;

BlockRep psi(const OrbitCoefficients& x, CobPtr cob);
BlockRep psi_tilde(const OrbitCoefficients& x, CobPtr cob);
/// Reference-tensored maps; x must have the reference first.
BlockRep psi(const RefCoefficients& x, CobPtr cob);
BlockRep psi_tilde(const RefCoefficients& x, CobPtr cob);
/// Inverse of psi_tilde (ORTHO gauge only).
OrbitCoefficients psi_tilde_inv(const BlockRep& b);
RefCoefficients psi_tilde_inv_ref(const BlockRep& b);

}  // namespace permsym

#pragma once

// Orbit basis of permutation-invariant operators on (C^d)^{⊗n}.
//
// An orbit is labelled by its d×d count matrix E (entries sum to n). The
// canonical ordinal of an orbit is the ascending lexicographic rank of the
// row-major entry vector of E; it is computed combinatorially, so bases
// whose size exceeds memory can still be indexed.
//
// Bipartite systems [d_A, d_B] use the composite symbol a = a_A * d_B + a_B.
// Symbols are 0-based throughout the code.

#include "permsym/combinatorics.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace permsym {

using cplx = std::complex<double>;

/// Default cap on the number of orbits any single enumeration may produce.
inline constexpr std::uint64_t kDefaultOrbitBudget = 50'000'000ULL;

struct SystemSpec {
    std::vector<int> local_dims;
    int copies = 1;

    SystemSpec() = default;
    SystemSpec(std::vector<int> dims, int n);

    int dim() const;
    bool bipartite() const { return local_dims.size() == 2; }
    bool operator==(const SystemSpec&) const = default;
};

class CountMatrix {
public:
    CountMatrix() = default;
    CountMatrix(int d, std::vector<int> entries);
    static CountMatrix zeros(int d) { return CountMatrix(d, std::vector<int>(static_cast<std::size_t>(d * d), 0)); }

    int d() const { return d_; }
    int n() const;
    int operator()(int a, int b) const { return e_[static_cast<std::size_t>(a * d_ + b)]; }
    int& at(int a, int b) { return e_[static_cast<std::size_t>(a * d_ + b)]; }
    const std::vector<int>& entries() const { return e_; }

    bool is_diagonal() const;
    CountMatrix transposed() const;
    std::vector<int> row_sums() const;
    std::vector<int> col_sums() const;

    bool operator==(const CountMatrix&) const = default;
    auto operator<=>(const CountMatrix& o) const { return e_ <=> o.e_; }

private:
    int d_ = 0;
    std::vector<int> e_;
};

class OrbitBasis {
public:
    OrbitBasis() = default;
    /// Lightweight basis: indexing works, `orbits()` stays empty.
    explicit OrbitBasis(SystemSpec spec);

    const SystemSpec& spec() const { return spec_; }
    int d() const { return d_; }
    int n() const { return spec_.copies; }
    std::uint64_t size() const { return size_; }

    std::uint64_t index(const CountMatrix& e) const;
    CountMatrix orbit(std::uint64_t idx) const;

    bool materialized() const { return !orbits_.empty(); }
    const std::vector<CountMatrix>& orbits() const { return orbits_; }

    bool operator==(const OrbitBasis& o) const { return spec_ == o.spec_; }

private:
    friend OrbitBasis enumerate_orbits(const SystemSpec&, std::uint64_t);
    SystemSpec spec_;
    int d_ = 0;
    std::uint64_t size_ = 0;
    std::vector<CountMatrix> orbits_;
};

using BasisPtr = std::shared_ptr<const OrbitBasis>;

/// All count matrices in canonical order. Throws CapacityError above `budget`.
OrbitBasis enumerate_orbits(const SystemSpec& spec, std::uint64_t budget = kDefaultOrbitBudget);

/// Canonically ordered count matrices that vanish outside `support`
/// (a row-major d×d mask).
std::vector<CountMatrix> enumerate_supported(int d, int n, const std::vector<bool>& support,
                                             std::uint64_t budget = kDefaultOrbitBudget);

struct OrbitCoefficients {
    BasisPtr basis;
    std::map<std::uint64_t, cplx> values;
    std::optional<std::vector<bool>> support;

    OrbitCoefficients() = default;
    explicit OrbitCoefficients(BasisPtr b) : basis(std::move(b)) {}

    cplx get(std::uint64_t idx) const;
    cplx get(const CountMatrix& e) const { return get(basis->index(e)); }
    void add(std::uint64_t idx, cplx v) { values[idx] += v; }
    std::size_t nnz() const { return values.size(); }
};

struct MarginalEntry {
    std::uint64_t s = 0;  // joint orbit
    std::uint64_t r = 0;  // A-marginal orbit
    std::uint64_t t = 0;  // B-marginal orbit
    BigInt kappa_a;
    BigInt kappa_b;
    double kappa_a_f = 0.0;
    double kappa_b_f = 0.0;
    bool tau_b = false;  // B-marginal diagonal
    bool tau_a = false;  // A-marginal diagonal
};

struct MarginalData {
    SystemSpec spec;  // bipartite [d_A, d_B]
    BasisPtr joint, a, b;
    std::vector<MarginalEntry> entries;  // ordered by joint orbit ordinal
    std::unordered_map<std::uint64_t, std::size_t> by_joint;

    const MarginalEntry* find(std::uint64_t s) const;
};

std::pair<std::vector<int>, std::vector<int>> representative(const CountMatrix& e);
CountMatrix count_of_pair(std::span<const int> i, std::span<const int> j, int d);

/// multinomial(n; entries of E) = |orbit| = squared Hilbert–Schmidt norm of C_E.
BigInt orbit_size(const CountMatrix& e);
/// n!/prod m_a! for diagonal E, 0 otherwise.
BigInt trace_orbit(const CountMatrix& e);

/// Coefficients of X^{⊗n}; only orbits inside nz(X) are stored.
OrbitCoefficients tensor_coefficients(const Eigen::MatrixXcd& x, int n, BasisPtr basis);
/// Sum of C_E over diagonal E.
OrbitCoefficients identity_coeffs(BasisPtr basis);

OrbitCoefficients transpose_coeffs(const OrbitCoefficients& x);

enum class Side { A, B };
CountMatrix partial_transpose(const CountMatrix& e, int d_a, int d_b, Side side);
OrbitCoefficients partial_transpose_coeffs(const OrbitCoefficients& x, Side side);

CountMatrix marginal(const CountMatrix& e, int d_a, int d_b, Side keep);
BigInt kappa(const CountMatrix& e, int d_a, int d_b, Side keep);

/// Marginal data for every joint orbit of a bipartite spec.
MarginalData marginal_data(const SystemSpec& spec, std::uint64_t budget = kDefaultOrbitBudget);
/// Marginal data for an explicit list of joint orbits (typically a support).
MarginalData marginal_data(const SystemSpec& spec, const std::vector<CountMatrix>& joint);
/// Marginal data over the orbits present in x.
MarginalData marginal_data_for(const OrbitCoefficients& x);

/// Partial trace over `traced` (B by default): out_r = Σ_{s: r(s)=r} x_s κ_s^A τ_s.
OrbitCoefficients partial_trace_coeffs(const OrbitCoefficients& x, const MarginalData& md,
                                       Side traced = Side::B);

cplx hs_inner(const OrbitCoefficients& x, const OrbitCoefficients& y);
cplx trace_coeffs(const OrbitCoefficients& x);

/// Orbit basis of one factor of a bipartite spec.
SystemSpec factor_spec(const SystemSpec& spec, Side side);

}  // namespace permsym

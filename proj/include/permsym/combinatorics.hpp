#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace permsym {

using BigInt = boost::multiprecision::cpp_int;

/// n! as an exact integer.
BigInt factorial(int n);

/// Binomial coefficient C(n, k) as an exact integer; 0 when k < 0 or k > n.
BigInt binomial(int n, int k);

/// Multinomial coefficient (sum parts)! / prod(parts!).
BigInt multinomial(std::span<const int> parts);

/// C(n, k) in 64 bits; throws CapacityError when the value does not fit.
std::uint64_t binomial_u64(int n, int k);

/// Number of weak compositions of `total` into `parts` parts, i.e.
/// C(total + parts - 1, parts - 1). Throws CapacityError beyond 64 bits.
std::uint64_t weak_composition_count(int total, int parts);

/// Rank of a weak composition in ascending lexicographic order over the
/// entry vector. Entries must be non-negative.
std::uint64_t composition_rank(std::span<const int> entries);

/// Inverse of composition_rank for compositions of `total` into `parts` parts.
std::vector<int> composition_unrank(std::uint64_t rank, int total, int parts);

/// Advances `entries` to the lexicographic successor among compositions with
/// the same sum and length. Returns false after the last composition.
bool next_composition(std::vector<int>& entries);

/// Lossy conversion used where exact counts feed floating point arithmetic.
double to_double(const BigInt& v);

}  // namespace permsym

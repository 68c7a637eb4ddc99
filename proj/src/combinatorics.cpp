#include "permsym/combinatorics.hpp"

#include "permsym/error.hpp"

#include <mutex>
#include <numeric>

namespace permsym {

namespace {

std::mutex g_fact_mutex;
std::vector<BigInt> g_fact{BigInt(1)};

}  // namespace

BigInt factorial(int n)
{
    detail::require(n >= 0, "factorial of a negative number");
    std::lock_guard<std::mutex> lock(g_fact_mutex);
    while (static_cast<int>(g_fact.size()) <= n) {
        const auto k = static_cast<long>(g_fact.size());
        g_fact.push_back(g_fact.back() * k);
    }
    return g_fact[static_cast<std::size_t>(n)];
}

BigInt binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n) return 0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

BigInt multinomial(std::span<const int> parts)
{
    int total = 0;
    BigInt denom = 1;
    for (int p : parts) {
        detail::require(p >= 0, "multinomial part must be non-negative");
        total += p;
        if (p > 1) denom *= factorial(p);
    }
    return factorial(total) / denom;
}

std::uint64_t binomial_u64(int n, int k)
{
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        // acc * (n - k + i) / i stays integral at every step.
        acc = acc * static_cast<unsigned>(n - k + i);
        acc /= static_cast<unsigned>(i);
        if (acc > static_cast<unsigned __int128>(UINT64_MAX))
            throw CapacityError("binomial coefficient exceeds 64-bit range");
    }
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t weak_composition_count(int total, int parts)
{
    detail::require(parts >= 1 && total >= 0, "weak composition needs parts >= 1, total >= 0");
    return binomial_u64(total + parts - 1, parts - 1);
}

std::uint64_t composition_rank(std::span<const int> entries)
{
    const int parts = static_cast<int>(entries.size());
    int remaining = std::accumulate(entries.begin(), entries.end(), 0);
    std::uint64_t rank = 0;
    for (int i = 0; i + 1 < parts; ++i) {
        for (int v = 0; v < entries[static_cast<std::size_t>(i)]; ++v)
            rank += weak_composition_count(remaining - v, parts - i - 1);
        remaining -= entries[static_cast<std::size_t>(i)];
    }
    return rank;
}

std::vector<int> composition_unrank(std::uint64_t rank, int total, int parts)
{
    std::vector<int> out(static_cast<std::size_t>(parts), 0);
    int remaining = total;
    for (int i = 0; i + 1 < parts; ++i) {
        int v = 0;
        while (true) {
            const auto block = weak_composition_count(remaining - v, parts - i - 1);
            if (rank < block) break;
            rank -= block;
            ++v;
            if (v > remaining) throw ArgumentError("composition rank out of range");
        }
        out[static_cast<std::size_t>(i)] = v;
        remaining -= v;
    }
    out.back() = remaining;
    if (rank != 0) throw ArgumentError("composition rank out of range");
    return out;
}

bool next_composition(std::vector<int>& e)
{
    const int m = static_cast<int>(e.size());
    int suffix = m > 0 ? e.back() : 0;
    for (int i = m - 2; i >= 0; --i) {
        if (suffix > 0) {
            e[static_cast<std::size_t>(i)] += 1;
            for (int j = i + 1; j < m; ++j) e[static_cast<std::size_t>(j)] = 0;
            e.back() = suffix - 1;
            return true;
        }
        suffix += e[static_cast<std::size_t>(i)];
    }
    return false;
}

double to_double(const BigInt& v) { return v.convert_to<double>(); }

}  // namespace permsym

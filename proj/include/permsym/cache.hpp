#pragma once

// Versioned binary cache for ChangeOfBasis tables. Layout (host byte order,
// guarded by an endianness tag):
//   "PSYMCOB\0" | u32 version | u32 0x01020304
//   spec: u32 #dims, i32 dims…, i32 copies, u8 materialized
//   u32 #blocks, per block: str label, i32[] λ, tableaux, i32 m, str f,
//       str copies, f64 mult, mat gram, mat factor
//   raw, ortho: u64 #orbits, per orbit u32 #entries of (u32 block, u32 row,
//       u32 col, f64 value)
//   f64[] orbit_norm2 | u64 FNV-1a checksum of everything before it
// str = u32 length + bytes, T[] = u32 count + items, mat = u32 rows,
// u32 cols, f64 column-major. Files are written to a temporary name and
// renamed into place.

#include "permsym/algebra_ext.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>

namespace permsym {

inline constexpr std::uint32_t kCobCacheVersion = 1;

void save_cob(const ChangeOfBasis& cob, const std::filesystem::path& file);
/// Throws ParseError on a bad magic, version, checksum or truncated file.
ChangeOfBasis load_cob(const std::filesystem::path& file);

/// PERMSYM_CACHE when set, otherwise `flag`.
std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::filesystem::path>& flag);

/// In-memory map in front of an optional cache directory. A corrupt file is
/// rebuilt and overwritten.
class CobCache {
public:
    explicit CobCache(std::optional<std::filesystem::path> dir = std::nullopt) : dir_(std::move(dir)) {}

    CobPtr plain(int d, int n, std::uint64_t budget = kDefaultOrbitBudget);
    CobPtr algebra(const AlgebraSpec& spec, std::uint64_t budget = kDefaultOrbitBudget);

    const std::optional<std::filesystem::path>& dir() const { return dir_; }
    /// Number of tables built (not loaded) by this instance.
    int builds() const { return builds_; }

private:
    CobPtr get(const std::string& key, const std::function<ChangeOfBasis()>& build);

    std::optional<std::filesystem::path> dir_;
    std::map<std::string, CobPtr> memory_;
    std::mutex mutex_;
    int builds_ = 0;
};

}  // namespace permsym

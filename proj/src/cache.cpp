#include "permsym/cache.hpp"

#include "permsym/error.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace permsym {

namespace {

constexpr char kMagic[8] = {'P', 'S', 'Y', 'M', 'C', 'O', 'B', '\0'};
constexpr std::uint32_t kEndianTag = 0x01020304;

std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

class Writer {
public:
    template <class T>
    void pod(const T& v)
    {
        out_.append(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void u32(std::size_t v) { pod(static_cast<std::uint32_t>(v)); }
    void str(const std::string& s)
    {
        u32(s.size());
        out_ += s;
    }
    void ints(const std::vector<int>& v)
    {
        u32(v.size());
        for (int x : v) pod(static_cast<std::int32_t>(x));
    }
    void mat(const Eigen::MatrixXd& m)
    {
        u32(static_cast<std::size_t>(m.rows()));
        u32(static_cast<std::size_t>(m.cols()));
        for (long i = 0; i < m.size(); ++i) pod(m.data()[i]);
    }
    void entries(const std::vector<std::vector<std::pair<std::uint32_t, OrbitBlockEntry>>>& table)
    {
        pod(static_cast<std::uint64_t>(table.size()));
        for (const auto& row : table) {
            u32(row.size());
            for (const auto& [b, e] : row) {
                pod(b);
                pod(e.row);
                pod(e.col);
                pod(e.value);
            }
        }
    }
    std::string& bytes() { return out_; }

private:
    std::string out_;
};

class Reader {
public:
    Reader(const std::string& bytes, std::string file) : in_(bytes), file_(std::move(file)) {}

    template <class T>
    T pod()
    {
        if (pos_ + sizeof(T) > in_.size()) fail("truncated");
        T v;
        std::memcpy(&v, in_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::uint32_t u32() { return pod<std::uint32_t>(); }
    std::size_t count(std::size_t item_size)
    {
        const std::size_t c = u32();
        if (c > (in_.size() - pos_) / std::max<std::size_t>(item_size, 1)) fail("implausible length");
        return c;
    }
    std::string str()
    {
        const auto len = count(1);
        std::string s = in_.substr(pos_, len);
        pos_ += len;
        return s;
    }
    std::vector<int> ints()
    {
        std::vector<int> v(count(4));
        for (auto& x : v) x = pod<std::int32_t>();
        return v;
    }
    Eigen::MatrixXd mat()
    {
        const long r = u32();
        const long c = u32();
        if (static_cast<std::size_t>(r) * static_cast<std::size_t>(c) * 8 > in_.size() - pos_) fail("truncated matrix");
        Eigen::MatrixXd m(r, c);
        for (long i = 0; i < m.size(); ++i) m.data()[i] = pod<double>();
        return m;
    }
    std::vector<std::vector<std::pair<std::uint32_t, OrbitBlockEntry>>> entries()
    {
        const auto n = pod<std::uint64_t>();
        if (n > in_.size() - pos_) fail("implausible orbit count");
        std::vector<std::vector<std::pair<std::uint32_t, OrbitBlockEntry>>> table(n);
        for (auto& row : table) {
            row.resize(count(20));
            for (auto& [b, e] : row) {
                b = u32();
                e.row = u32();
                e.col = u32();
                e.value = pod<double>();
            }
        }
        return table;
    }
    bool at_end() const { return pos_ == in_.size(); }
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("cache file " + file_ + ": " + what + " at byte " + std::to_string(pos_));
    }

private:
    const std::string& in_;
    std::string file_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ParseError("cache file " + file.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void save_cob(const ChangeOfBasis& cob, const std::filesystem::path& file)
{
    detail::require(cob.basis != nullptr, "change of basis has no orbit basis");
    Writer w;
    w.bytes().append(kMagic, sizeof(kMagic));
    w.pod(kCobCacheVersion);
    w.pod(kEndianTag);
    w.ints(cob.basis->spec().local_dims);
    w.pod(static_cast<std::int32_t>(cob.basis->spec().copies));
    w.pod(static_cast<std::uint8_t>(cob.basis->materialized() ? 1 : 0));
    w.u32(cob.blocks.size());
    for (const auto& b : cob.blocks) {
        w.str(b.label);
        w.ints(b.lambda.parts);
        w.u32(b.tableaux.size());
        for (const auto& t : b.tableaux) {
            w.u32(t.rows.size());
            for (const auto& row : t.rows) w.ints(row);
        }
        w.pod(static_cast<std::int32_t>(b.m));
        w.str(b.f.str());
        w.str(b.copies.str());
        w.pod(b.mult);
        w.mat(b.gram);
        w.mat(b.factor);
    }
    w.entries(cob.raw);
    w.entries(cob.ortho);
    w.pod(static_cast<std::uint64_t>(cob.orbit_norm2.size()));
    for (double v : cob.orbit_norm2) w.pod(v);
    w.pod(fnv1a(w.bytes()));

    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(&w));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ArgumentError("cannot write cache file " + tmp.string());
        out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
        if (!out) throw ArgumentError("cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

ChangeOfBasis load_cob(const std::filesystem::path& file)
{
    const std::string bytes = read_file(file);
    Reader r(bytes, file.string());
    if (bytes.size() < sizeof(kMagic) + 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        r.fail("bad magic");
    std::uint64_t stored = 0;
    std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
    if (stored != fnv1a(bytes.substr(0, bytes.size() - 8))) r.fail("checksum mismatch");
    const std::string body = bytes.substr(0, bytes.size() - 8);
    Reader in(body, file.string());
    for (std::size_t i = 0; i < sizeof(kMagic); ++i) in.pod<char>();
    if (const auto v = in.u32(); v != kCobCacheVersion) in.fail("unsupported version " + std::to_string(v));
    if (in.u32() != kEndianTag) in.fail("byte order mismatch");

    ChangeOfBasis cob;
    auto dims = in.ints();
    const int copies = in.pod<std::int32_t>();
    const bool materialized = in.pod<std::uint8_t>() != 0;
    SystemSpec spec(std::move(dims), copies);
    cob.basis = std::make_shared<OrbitBasis>(materialized ? enumerate_orbits(spec) : OrbitBasis(spec));
    cob.blocks.resize(in.count(1));
    for (auto& b : cob.blocks) {
        b.label = in.str();
        b.lambda.parts = in.ints();
        b.tableaux.resize(in.count(4));
        for (auto& t : b.tableaux) {
            t.rows.resize(in.count(4));
            for (auto& row : t.rows) row = in.ints();
        }
        b.m = in.pod<std::int32_t>();
        b.f = BigInt(in.str());
        b.copies = BigInt(in.str());
        b.mult = in.pod<double>();
        b.gram = in.mat();
        b.factor = in.mat();
    }
    cob.raw = in.entries();
    cob.ortho = in.entries();
    const auto norms = in.pod<std::uint64_t>();
    if (norms > body.size()) in.fail("implausible norm count");
    cob.orbit_norm2.resize(norms);
    for (auto& v : cob.orbit_norm2) v = in.pod<double>();
    if (!in.at_end()) in.fail("trailing bytes");
    if (cob.ortho.size() != cob.basis->size()) in.fail("orbit table does not match the basis");
    for (const auto& row : cob.ortho)
        for (const auto& [b, e] : row)
            if (b >= cob.blocks.size() || e.row >= static_cast<std::uint32_t>(cob.blocks[b].m) ||
                e.col >= static_cast<std::uint32_t>(cob.blocks[b].m))
                in.fail("entry outside its block");
    return cob;
}

std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::filesystem::path>& flag)
{
    if (const char* env = std::getenv("PERMSYM_CACHE"); env != nullptr && *env != '\0')
        return std::filesystem::path(env);
    return flag;
}

CobPtr CobCache::get(const std::string& key, const std::function<ChangeOfBasis()>& build)
{
    std::lock_guard lock(mutex_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
    std::optional<std::filesystem::path> file;
    if (dir_) file = *dir_ / (key + ".v" + std::to_string(kCobCacheVersion) + ".cob");
    CobPtr out;
    if (file && std::filesystem::exists(*file)) {
        try {
            out = std::make_shared<const ChangeOfBasis>(load_cob(*file));
        } catch (const ParseError&) {
            out = nullptr;
        }
    }
    if (!out) {
        out = std::make_shared<const ChangeOfBasis>(build());
        ++builds_;
        if (file) save_cob(*out, *file);
    }
    memory_.emplace(key, out);
    return out;
}

CobPtr CobCache::plain(int d, int n, std::uint64_t budget)
{
    const std::string key = "plain_d" + std::to_string(d) + "_n" + std::to_string(n);
    return get(key, [&] { return build_change_of_basis(d, n, false, budget); });
}

CobPtr CobCache::algebra(const AlgebraSpec& spec, std::uint64_t budget)
{
    std::string key = "algebra_b";
    for (std::size_t i = 0; i < spec.blocks.size(); ++i) key += (i ? "-" : "") + std::to_string(spec.blocks[i]);
    key += "_n" + std::to_string(spec.copies);
    return get(key, [&] { return build_algebra_cob(spec, budget); });
}

}  // namespace permsym

#include "permsym/algebra_ext.hpp"

#include "permsym/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace permsym {

AlgebraSpec::AlgebraSpec(std::vector<int> b, int n) : blocks(std::move(b)), copies(n)
{
    detail::require(!blocks.empty(), "an algebra needs at least one block");
    for (int x : blocks) detail::require(x >= 1, "block dimensions must be positive");
    detail::require(n >= 1, "copies must be positive");
}

int AlgebraSpec::d() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }

std::vector<int> AlgebraSpec::offsets() const
{
    std::vector<int> off;
    int acc = 0;
    for (int x : blocks) {
        off.push_back(acc);
        acc += x;
    }
    return off;
}

namespace {

std::vector<int> block_of_symbol(const std::vector<int>& blocks)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < blocks.size(); ++i) out.insert(out.end(), static_cast<std::size_t>(blocks[i]), static_cast<int>(i));
    return out;
}

}  // namespace

std::vector<bool> AlgebraSpec::mask() const
{
    const auto owner = block_of_symbol(blocks);
    const int dd = d();
    std::vector<bool> m(static_cast<std::size_t>(dd * dd));
    for (int a = 0; a < dd; ++a)
        for (int b = 0; b < dd; ++b) m[static_cast<std::size_t>(a * dd + b)] = owner[static_cast<std::size_t>(a)] == owner[static_cast<std::size_t>(b)];
    return m;
}

bool is_block_diagonal(const CountMatrix& e, const std::vector<int>& blocks)
{
    const auto owner = block_of_symbol(blocks);
    if (static_cast<int>(owner.size()) != e.d()) return false;
    for (int a = 0; a < e.d(); ++a)
        for (int b = 0; b < e.d(); ++b)
            if (e(a, b) != 0 && owner[static_cast<std::size_t>(a)] != owner[static_cast<std::size_t>(b)]) return false;
    return true;
}

std::vector<CountMatrix> algebra_orbits(const AlgebraSpec& spec, std::uint64_t budget)
{
    return enumerate_supported(spec.d(), spec.copies, spec.mask(), budget);
}

BigInt algebra_orbit_count(const AlgebraSpec& spec)
{
    int positions = 0;
    for (int x : spec.blocks) positions += x * x;
    return binomial(spec.copies + positions - 1, spec.copies);
}

SplitOrbit split_orbit(const CountMatrix& e, const std::vector<int>& blocks)
{
    if (!is_block_diagonal(e, blocks)) throw ArgumentError("count matrix is not block diagonal");
    SplitOrbit out;
    int off = 0;
    for (int di : blocks) {
        CountMatrix part = CountMatrix::zeros(di);
        int mu = 0;
        for (int a = 0; a < di; ++a)
            for (int b = 0; b < di; ++b) {
                part.at(a, b) = e(off + a, off + b);
                mu += part(a, b);
            }
        out.mu.push_back(mu);
        out.parts.push_back(std::move(part));
        off += di;
    }
    return out;
}

CountMatrix glue_orbit(const std::vector<CountMatrix>& parts)
{
    int d = 0;
    for (const auto& p : parts) d += p.d();
    CountMatrix e = CountMatrix::zeros(d);
    int off = 0;
    for (const auto& p : parts) {
        for (int a = 0; a < p.d(); ++a)
            for (int b = 0; b < p.d(); ++b) e.at(off + a, off + b) = p(a, b);
        off += p.d();
    }
    return e;
}

namespace {

/// Compositions of n into k parts, descending lexicographic.
void compositions_desc(int n, std::size_t k, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (cur.size() + 1 == k) {
        cur.push_back(n);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = n; v >= 0; --v) {
        cur.push_back(v);
        compositions_desc(n - v, k, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<Partition>> block_partitions(const AlgebraSpec& spec, const std::vector<int>& mu)
{
    std::vector<std::vector<Partition>> out;
    for (std::size_t j = 0; j < mu.size(); ++j)
        out.push_back(mu[j] == 0 ? std::vector<Partition>{Partition{}} : partitions(spec.blocks[j], mu[j]));
    return out;
}

}  // namespace

std::vector<FlagProfile> flag_profiles(const AlgebraSpec& spec)
{
    std::vector<std::vector<int>> mus;
    std::vector<int> cur;
    compositions_desc(spec.copies, spec.num_blocks(), cur, mus);
    std::vector<FlagProfile> out;
    for (const auto& mu : mus) {
        const auto options = block_partitions(spec, mu);
        FlagProfile p;
        p.mu = mu;
        p.copies = multinomial(mu);
        std::function<void(std::size_t)> rec = [&](std::size_t j) {
            if (j == mu.size()) {
                out.push_back(p);
                return;
            }
            for (const auto& l : options[j]) {
                const BigInt f = p.f, m = p.m;
                p.lambdas.push_back(l);
                if (mu[j] > 0) {
                    p.f *= syt_count(l);
                    p.m *= ssyt_count(l, spec.blocks[j]);
                }
                rec(j + 1);
                p.lambdas.pop_back();
                p.f = f;
                p.m = m;
            }
        };
        rec(0);
    }
    return out;
}

ChangeOfBasis build_algebra_cob(const AlgebraSpec& spec, std::uint64_t budget)
{
    const int d = spec.d(), n = spec.copies;
    const SystemSpec embed({d}, n);
    auto basis = std::make_shared<OrbitBasis>(embed);
    if (basis->size() > budget)
        throw CapacityError("algebra embedding has " + std::to_string(basis->size()) + " orbits, above budget " +
                            std::to_string(budget));

    // Single-factor tables per (block dimension, copies).
    std::map<std::pair<int, int>, std::shared_ptr<ChangeOfBasis>> sub;
    auto sub_cob = [&](int dj, int mj) -> const ChangeOfBasis& {
        auto& slot = sub[{dj, mj}];
        if (!slot) slot = std::make_shared<ChangeOfBasis>(build_change_of_basis(dj, mj, false, budget));
        return *slot;
    };

    ChangeOfBasis cob;
    cob.basis = basis;
    cob.ortho.resize(basis->size());
    cob.raw.resize(basis->size());
    cob.orbit_norm2.assign(basis->size(), 0.0);

    const auto profiles = flag_profiles(spec);
    std::map<std::pair<std::vector<int>, std::vector<int>>, std::uint32_t> profile_index;  // (μ, block ids)
    for (const auto& p : profiles) {
        BlockInfo info;
        std::vector<int> ids;
        info.label = "mu=(";
        for (std::size_t j = 0; j < p.mu.size(); ++j) info.label += (j ? "," : "") + std::to_string(p.mu[j]);
        info.label += ")";
        for (std::size_t j = 0; j < p.mu.size(); ++j) {
            info.label += (j ? "x" : " ");
            info.label += "(";
            for (int k = 0; k < p.lambdas[j].height(); ++k) info.label += (k ? "," : "") + std::to_string(p.lambdas[j][k]);
            info.label += ")";
            int id = 0;
            if (p.mu[j] > 0) {
                const auto parts = partitions(spec.blocks[j], p.mu[j]);
                id = static_cast<int>(std::find(parts.begin(), parts.end(), p.lambdas[j]) - parts.begin());
            }
            ids.push_back(id);
        }
        info.m = static_cast<int>(p.m);
        info.f = p.f;
        info.copies = p.copies;
        info.mult = to_double(p.copies * p.f);
        profile_index[{p.mu, ids}] = static_cast<std::uint32_t>(cob.blocks.size());
        cob.blocks.push_back(std::move(info));
    }

    const std::size_t ell = spec.num_blocks();
    for (const auto& e : algebra_orbits(spec, budget)) {
        const auto r = basis->index(e);
        cob.orbit_norm2[r] = to_double(orbit_size(e));
        const auto sp = split_orbit(e, spec.blocks);
        // Per block factor: entries grouped by the factor's block index.
        std::vector<std::map<int, std::vector<OrbitBlockEntry>>> groups(ell);
        for (std::size_t j = 0; j < ell; ++j) {
            if (sp.mu[j] == 0) {
                groups[j][0].push_back({0, 0, 1.0});
                continue;
            }
            const auto& c = sub_cob(spec.blocks[j], sp.mu[j]);
            for (const auto& [b, en] : c.ortho[c.basis->index(sp.parts[j])]) groups[j][static_cast<int>(b)].push_back(en);
        }
        // Cartesian product over block choices, then over entries.
        std::function<void(std::size_t, std::vector<int>&)> rec = [&](std::size_t j, std::vector<int>& ids) {
            if (j == ell) {
                const auto pi = profile_index.at({sp.mu, ids});
                std::vector<int> dims(ell, 1);
                for (std::size_t q = 0; q < ell; ++q)
                    if (sp.mu[q] > 0) dims[q] = sub_cob(spec.blocks[q], sp.mu[q]).blocks[static_cast<std::size_t>(ids[q])].m;
                std::vector<std::size_t> pick(ell, 0);
                while (true) {
                    OrbitBlockEntry out{0, 0, 1.0};
                    for (std::size_t q = 0; q < ell; ++q) {
                        const auto& en = groups[q].at(ids[q])[pick[q]];
                        out.row = out.row * static_cast<std::uint32_t>(dims[q]) + en.row;
                        out.col = out.col * static_cast<std::uint32_t>(dims[q]) + en.col;
                        out.value *= en.value;
                    }
                    cob.ortho[r].emplace_back(pi, out);
                    std::size_t q = ell;
                    bool done = true;
                    while (q > 0) {
                        --q;
                        if (++pick[q] < groups[q].at(ids[q]).size()) {
                            done = false;
                            break;
                        }
                        pick[q] = 0;
                    }
                    if (done) break;
                }
                return;
            }
            for (const auto& [b, entries] : groups[j]) {
                ids.push_back(b);
                rec(j + 1, ids);
                ids.pop_back();
            }
        };
        std::vector<int> ids;
        rec(0, ids);
    }
    return cob;
}

namespace {

void require_in_algebra(const OrbitCoefficients& x, const ChangeOfBasis& cob)
{
    for (const auto& [r, v] : x.values)
        if (v != cplx{} && cob.ortho[r].empty()) throw ArgumentError("coefficients have weight outside the algebra");
}

}  // namespace

BlockRep algebra_block_diag(const OrbitCoefficients& x, CobPtr cob)
{
    require_in_algebra(x, *cob);
    return psi_tilde(x, std::move(cob));
}

BlockRep algebra_block_diag(const RefCoefficients& x, CobPtr cob)
{
    for (const auto& e : x.entries) require_in_algebra(e, *cob);
    return psi_tilde(x, std::move(cob));
}

BigInt kappa_decomposed(const CountMatrix& e, const std::vector<int>& blocks_a, const std::vector<int>& blocks_b)
{
    const int da = std::accumulate(blocks_a.begin(), blocks_a.end(), 0);
    const int db = std::accumulate(blocks_b.begin(), blocks_b.end(), 0);
    detail::require(e.d() == da * db, "count matrix does not match the bipartite algebra");
    const auto own_a = block_of_symbol(blocks_a), own_b = block_of_symbol(blocks_b);
    std::vector<int> off_a(blocks_a.size()), off_b(blocks_b.size());
    for (std::size_t i = 1; i < blocks_a.size(); ++i) off_a[i] = off_a[i - 1] + blocks_a[i - 1];
    for (std::size_t j = 1; j < blocks_b.size(); ++j) off_b[j] = off_b[j - 1] + blocks_b[j - 1];
    for (int p = 0; p < e.d(); ++p)
        for (int q = 0; q < e.d(); ++q)
            if (e(p, q) != 0 && (own_a[static_cast<std::size_t>(p / db)] != own_a[static_cast<std::size_t>(q / db)] ||
                                 own_b[static_cast<std::size_t>(p % db)] != own_b[static_cast<std::size_t>(q % db)]))
                throw ArgumentError("count matrix is not block diagonal in both factors");

    BigInt num = 1, den = 1;
    for (std::size_t i = 0; i < blocks_a.size(); ++i) {
        const int di = blocks_a[i];
        CountMatrix r_i = CountMatrix::zeros(di);
        std::vector<int> mu_ij;
        for (std::size_t j = 0; j < blocks_b.size(); ++j) {
            const int dj = blocks_b[j];
            CountMatrix s = CountMatrix::zeros(di * dj);
            int mu = 0;
            for (int aa = 0; aa < di; ++aa)
                for (int ab = 0; ab < dj; ++ab)
                    for (int ba = 0; ba < di; ++ba)
                        for (int bb = 0; bb < dj; ++bb) {
                            const int v = e((off_a[i] + aa) * db + off_b[j] + ab, (off_a[i] + ba) * db + off_b[j] + bb);
                            s.at(aa * dj + ab, ba * dj + bb) = v;
                            mu += v;
                        }
            mu_ij.push_back(mu);
            if (mu == 0) continue;
            const auto r_ij = marginal(s, di, dj, Side::A);
            for (int a = 0; a < di; ++a)
                for (int b = 0; b < di; ++b) r_i.at(a, b) += r_ij(a, b);
            num *= orbit_size(r_ij) * kappa(s, di, dj, Side::A);
        }
        num *= multinomial(mu_ij);
        den *= orbit_size(r_i);
    }
    if (num % den != 0) throw NumericalError("kappa decomposition is not integral");
    return num / den;
}

namespace {

void check_algebra_channel(const OrbitCoefficients& channel, const MarginalData& md, const std::vector<int>& blocks_a,
                           const std::vector<int>& blocks_b, bool cross_check)
{
    const auto& dims = md.spec.local_dims;
    detail::require(std::accumulate(blocks_a.begin(), blocks_a.end(), 0) == dims[0] &&
                        std::accumulate(blocks_b.begin(), blocks_b.end(), 0) == dims[1],
                    "algebra blocks do not match the channel dimensions");
    for (const auto& [s, v] : channel.values) {
        if (v == cplx{}) continue;
        const auto e = channel.basis->orbit(s);
        const BigInt k = kappa_decomposed(e, blocks_a, blocks_b);
        if (cross_check) {
            const auto* m = md.find(s);
            if (m == nullptr) throw ArgumentError("marginal data lacks a channel orbit");
            if (k != m->kappa_a) throw NumericalError("kappa decomposition disagrees with the direct value");
        }
    }
}

}  // namespace

RefCoefficients algebra_link_after_encoder(const OrbitCoefficients& channel, const RefCoefficients& encoder,
                                           const MarginalData& md, const std::vector<int>& blocks_a,
                                           const std::vector<int>& blocks_b, bool cross_check)
{
    check_algebra_channel(channel, md, blocks_a, blocks_b, cross_check);
    return compose_after_encoder(channel, encoder, md);
}

RefCoefficients algebra_link_before_decoder(const OrbitCoefficients& channel, const RefCoefficients& decoder,
                                            const MarginalData& md, const std::vector<int>& blocks_a,
                                            const std::vector<int>& blocks_b, bool cross_check)
{
    check_algebra_channel(channel, md, blocks_a, blocks_b, cross_check);
    return compose_before_decoder(channel, decoder, md);
}

}  // namespace permsym

#include "permsym/link_product.hpp"

#include "permsym/error.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace permsym {

RefCoefficients RefCoefficients::zeros(int d_r, BasisPtr basis, RefOrder order)
{
    detail::require(d_r >= 1, "reference dimension must be >= 1");
    if (d_r > kMaxReferenceDim)
        throw ArgumentError("reference dimension " + std::to_string(d_r) + " exceeds the supported maximum " +
                            std::to_string(kMaxReferenceDim));
    RefCoefficients x;
    x.d_r = d_r;
    x.order = order;
    x.basis = basis;
    x.entries.assign(static_cast<std::size_t>(d_r * d_r), OrbitCoefficients(basis));
    return x;
}

RefCoefficients adjoint(const RefCoefficients& x)
{
    auto out = RefCoefficients::zeros(x.d_r, x.basis,
                                      x.order == RefOrder::RefFirst ? RefOrder::RefLast : RefOrder::RefFirst);
    for (int k = 0; k < x.d_r; ++k)
        for (int l = 0; l < x.d_r; ++l) out.at(k, l) = transpose_coeffs(x.at(l, k));
    return out;
}

namespace {

void check_channel(const OrbitCoefficients& channel, const MarginalData& md)
{
    detail::require(channel.basis->spec() == md.spec, "marginal data built for a different channel spec");
}

}  // namespace

RefCoefficients compose_after_encoder(const OrbitCoefficients& channel, const RefCoefficients& encoder,
                                      const MarginalData& md)
{
    check_channel(channel, md);
    detail::require(encoder.order == RefOrder::RefFirst, "encoder coefficients must have the reference first");
    detail::require(encoder.basis->spec() == md.a->spec(), "encoder does not act on the channel input");
    auto out = RefCoefficients::zeros(encoder.d_r, md.b, RefOrder::RefFirst);
    for (const auto& [s, cn] : channel.values) {
        const auto* m = md.find(s);
        if (m == nullptr) throw ArgumentError("marginal data lacks a channel orbit");
        const cplx w = cn * m->kappa_b_f;
        for (std::size_t kl = 0; kl < encoder.entries.size(); ++kl) {
            const cplx ce = encoder.entries[kl].get(m->r);
            if (ce != cplx{}) out.entries[kl].add(m->t, w * ce);
        }
    }
    return out;
}

RefCoefficients compose_before_decoder(const OrbitCoefficients& channel, const RefCoefficients& decoder,
                                       const MarginalData& md)
{
    check_channel(channel, md);
    detail::require(decoder.order == RefOrder::RefLast, "decoder coefficients must have the reference last");
    detail::require(decoder.basis->spec() == md.b->spec(), "decoder does not act on the channel output");
    auto out = RefCoefficients::zeros(decoder.d_r, md.a, RefOrder::RefLast);
    for (const auto& [s, cn] : channel.values) {
        const auto* m = md.find(s);
        if (m == nullptr) throw ArgumentError("marginal data lacks a channel orbit");
        const cplx w = cn * m->kappa_a_f;
        for (std::size_t kl = 0; kl < decoder.entries.size(); ++kl) {
            const cplx cd = decoder.entries[kl].get(m->t);
            if (cd != cplx{}) out.entries[kl].add(m->r, w * cd);
        }
    }
    return out;
}

TripartiteTable build_tripartite(const std::vector<int>& dims, int n, const std::optional<std::vector<bool>>& support_ab,
                                 const std::optional<std::vector<bool>>& support_bc, std::uint64_t budget)
{
    detail::require(dims.size() == 3, "tripartite table needs three local dimensions");
    const int da = dims[0], db = dims[1], dc = dims[2];
    const int dab = da * db, dbc = db * dc, dac = da * dc;
    if (support_ab) detail::require(support_ab->size() == static_cast<std::size_t>(dab * dab), "AB support mask size");
    if (support_bc) detail::require(support_bc->size() == static_cast<std::size_t>(dbc * dbc), "BC support mask size");

    TripartiteTable table;
    table.dims = dims;
    table.n = n;
    table.ab = std::make_shared<OrbitBasis>(SystemSpec({da, db}, n));
    table.bc = std::make_shared<OrbitBasis>(SystemSpec({db, dc}, n));
    table.ac = std::make_shared<OrbitBasis>(SystemSpec({da, dc}, n));

    // Position ((aA,aB,aC),(bA,bB,bC)) of E_z. Its contribution to C_s sits at
    // ((aA,bB),(bA,aB)) and to C_u at ((bB,aC),(aB,bC)), the partial transposes on B.
    struct Pos {
        int s_idx, u_idx, w_idx;
    };
    std::vector<Pos> pos;
    for (int aa = 0; aa < da; ++aa)
        for (int ab = 0; ab < db; ++ab)
            for (int ac = 0; ac < dc; ++ac)
                for (int ba = 0; ba < da; ++ba)
                    for (int bb = 0; bb < db; ++bb)
                        for (int bc = 0; bc < dc; ++bc) {
                            const int s_pt = (aa * db + bb) * dab + (ba * db + ab);
                            const int u_pt = (bb * dc + ac) * dbc + (ab * dc + bc);
                            if (support_ab && !(*support_ab)[static_cast<std::size_t>(s_pt)]) continue;
                            if (support_bc && !(*support_bc)[static_cast<std::size_t>(u_pt)]) continue;
                            const int w_idx = (aa * dc + ac) * dac + (ba * dc + bc);
                            pos.push_back({s_pt, u_pt, w_idx});
                        }
    std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, BigInt> acc;
    if (!pos.empty()) {
        const auto count = weak_composition_count(n, static_cast<int>(pos.size()));
        if (count > budget)
            throw CapacityError("tripartite enumeration of " + std::to_string(count) + " count matrices exceeds budget " +
                                std::to_string(budget));
        std::vector<int> c(pos.size(), 0);
        c.back() = n;
        std::vector<int> es(static_cast<std::size_t>(dab * dab)), eu(static_cast<std::size_t>(dbc * dbc)),
            ew(static_cast<std::size_t>(dac * dac));
        std::vector<std::vector<int>> groups(static_cast<std::size_t>(dac * dac));
        do {
            std::fill(es.begin(), es.end(), 0);
            std::fill(eu.begin(), eu.end(), 0);
            std::fill(ew.begin(), ew.end(), 0);
            for (auto& g : groups) g.clear();
            for (std::size_t p = 0; p < pos.size(); ++p) {
                const int v = c[p];
                if (v == 0) continue;
                es[static_cast<std::size_t>(pos[p].s_idx)] += v;
                eu[static_cast<std::size_t>(pos[p].u_idx)] += v;
                ew[static_cast<std::size_t>(pos[p].w_idx)] += v;
                groups[static_cast<std::size_t>(pos[p].w_idx)].push_back(v);
            }
            BigInt k = 1;
            for (const auto& g : groups)
                if (g.size() > 1) k *= multinomial(g);
            const auto s = table.ab->index(CountMatrix(dab, es));
            const auto u = table.bc->index(CountMatrix(dbc, eu));
            const auto w = table.ac->index(CountMatrix(dac, ew));
            acc[{s, u, w}] += k;
        } while (next_composition(c));
    }
    table.entries.reserve(acc.size());
    for (auto& [key, k] : acc) {
        TripartiteEntry e;
        std::tie(e.s, e.u, e.w) = key;
        e.k = k;
        e.k_f = to_double(k);
        table.entries.push_back(std::move(e));
    }
    return table;
}

OrbitCoefficients compose_covariant(const OrbitCoefficients& n_coeffs, const OrbitCoefficients& o_coeffs,
                                    const TripartiteTable& table)
{
    detail::require(n_coeffs.basis->spec() == table.ab->spec(), "first channel does not match the table");
    detail::require(o_coeffs.basis->spec() == table.bc->spec(), "second channel does not match the table");
    OrbitCoefficients out(table.ac);
    for (const auto& e : table.entries) {
        const cplx a = n_coeffs.get(e.s);
        if (a == cplx{}) continue;
        const cplx b = o_coeffs.get(e.u);
        if (b == cplx{}) continue;
        out.add(e.w, e.k_f * a * b);
    }
    return out;
}

RefCoefficients apply_channel_to_state(const RefCoefficients& state, const OrbitCoefficients& channel,
                                       const MarginalData& md)
{
    return compose_after_encoder(channel, state, md);
}

OrbitCoefficients apply_channel_to_state(const OrbitCoefficients& state, const OrbitCoefficients& channel,
                                         const TripartiteTable& table)
{
    return compose_covariant(state, channel, table);
}

}  // namespace permsym

#include "doctest.h"

#include "permsym/error.hpp"
#include "permsym/link_product.hpp"
#include "permsym/oracle/dense.hpp"

using namespace permsym;
namespace dn = permsym::oracle;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

BasisPtr basis(std::vector<int> dims, int n) { return std::make_shared<OrbitBasis>(SystemSpec(std::move(dims), n)); }

Eigen::MatrixXcd adc_choi(double g)
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1;
    m(0, 3) = m(3, 0) = std::sqrt(1 - g);
    m(2, 2) = g;
    m(3, 3) = 1 - g;
    return m;
}

Eigen::MatrixXcd depol_choi(double p)
{
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Zero(4, 4);
    id(0, 0) = id(0, 3) = id(3, 0) = id(3, 3) = 1;
    return (1 - p) * id + (p / 2) * Eigen::MatrixXcd::Identity(4, 4);
}

/// Dense blocked A^n B^n Choi of a coefficient vector on [d_a, d_b].
Eigen::MatrixXcd blocked(const OrbitCoefficients& x)
{
    const auto& sp = x.basis->spec();
    return dn::interleaved_to_blocked(dn::dense_from_coeffs(x), sp.local_dims[0], sp.local_dims[1], sp.copies);
}

/// Random CPTP map R -> S^n, symmetrized on S^n.
Eigen::MatrixXcd random_sym_encoder(int d_r, int d, int n, std::mt19937_64& rng)
{
    return dn::symmetrize_with_reference(dn::random_cptp_choi(d_r, dn::ipow(d, n), rng), d_r, d, n, true);
}

}  // namespace

TEST_CASE("reference dimension limit")
{
    CHECK_THROWS_AS(RefCoefficients::zeros(16, basis({2}, 4)), ArgumentError);
    CHECK_NOTHROW(RefCoefficients::zeros(kMaxReferenceDim, basis({2}, 2)));
}

TEST_CASE("compose after encoder matches the dense link product")
{
    std::mt19937_64 rng(21);
    for (int n = 1; n <= 3; ++n) {
        auto ba = basis({2}, n);
        auto bab = basis({2, 2}, n);
        const auto enc_dense = random_sym_encoder(2, 2, n, rng);
        const auto enc = dn::ref_from_dense(enc_dense, 2, ba, RefOrder::RefFirst);
        CHECK(max_abs(dn::dense_from_ref(enc) - enc_dense) < 1e-12);
        const auto chan = tensor_coefficients(adc_choi(0.3), n, bab);
        const auto md = marginal_data_for(chan);
        const auto m = compose_after_encoder(chan, enc, md);
        const long pa = dn::ipow(2, n);
        const auto ref = dn::link(enc_dense, blocked(chan), 2, pa, pa);
        CHECK(max_abs(dn::dense_from_ref(m) - ref) < 1e-10);

        // Trace preservation propagates: Tr_{B^n} of the composition is 1_R.
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                CHECK(std::abs(trace_coeffs(m.at(k, l)) - (k == l ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("identity channel leaves the encoder unchanged")
{
    std::mt19937_64 rng(4);
    const int n = 2;
    auto ba = basis({2}, n);
    const auto enc = dn::ref_from_dense(random_sym_encoder(2, 2, n, rng), 2, ba, RefOrder::RefFirst);
    const auto chan = tensor_coefficients(adc_choi(0.0), n, basis({2, 2}, n));
    const auto m = compose_after_encoder(chan, enc, marginal_data_for(chan));
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            for (std::uint64_t r = 0; r < ba->size(); ++r) CHECK(std::abs(m.at(k, l).get(r) - enc.at(k, l).get(r)) < 1e-12);
}

TEST_CASE("compose before decoder matches the dense link product")
{
    std::mt19937_64 rng(8);
    for (int n = 1; n <= 3; ++n) {
        auto bb = basis({2}, n);
        auto bab = basis({2, 2}, n);
        const long pb = dn::ipow(2, n);
        const auto dec_dense = dn::symmetrize_with_reference(dn::random_cptp_choi(pb, 2, rng), 2, 2, n, false);
        const auto dec = dn::ref_from_dense(dec_dense, 2, bb, RefOrder::RefLast);
        CHECK(max_abs(dn::dense_from_ref(dec) - dec_dense) < 1e-12);
        const auto chan = tensor_coefficients(adc_choi(0.3), n, bab);
        const auto mp = compose_before_decoder(chan, dec, marginal_data_for(chan));
        const auto ref = dn::link(blocked(chan), dec_dense, pb, pb, 2);
        CHECK(max_abs(dn::dense_from_ref(mp) - ref) < 1e-10);
    }
}

TEST_CASE("replacement decoder yields a replacement channel")
{
    // D(ρ) = Tr[ρ] π_R, so D∘N prepares π_R for every input.
    const int n = 2;
    auto bb = basis({2}, n);
    auto dec = RefCoefficients::zeros(2, bb, RefOrder::RefLast);
    for (int k = 0; k < 2; ++k) {
        dec.at(k, k) = identity_coeffs(bb);
        for (auto& [r, v] : dec.at(k, k).values) v = 0.5;
    }
    const auto chan = tensor_coefficients(depol_choi(0.2), n, basis({2, 2}, n));
    const auto mp = compose_before_decoder(chan, dec, marginal_data_for(chan));
    const auto dense = dn::dense_from_ref(mp);
    // Γ^{D∘N} = 1_{A^n} ⊗ π_R.
    const Eigen::MatrixXcd expect =
        dn::kron(Eigen::MatrixXcd::Identity(4, 4), 0.5 * Eigen::MatrixXcd::Identity(2, 2));
    CHECK(max_abs(dense - expect) < 1e-12);
}

TEST_CASE("adjoint reshuffle matches the dense adjoint Choi")
{
    std::mt19937_64 rng(12);
    const int n = 2;
    auto bb = basis({2}, n);
    const long pb = 4;
    const auto dec_dense = dn::symmetrize_with_reference(dn::random_cptp_choi(pb, 2, rng), 2, 2, n, false);
    const auto dec = dn::ref_from_dense(dec_dense, 2, bb, RefOrder::RefLast);
    const auto adj = adjoint(dec);
    CHECK(adj.order == RefOrder::RefFirst);
    // Γ^{D*}_{(k,b),(l,b')} = Γ^D_{(b',l),(b,k)}.
    Eigen::MatrixXcd ref(pb * 2, pb * 2);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            for (long b = 0; b < pb; ++b)
                for (long bp = 0; bp < pb; ++bp) ref(k * pb + b, l * pb + bp) = dec_dense(bp * 2 + l, b * 2 + k);
    CHECK(max_abs(dn::dense_from_ref(adj) - ref) < 1e-12);
    const auto back = adjoint(adj);
    CHECK(max_abs(dn::dense_from_ref(back) - dec_dense) < 1e-12);
}

TEST_CASE("associativity of decoder, channel and encoder")
{
    std::mt19937_64 rng(30);
    const int n = 2;
    auto b1 = basis({2}, n);
    const auto enc = dn::ref_from_dense(random_sym_encoder(2, 2, n, rng), 2, b1, RefOrder::RefFirst);
    const auto dec = dn::ref_from_dense(
        dn::symmetrize_with_reference(dn::random_cptp_choi(4, 2, rng), 2, 2, n, false), 2, b1, RefOrder::RefLast);
    const auto chan = tensor_coefficients(adc_choi(0.4), n, basis({2, 2}, n));
    const auto md = marginal_data_for(chan);
    // ⟨Γ^{N∘E}, Γ^{D*}⟩ and ⟨Γ^E, Γ^{(D∘N)*}⟩ are the same number.
    const auto m = compose_after_encoder(chan, enc, md);
    const auto dstar = adjoint(dec);
    const auto mp_star = adjoint(compose_before_decoder(chan, dec, md));
    cplx lhs{}, rhs{};
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            lhs += (dn::dense_from_coeffs(m.at(k, l)) * dn::dense_from_coeffs(dstar.at(l, k))).trace();
            rhs += (dn::dense_from_coeffs(enc.at(k, l)) * dn::dense_from_coeffs(mp_star.at(l, k))).trace();
        }
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("tripartite table with trivial third system reduces to marginal data")
{
    const int n = 2;
    const auto table = build_tripartite({2, 2, 1}, n);
    const auto md = marginal_data(SystemSpec({2, 2}, n));
    std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, BigInt> got;
    for (const auto& e : table.entries) got[{e.s, e.u, e.w}] = e.k;
    std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, BigInt> expect;
    for (const auto& m : md.entries) expect[{m.s, m.t, m.r}] = m.kappa_a;
    CHECK(got == expect);
}

TEST_CASE("covariant composition matches dense link products")
{
    std::mt19937_64 rng(41);
    for (int n = 1; n <= 2; ++n) {
        const auto table = build_tripartite({2, 2, 2}, n);
        auto bab = basis({2, 2}, n);
        const long p = dn::ipow(2, n);
        const auto gn = dn::symmetrize(dn::blocked_to_interleaved(dn::random_cptp_choi(p, p, rng), 2, 2, n), 4, n);
        const auto go = dn::symmetrize(dn::blocked_to_interleaved(dn::random_cptp_choi(p, p, rng), 2, 2, n), 4, n);
        const auto cn = dn::coeffs_from_dense(gn, bab), co = dn::coeffs_from_dense(go, bab);
        const auto cp = compose_covariant(cn, co, table);
        const auto ref = dn::link(blocked(cn), blocked(co), p, p, p);
        CHECK(max_abs(blocked(cp) - ref) < 1e-10);
    }
}

TEST_CASE("covariant composition with unequal dimensions")
{
    std::mt19937_64 rng(42);
    const int n = 2;
    for (auto dims : {std::vector<int>{2, 1, 2}, std::vector<int>{1, 2, 2}, std::vector<int>{2, 3, 1}}) {
        const auto table = build_tripartite(dims, n);
        const auto x = dn::random_coeffs(table.ab, rng), y = dn::random_coeffs(table.bc, rng);
        const auto cp = compose_covariant(x, y, table);
        const long pa = dn::ipow(dims[0], n), pb = dn::ipow(dims[1], n), pc = dn::ipow(dims[2], n);
        const auto ref = dn::link(blocked(x), blocked(y), pa, pb, pc);
        CHECK(max_abs(blocked(cp) - ref) < 1e-10 * (1 + max_abs(ref)));
    }
}

TEST_CASE("composed depolarizing channels with sparse supports")
{
    for (int n = 2; n <= 3; ++n) {
        const auto g1 = depol_choi(0.1), g2 = depol_choi(0.25);
        auto bab = basis({2, 2}, n);
        const auto c1 = tensor_coefficients(g1, n, bab), c2 = tensor_coefficients(g2, n, bab);
        const auto table = build_tripartite({2, 2, 2}, n, c1.support, c2.support);
        const auto cp = compose_covariant(c1, c2, table);
        const auto single = dn::link(g1, g2, 2, 2, 2);
        const auto expect = tensor_coefficients(single, n, bab);
        for (std::uint64_t w = 0; w < bab->size(); ++w) CHECK(std::abs(cp.get(w) - expect.get(w)) < 1e-12);
        // Identity after N is N.
        const auto id = tensor_coefficients(depol_choi(0.0), n, bab);
        const auto t2 = build_tripartite({2, 2, 2}, n, c1.support, id.support);
        const auto same = compose_covariant(c1, id, t2);
        for (std::uint64_t w = 0; w < bab->size(); ++w) CHECK(std::abs(same.get(w) - c1.get(w)) < 1e-12);
    }
}

TEST_CASE("channel action on states")
{
    std::mt19937_64 rng(77);
    const int n = 2;
    // Product state ρ^{⊗n} on (R A)^n through N^{⊗n} on A gives (id⊗N)(ρ)^{⊗n}.
    const auto rho = dn::random_psd(4, rng);
    const Eigen::MatrixXcd rho_n = rho / rho.trace();
    const auto g = adc_choi(0.3);
    auto bra = basis({2, 2}, n);
    const auto table = build_tripartite({2, 2, 2}, n);
    const auto state = tensor_coefficients(rho_n, n, bra);
    const auto chan = tensor_coefficients(g, n, bra);
    const auto out = apply_channel_to_state(state, chan, table);
    // Single copy: ω_{RB} = Tr_A[(ρ^{T_A} ⊗ 1) Γ] as a link with trivial input.
    const auto single = dn::link(rho_n, g, 2, 2, 2);
    const auto expect = tensor_coefficients(single, n, bra);
    for (std::uint64_t w = 0; w < bra->size(); ++w) CHECK(std::abs(out.get(w) - expect.get(w)) < 1e-12);
    CHECK(std::abs(trace_coeffs(out) - 1.0) < 1e-12);

    // Maximally mixed preparation on A^n with a one-dimensional reference keeps trace 1.
    auto ba = basis({2}, n);
    auto prep = RefCoefficients::zeros(1, ba);
    prep.at(0, 0) = identity_coeffs(ba);
    for (auto& [r, v] : prep.at(0, 0).values) v = 0.25;
    const auto o = apply_channel_to_state(prep, chan, marginal_data_for(chan));
    CHECK(std::abs(trace_coeffs(o.at(0, 0)) - 1.0) < 1e-12);

    // Φ_{RA} through the identity returns Φ_{RB}.
    auto phi = RefCoefficients::zeros(2, basis({2}, 1));
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            CountMatrix e = CountMatrix::zeros(2);
            e.at(k, l) = 1;
            phi.at(k, l).values[phi.basis->index(e)] = 0.5;
        }
    const auto idc = tensor_coefficients(adc_choi(0.0), 1, basis({2, 2}, 1));
    const auto phib = apply_channel_to_state(phi, idc, marginal_data_for(idc));
    CHECK(max_abs(dn::dense_from_ref(phib) - dn::dense_from_ref(phi)) < 1e-15);
}

TEST_CASE("tripartite budget")
{
    CHECK_THROWS_AS(build_tripartite({2, 2, 2}, 6, std::nullopt, std::nullopt, 1000), CapacityError);
}

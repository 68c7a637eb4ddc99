#include "doctest.h"

#include "permsym/algebra_ext.hpp"
#include "permsym/block_space.hpp"
#include "permsym/channels.hpp"
#include "permsym/error.hpp"
#include "permsym/oracle/dense.hpp"

#include <algorithm>

using namespace permsym;
namespace dn = permsym::oracle;

namespace {

/// Random coefficients on the block-diagonal orbits only.
OrbitCoefficients random_algebra_coeffs(const AlgebraSpec& spec, BasisPtr basis, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    OrbitCoefficients x(basis);
    for (const auto& e : algebra_orbits(spec)) x.add(basis->index(e), cplx(g(rng), g(rng)));
    return x;
}

}  // namespace

TEST_CASE("algebra orbit counts")
{
    CHECK(algebra_orbits(AlgebraSpec({2, 2}, 2)).size() == 36);
    CHECK(algebra_orbits(AlgebraSpec({2, 2}, 3)).size() == 120);
    CHECK(algebra_orbits(AlgebraSpec({2, 2}, 4)).size() == 330);
    for (int n = 1; n <= 8; ++n) {
        const AlgebraSpec spec({2, 2}, n);
        BigInt conv = 0;
        for (int k = 0; k <= n; ++k) conv += binomial(k + 3, k) * binomial(n - k + 3, n - k);
        CHECK(conv == binomial(n + 7, n));
        CHECK(algebra_orbit_count(spec) == conv);
        if (n <= 5) CHECK(BigInt(algebra_orbits(spec).size()) == conv);
    }
    const auto plain = enumerate_orbits(SystemSpec({3}, 3));
    CHECK(algebra_orbits(AlgebraSpec({3}, 3)) == plain.orbits());
}

TEST_CASE("split and glue")
{
    const AlgebraSpec spec({2, 2}, 3);
    for (const auto& e : algebra_orbits(spec)) {
        const auto sp = split_orbit(e, spec.blocks);
        CHECK(glue_orbit(sp.parts) == e);
        CHECK(sp.mu[0] + sp.mu[1] == 3);
    }
    CountMatrix one_block = CountMatrix::zeros(4);
    one_block.at(1, 0) = 3;
    CHECK(split_orbit(one_block, {2, 2}).mu == std::vector<int>{3, 0});
    CountMatrix off = CountMatrix::zeros(4);
    off.at(0, 2) = 3;
    CHECK_THROWS_AS(split_orbit(off, {2, 2}), ArgumentError);
    CHECK(split_orbit(one_block, {4}).parts[0] == one_block);
}

TEST_CASE("flag profile dimensions")
{
    for (const auto& blocks : {std::vector<int>{2, 2}, std::vector<int>{1, 2}, std::vector<int>{2, 1, 2}})
        for (int n = 1; n <= 5; ++n) {
            const AlgebraSpec spec(blocks, n);
            BigInt sum_sq = 0, dim = 0;
            for (const auto& p : flag_profiles(spec)) {
                sum_sq += p.m * p.m;
                dim += p.copies * p.f * p.m;
            }
            CHECK(sum_sq == algebra_orbit_count(spec));
            BigInt full = 1;
            for (int k = 0; k < n; ++k) full *= spec.d();
            CHECK(dim == full);
        }
    const auto profiles = flag_profiles(AlgebraSpec({2, 2}, 2));
    CHECK(profiles.front().mu == std::vector<int>{2, 0});
    CHECK(profiles.back().mu == std::vector<int>{0, 2});
}

TEST_CASE("algebra block diagonalization against the dense embedding")
{
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 3; ++n) {
        const AlgebraSpec spec({2, 2}, n);
        auto cob = std::make_shared<const ChangeOfBasis>(build_algebra_cob(spec));
        const auto x = random_algebra_coeffs(spec, cob->basis, rng);
        const auto y = random_algebra_coeffs(spec, cob->basis, rng);
        const Eigen::MatrixXcd xd = dn::dense_from_coeffs(x), yd = dn::dense_from_coeffs(y);
        const auto bx = algebra_block_diag(x, cob), by = algebra_block_diag(y, cob);

        CHECK(std::abs(block_trace(bx) - xd.trace()) < 1e-9);
        CHECK(std::abs(block_hs(bx, by) - (xd.adjoint() * yd).trace()) < 1e-9);
        const auto bxy = algebra_block_diag(dn::coeffs_from_dense(xd * yd, cob->basis), cob);
        for (std::size_t k = 0; k < bx.blocks.size(); ++k)
            CHECK((bxy.blocks[k] - bx.blocks[k] * by.blocks[k]).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((dn::dense_from_coeffs(psi_tilde_inv(bx)) - xd).cwiseAbs().maxCoeff() < 1e-9);

        // Spectrum with multiplicity copies·f reproduces the dense spectrum.
        const Eigen::MatrixXcd h = xd + xd.adjoint();
        const auto bh = algebra_block_diag(dn::coeffs_from_dense(h, cob->basis), cob);
        std::vector<double> from_blocks;
        for (std::size_t k = 0; k < bh.blocks.size(); ++k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bh.blocks[k]);
            const auto reps = static_cast<long>(bh.mult(k));
            for (long i = 0; i < es.eigenvalues().size(); ++i)
                for (long r = 0; r < reps; ++r) from_blocks.push_back(es.eigenvalues()(i));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> dense(h);
        std::vector<double> expect(dense.eigenvalues().data(), dense.eigenvalues().data() + dense.eigenvalues().size());
        REQUIRE(from_blocks.size() == expect.size());
        std::sort(from_blocks.begin(), from_blocks.end());
        std::sort(expect.begin(), expect.end());
        for (std::size_t i = 0; i < expect.size(); ++i) CHECK(from_blocks[i] == doctest::Approx(expect[i]).epsilon(1e-9));

        OrbitCoefficients outside(cob->basis);
        CountMatrix off = CountMatrix::zeros(4);
        off.at(0, 2) = n;
        outside.add(cob->basis->index(off), 1.0);
        CHECK_THROWS_AS(algebra_block_diag(outside, cob), ArgumentError);
    }
}

TEST_CASE("degenerate flag reproduces the single algebra")
{
    std::mt19937_64 rng(9);
    const int n = 3;
    const AlgebraSpec spec({2, 2}, n);
    auto acob = std::make_shared<const ChangeOfBasis>(build_algebra_cob(spec));
    auto pcob = std::make_shared<const ChangeOfBasis>(build_change_of_basis(2, n));
    const auto xp = dn::random_coeffs(pcob->basis, rng);
    OrbitCoefficients xa(acob->basis);
    for (const auto& [r, v] : xp.values) {
        const auto e = pcob->basis->orbit(r);
        xa.add(acob->basis->index(glue_orbit({e, CountMatrix::zeros(2)})), v);
    }
    const auto ba = algebra_block_diag(xa, acob);
    const auto bp = psi_tilde(xp, pcob);
    for (std::size_t k = 0; k < bp.blocks.size(); ++k) {
        CHECK(acob->blocks[k].copies == 1);
        CHECK((ba.blocks[k] - bp.blocks[k]).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("kappa decomposition equals the direct value")
{
    for (const auto& [blocks_a, blocks_b] :
         {std::pair{std::vector<int>{2}, std::vector<int>{2, 2}}, std::pair{std::vector<int>{1, 1}, std::vector<int>{2, 2}},
          std::pair{std::vector<int>{2}, std::vector<int>{1, 2}}}) {
        const int da = std::accumulate(blocks_a.begin(), blocks_a.end(), 0);
        const int db = std::accumulate(blocks_b.begin(), blocks_b.end(), 0);
        const auto ma = AlgebraSpec(blocks_a, 1).mask(), mb = AlgebraSpec(blocks_b, 1).mask();
        std::vector<bool> mask(static_cast<std::size_t>(da * db * da * db));
        for (int p = 0; p < da * db; ++p)
            for (int q = 0; q < da * db; ++q)
                mask[static_cast<std::size_t>(p * da * db + q)] =
                    ma[static_cast<std::size_t>((p / db) * da + q / db)] && mb[static_cast<std::size_t>((p % db) * db + q % db)];
        for (int n = 1; n <= 3; ++n)
            for (const auto& e : enumerate_supported(da * db, n, mask))
                CHECK(kappa_decomposed(e, blocks_a, blocks_b) == kappa(e, da, db, Side::A));
    }
}

TEST_CASE("algebra link product")
{
    const int n = 2;
    const auto ch = flagged({adc(0.3), replacement(2, 2)}, {0.6, 0.4});
    auto joint = std::make_shared<OrbitBasis>(SystemSpec({2, 4}, n));
    const auto c = tensor_coefficients(ch.gamma, n, joint);
    const auto md = marginal_data_for(c);
    auto enc = RefCoefficients::zeros(2, md.a, RefOrder::RefFirst);
    std::mt19937_64 rng(1);
    for (auto& e : enc.entries) e = dn::random_coeffs(md.a, rng);
    const auto direct = compose_after_encoder(c, enc, md);
    const auto via = algebra_link_after_encoder(c, enc, md, {2}, {2, 2}, true);
    for (std::size_t k = 0; k < direct.entries.size(); ++k)
        CHECK((dn::dense_from_coeffs(direct.entries[k]) - dn::dense_from_coeffs(via.entries[k])).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(algebra_link_after_encoder(c, enc, md, {2}, {4, 1}), ArgumentError);
}

#include "doctest.h"

#include "permsym/block_space.hpp"
#include "permsym/error.hpp"
#include "permsym/link_product.hpp"
#include "permsym/oracle/dense.hpp"

using namespace permsym;
namespace dn = permsym::oracle;

namespace {

CobPtr make_cob(int d, int n) { return std::make_shared<const ChangeOfBasis>(build_change_of_basis(d, n)); }

BlockRep random_blocks(CobPtr cob, int d_r, std::mt19937_64& rng)
{
    auto b = BlockRep::zeros(cob, d_r, Gauge::Ortho);
    for (auto& blk : b.blocks) {
        const Eigen::MatrixXcd g = dn::random_matrix(blk.rows(), blk.cols(), rng);
        blk = g * g.adjoint();
    }
    return b;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("block trace")
{
    auto cob = make_cob(2, 3);
    const auto id = psi_tilde(identity_coeffs(cob->basis), cob);
    CHECK(std::abs(block_trace(id) - cplx(8)) < 1e-12);

    Eigen::MatrixXcd rho(2, 2);
    rho << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
    const auto pure = psi_tilde(tensor_coefficients(rho, 3, cob->basis), cob);
    CHECK(std::abs(block_trace(pure) - cplx(1)) < 1e-12);

    std::mt19937_64 rng(1);
    const auto x = dn::random_coeffs(cob->basis, rng);
    CHECK(std::abs(block_trace(psi_tilde(x, cob)) - trace_coeffs(x)) < 1e-10);
    CHECK_THROWS_AS(block_trace(psi(x, cob)), ArgumentError);
}

TEST_CASE("block inner product")
{
    std::mt19937_64 rng(2);
    auto cob = make_cob(2, 4);
    const auto x = dn::random_coeffs(cob->basis, rng), y = dn::random_coeffs(cob->basis, rng);
    CHECK(std::abs(block_hs(psi_tilde(x, cob), psi_tilde(y, cob)) - hs_inner(x, y)) < 1e-9);
    const auto id = psi_tilde(identity_coeffs(cob->basis), cob);
    CHECK(std::abs(block_hs(id, id) - cplx(16)) < 1e-10);

    OrbitCoefficients a(cob->basis), b(cob->basis);
    a.add(3, 1.0);
    b.add(7, 1.0);
    CHECK(std::abs(block_hs(psi_tilde(a, cob), psi_tilde(b, cob))) < 1e-12);
    CHECK(std::abs(block_hs(psi_tilde(a, cob), psi_tilde(a, cob)) - cplx(to_double(orbit_size(cob->basis->orbit(3))))) <
          1e-10);

    auto other = make_cob(2, 4);
    CHECK_THROWS_AS(block_hs(psi_tilde(a, cob), psi_tilde(a, other)), ArgumentError);
}

TEST_CASE("pairing matches the dense trace of a product")
{
    std::mt19937_64 rng(3);
    auto cob = make_cob(2, 2);
    const long dim = 2 * 4;
    const Eigen::MatrixXcd a = dn::symmetrize_with_reference(dn::random_matrix(dim, dim, rng), 2, 2, 2, true);
    const Eigen::MatrixXcd b = dn::symmetrize_with_reference(dn::random_matrix(dim, dim, rng), 2, 2, 2, true);
    const auto ba = psi_tilde(dn::ref_from_dense(a, 2, cob->basis, RefOrder::RefFirst), cob);
    const auto bb = psi_tilde(dn::ref_from_dense(b, 2, cob->basis, RefOrder::RefFirst), cob);
    CHECK(std::abs(block_pairing(ba, bb) - (a * b).trace()) < 1e-9);
}

TEST_CASE("unitality enforcement")
{
    std::mt19937_64 rng(4);
    auto cob = make_cob(2, 3);
    auto b = random_blocks(cob, 2, rng);
    double before = 0;
    for (double r : cpu_residual(b)) before = std::max(before, r);
    CHECK(before > 1e-3);
    enforce_cpu(b);
    for (double r : cpu_residual(b)) CHECK(r < 1e-10);
    const auto once = b;
    enforce_cpu(b);
    for (std::size_t k = 0; k < b.blocks.size(); ++k) CHECK(max_abs(b.blocks[k] - once.blocks[k]) < 1e-10);

    // Rank-deficient input is completed on the kernel.
    auto z = BlockRep::zeros(cob, 2, Gauge::Ortho);
    enforce_cpu(z);
    for (double r : cpu_residual(z)) CHECK(r < 1e-12);
}

TEST_CASE("unitality residual agrees with the dense check at n = 1")
{
    std::mt19937_64 rng(5);
    auto cob = make_cob(2, 1);
    const Eigen::MatrixXcd g = dn::random_psd(4, rng);
    const auto b = psi_tilde(dn::ref_from_dense(g, 2, cob->basis, RefOrder::RefFirst), cob);
    const Eigen::MatrixXcd dense = dn::ptrace_first(g, 2, 2) - Eigen::MatrixXcd::Identity(2, 2);
    CHECK(cpu_residual(b)[0] == doctest::Approx(max_abs(dense)).epsilon(1e-12));
}

TEST_CASE("trace-preservation enforcement")
{
    std::mt19937_64 rng(6);
    auto cob = make_cob(2, 3);
    auto b = random_blocks(cob, 2, rng);
    CHECK(cptp_residual(b) > 1e-3);
    enforce_cptp(b);
    CHECK(cptp_residual(b) < 1e-10);
    const auto once = b;
    enforce_cptp(b);
    for (std::size_t k = 0; k < b.blocks.size(); ++k) CHECK(max_abs(b.blocks[k] - once.blocks[k]) < 1e-10);

    // The global trace agrees with the dense partial trace over S^n.
    const auto coeffs = psi_tilde_inv_ref(b);
    const Eigen::MatrixXcd dense = dn::dense_from_ref(coeffs);
    CHECK(max_abs(dn::ptrace_second(dense, 2, 8) - Eigen::MatrixXcd::Identity(2, 2)) < 1e-9);

    auto z = BlockRep::zeros(cob, 2, Gauge::Ortho);
    enforce_cptp(z);
    CHECK(cptp_residual(z) < 1e-12);
}

TEST_CASE("block partial transpose")
{
    std::mt19937_64 rng(7);
    const SystemSpec spec({2, 2}, 2);
    auto cob = std::make_shared<const ChangeOfBasis>(build_change_of_basis(spec));
    const PartialTransposeMap pt(cob, 2, 2, Side::B);

    const auto x = dn::random_coeffs(cob->basis, rng);
    const auto bx = psi_tilde(x, cob);
    const auto twice = pt.apply(pt.apply(bx));
    for (std::size_t k = 0; k < bx.blocks.size(); ++k) CHECK(max_abs(twice.blocks[k] - bx.blocks[k]) < 1e-10);

    const auto direct = psi_tilde(partial_transpose_coeffs(x, Side::B), cob);
    const auto via_map = pt.apply(bx);
    for (std::size_t k = 0; k < bx.blocks.size(); ++k) CHECK(max_abs(direct.blocks[k] - via_map.blocks[k]) < 1e-10);

    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(4, 4);
    phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 1.0;
    const auto bphi = psi_tilde(tensor_coefficients(phi, 2, cob->basis), cob);
    double min_ev = 0;
    for (const auto& blk : pt.apply(bphi).blocks) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
        min_ev = std::min(min_ev, es.eigenvalues().minCoeff());
    }
    // The dense partial transpose of Φ⊗Φ is the swap squared, with eigenvalue −1.
    CHECK(min_ev == doctest::Approx(-1.0));
    CHECK_THROWS_AS(PartialTransposeMap(make_cob(3, 2), 2, 2), ArgumentError);
}

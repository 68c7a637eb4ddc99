#include "doctest.h"

#include "permsym/error.hpp"
#include "permsym/oracle/dense.hpp"
#include "permsym/seesaw.hpp"

#include <cmath>

using namespace permsym;
namespace dn = permsym::oracle;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

double min_eig(const Eigen::MatrixXcd& m)
{
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(0.5 * (m + m.adjoint())).eigenvalues().minCoeff();
}

bool monotone(const std::vector<double>& v, double slack = 1e-9)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1] - slack) return false;
    return true;
}

std::vector<double> values(const SeesawRun& r)
{
    std::vector<double> out;
    for (const auto& p : r.trajectory) out.push_back(p.value);
    return out;
}

ChoiMatrix random_channel(int d_in, int d_out, std::mt19937_64& rng)
{
    return {d_in, d_out, dn::random_cptp_choi(d_in, d_out, rng), std::nullopt};
}

/// Fidelity of D ∘ N^{⊗n} ∘ E computed from dense Choi matrices.
double dense_seesaw_fidelity(const SeesawTables& t, const SeesawRun& run)
{
    const int d_r = run.encoder.d_r;
    const long pa = dn::ipow(t.channel.d_in, t.n);
    const long pb = dn::ipow(t.channel.d_out, t.n);
    const auto ge = dn::dense_from_ref(psi_tilde_inv_ref(run.encoder));
    const auto gd = dn::dense_from_ref(adjoint(psi_tilde_inv_ref(run.decoder_adj)));
    const auto gn = dn::kron_power(t.channel.gamma, t.n);
    const auto gn_blocked = dn::interleaved_to_blocked(gn, t.channel.d_in, t.channel.d_out, t.n);
    const auto m = dn::link(ge, gn_blocked, d_r, pa, pb);
    const auto total = dn::link(m, gd, d_r, pb, d_r);
    cplx f = 0.0;
    for (int i = 0; i < d_r; ++i)
        for (int j = 0; j < d_r; ++j) f += total(i * d_r + i, j * d_r + j);
    return f.real() / (d_r * d_r);
}

}  // namespace

TEST_CASE("random seeds satisfy their constraints")
{
    auto cob = std::make_shared<const ChangeOfBasis>(build_change_of_basis(2, 3));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto e = random_symmetric_seed(cob, 2, SeedKind::Encoder, rng);
        CHECK(cptp_residual(e) < 1e-9);
        const auto d = random_symmetric_seed(cob, 2, SeedKind::Decoder, rng);
        for (double r : cpu_residual(d)) CHECK(r < 1e-9);
    }
    auto a = split_rng(42, 3);
    auto b = split_rng(42, 3);
    const auto x = random_symmetric_seed(cob, 2, SeedKind::Encoder, a);
    const auto y = random_symmetric_seed(cob, 2, SeedKind::Encoder, b);
    for (std::size_t k = 0; k < x.blocks.size(); ++k) CHECK((x.blocks[k] - y.blocks[k]).norm() == 0.0);
}

TEST_CASE("seeds densify to valid Choi matrices")
{
    const int n = 2;
    auto cob = std::make_shared<const ChangeOfBasis>(build_change_of_basis(2, n));
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10; ++i) {
        const auto e = dn::dense_from_ref(psi_tilde_inv_ref(random_symmetric_seed(cob, 2, SeedKind::Encoder, rng)));
        CHECK(min_eig(e) > -1e-10);
        CHECK(max_abs(dn::ptrace_second(e, 2, 4) - Eigen::MatrixXcd::Identity(2, 2)) < 1e-10);
        const auto d = dn::dense_from_ref(psi_tilde_inv_ref(random_symmetric_seed(cob, 2, SeedKind::Decoder, rng)));
        CHECK(min_eig(d) > -1e-10);
        CHECK(max_abs(dn::ptrace_first(d, 2, 4) - Eigen::MatrixXcd::Identity(4, 4)) < 1e-10);
    }
    const auto iso = isometric_seed(cob, 2, rng);
    REQUIRE(iso.has_value());
    const auto g = dn::dense_from_ref(psi_tilde_inv_ref(*iso));
    CHECK(min_eig(g) > -1e-10);
    CHECK(max_abs(dn::ptrace_second(g, 2, 4) - Eigen::MatrixXcd::Identity(2, 2)) < 1e-10);
    // A pure Choi matrix: rank one.
    CHECK(std::abs(g.trace().real() - 2.0) < 1e-10);
    CHECK(std::abs((g * g).trace().real() - 4.0) < 1e-10);
}

TEST_CASE("single-copy recovery fidelity")
{
    CHECK(max_fidelity_recovery(identity_channel(2)) == doctest::Approx(1.0).epsilon(1e-6));
    for (std::uint64_t s = 0; s < 4; ++s)
        CHECK(std::abs(max_fidelity_recovery(replacement(2, 2), s, 1) - 0.25) < 1e-8);
    std::mt19937_64 rng(3);
    const auto ch = adc(0.3);
    const double dense = dn::dense_fd(ch.gamma, 2, 2, rng, 16);
    CHECK(std::abs(max_fidelity_recovery(ch) - dense) < 1e-6);
}

TEST_CASE("preparation and recovery fidelities are related by the dimension ratio")
{
    const auto ch = adc(0.3);
    CHECK(std::abs(max_fidelity_preparation(ch) - max_fidelity_recovery(ch)) < 1e-6);
    CHECK(max_fidelity_preparation(identity_channel(3)) == doctest::Approx(1.0).epsilon(1e-6));
    std::mt19937_64 rng(4);
    for (int i = 0; i < 3; ++i) {
        const auto w = random_channel(2, 3, rng);
        const double fd = max_fidelity_recovery(w, 0, 8);
        const double fe = max_fidelity_preparation(w, 0, 8);
        CHECK(std::abs(fe - (4.0 / 9.0) * fd) < 1e-6);
    }
}

TEST_CASE("power iterations are monotone and keep their constraints")
{
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 3; ++n) {
        const auto t = build_tables(random_channel(2, 2, rng), n, false);
        auto r = split_rng(7, n);
        const auto enc = random_symmetric_seed(t.cob_a, 2, SeedKind::Encoder, r);
        const auto m = channel_after_encoder(t, enc);
        const auto pd = power_fd(m, random_symmetric_seed(t.cob_b, 2, SeedKind::Decoder, r), 1e-10, 5000);
        CHECK(monotone(pd.trace));
        for (double x : cpu_residual(pd.x)) CHECK(x < 1e-9);
        const auto pe = power_fe(channel_before_decoder_adj(t, pd.x), enc, 1e-10, 5000);
        CHECK(monotone(pe.trace));
        CHECK(cptp_residual(pe.x) < 1e-9);
        CHECK(pe.trace.front() == doctest::Approx(pd.fidelity).epsilon(1e-9));
    }
}

TEST_CASE("power iteration reports truncation")
{
    const auto t = build_tables(adc(0.3), 2, false);
    auto r = split_rng(1, 1);
    const auto enc = random_symmetric_seed(t.cob_a, 2, SeedKind::Encoder, r);
    const auto pd = power_fd(channel_after_encoder(t, enc), random_symmetric_seed(t.cob_b, 2, SeedKind::Decoder, r),
                             1e-15, 2);
    CHECK(pd.truncated);
    CHECK(pd.iterations == 2);
    CHECK(pd.fidelity == doctest::Approx(*std::max_element(pd.trace.begin(), pd.trace.end())));
}

TEST_CASE("seesaw anchors")
{
    SeesawConfig cfg;
    cfg.seeds = 2;
    for (int n = 1; n <= 3; ++n) {
        cfg.n = n;
        const auto r = seesaw_run(identity_channel(2), cfg);
        CHECK(r.best_fidelity == doctest::Approx(1.0).epsilon(1e-6));
    }
    cfg.n = 2;
    CHECK(std::abs(seesaw_run(replacement(2, 2), cfg).best_fidelity - 0.25) < 1e-8);
    cfg.n = 1;
    for (double g : {0.1, 0.3}) CHECK(seesaw_run(adc(g), cfg).best_fidelity >= adc_uncoded(g) - 1e-6);
    // Fidelity need not grow with n; the baseline bounds the best over n.
    double best = 0.0;
    for (int n = 1; n <= 3; ++n) {
        cfg.n = n;
        best = std::max(best, seesaw_run(depolarizing(0.05), cfg).best_fidelity);
    }
    CHECK(best >= depolarizing_uncoded(0.05) - 1e-6);
}

TEST_CASE("seesaw trajectories are monotone and bounded")
{
    std::mt19937_64 rng(6);
    SeesawConfig cfg;
    cfg.seeds = 2;
    for (int trial = 0; trial < 6; ++trial) {
        cfg.n = 1 + trial % 3;
        cfg.rng_seed = static_cast<std::uint64_t>(trial);
        const auto r = seesaw_run(random_channel(2, 2, rng), cfg);
        for (const auto& run : r.runs) {
            CHECK(monotone(values(run)));
            for (double v : {run.fd, run.fe, run.fidelity}) {
                CHECK(v >= 0.25 - 1e-9);
                CHECK(v <= 1.0 + 1e-9);
            }
        }
        CHECK(r.cpu_residual < 1e-9);
        CHECK(r.cptp_residual < 1e-9);
    }
}

TEST_CASE("seesaw fidelity agrees with the dense composition")
{
    SeesawConfig cfg;
    cfg.seeds = 1;
    for (int n = 2; n <= 3; ++n) {
        cfg.n = n;
        const auto t = build_tables(adc(0.2), n, false);
        const auto r = seesaw_run(t, cfg);
        CHECK(std::abs(dense_seesaw_fidelity(t, r.best()) - r.best_fidelity) < 1e-9);
    }
}

TEST_CASE("seesaw on a rectangular channel")
{
    std::mt19937_64 rng(9);
    SeesawConfig cfg;
    cfg.n = 2;
    cfg.seeds = 2;
    const auto t = build_tables(random_channel(2, 3, rng), 2, false);
    const auto r = seesaw_run(t, cfg);
    CHECK(std::abs(dense_seesaw_fidelity(t, r.best()) - r.best_fidelity) < 1e-9);
    CHECK(r.best_fidelity >= 0.25 - 1e-9);
}

TEST_CASE("seesaw is deterministic under a fixed seed")
{
    SeesawConfig cfg;
    cfg.n = 2;
    cfg.seeds = 2;
    cfg.rng_seed = 99;
    const auto a = result_to_json(seesaw_run(adc(0.2), cfg), false).dump();
    const auto b = result_to_json(seesaw_run(adc(0.2), cfg), false).dump();
    CHECK(a == b);
}

TEST_CASE("flagged seesaw")
{
    SeesawConfig cfg;
    cfg.n = 1;
    cfg.seeds = 2;
    const auto ch = flagged({identity_channel(2), replacement(2, 2)}, {0.5, 0.5});
    CHECK(std::abs(seesaw_flagged(ch, cfg).best_fidelity - 0.625) < 1e-7);
    CHECK(std::abs(seesaw_run(ch, cfg).best_fidelity - 0.625) < 1e-7);

    // A single flag is the plain problem.
    for (int n = 1; n <= 3; ++n) {
        cfg.n = n;
        const auto plain = adc(0.25);
        auto one = flagged({plain}, {1.0});
        const auto a = seesaw_run(plain, cfg);
        const auto b = seesaw_flagged(one, cfg);
        CHECK(a.best_fidelity == b.best_fidelity);
        CHECK(result_to_json(a, false)["per_iteration"] == result_to_json(b, false)["per_iteration"]);
    }

    // Flagged runs use the smaller algebra tables.
    CHECK(build_tables(ch, 2, true).cob_b->blocks.size() == flag_profiles(AlgebraSpec({2, 2}, 2)).size());
    cfg.n = 2;
    const auto two = flagged({adc(0.3), depolarizing(0.2)}, {0.7, 0.3});
    const auto rf = seesaw_flagged(two, cfg);
    const auto rp = seesaw_run(two, cfg);
    CHECK(rf.best_fidelity >= 0.25);
    // The flagged decoder family is a subset of the plain one.
    CHECK(rf.best_fidelity <= rp.best_fidelity + 1e-4);
}

TEST_CASE("recovery fidelity is multiplicative")
{
    std::mt19937_64 rng(10);
    for (int i = 0; i < 3; ++i) {
        const auto n1 = random_channel(2, 2, rng);
        const auto n2 = random_channel(2, 2, rng);
        const auto joint = tensor_product(n1, n2);
        const double f1 = max_fidelity_recovery(n1, 0, 8);
        const double f2 = max_fidelity_recovery(n2, 0, 8);
        const double f12 = max_fidelity_recovery(joint, 0, 8);
        CHECK(std::abs(f12 - f1 * f2) < 1e-5);
        std::mt19937_64 r2(11);
        CHECK(std::abs(dn::dense_fd(joint.gamma, 4, 4, r2, 8) - f1 * f2) < 1e-5);
    }
}

TEST_CASE("sweep reporting")
{
    SeesawConfig cfg;
    cfg.seeds = 1;
    const auto rows = sweep(Family::Adc, {0.0, 0.2}, {1, 2}, cfg);
    REQUIRE(rows.size() == 4);
    int best = 0;
    for (const auto& r : rows) best += r.best ? 1 : 0;
    CHECK(best == 2);
    // γ = 0 is noiseless: every n reaches 1 and the tie goes to n = 1.
    CHECK(rows[0].fidelity == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rows[0].best);
}

TEST_CASE("invalid configurations")
{
    SeesawConfig cfg;
    cfg.d = 3;
    cfg.n = 1;
    CHECK_THROWS_AS(seesaw_run(adc(0.1), cfg), ArgumentError);
    cfg.d = 2;
    cfg.delta = 0.0;
    CHECK_THROWS_AS(seesaw_run(adc(0.1), cfg), ArgumentError);
    cfg.delta = 1e-7;
    CHECK_THROWS_AS(seesaw_flagged(adc(0.1), cfg), ArgumentError);
}

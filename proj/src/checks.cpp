#include "permsym/checks.hpp"

#include "permsym/algebra_ext.hpp"
#include "permsym/link_product.hpp"
#include "permsym/oracle/dense.hpp"
#include "permsym/seesaw.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>

namespace permsym::checks {

namespace dn = permsym::oracle;

namespace {

using Clock = std::chrono::steady_clock;

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

BasisPtr basis(std::vector<int> dims, int n) { return std::make_shared<OrbitBasis>(enumerate_orbits(SystemSpec(std::move(dims), n))); }

Eigen::MatrixXcd blocked(const OrbitCoefficients& x)
{
    const auto& sp = x.basis->spec();
    return dn::interleaved_to_blocked(dn::dense_from_coeffs(x), sp.local_dims[0], sp.local_dims[1], sp.copies);
}

/// Runs `body`, which fills `fails` with messages and `worst` with the largest deviation.
CheckResult run(const std::string& name, const std::function<void(std::vector<std::string>&, double&)>& body)
{
    const auto start = Clock::now();
    CheckResult r;
    r.name = name;
    std::vector<std::string> fails;
    double worst = 0.0;
    try {
        body(fails, worst);
    } catch (const std::exception& e) {
        fails.push_back(std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.pass = fails.empty();
    r.detail = r.pass ? fmt::format("worst deviation {:.3g}", worst) : fails.front();
    if (fails.size() > 1) r.detail += fmt::format(" (+{} more)", fails.size() - 1);
    return r;
}

void expect(std::vector<std::string>& fails, double& worst, double dev, double tol, const std::string& what)
{
    worst = std::max(worst, dev);
    if (!(dev <= tol)) fails.push_back(fmt::format("{}: deviation {:.3g} > {:.3g}", what, dev, tol));
}

void expect_true(std::vector<std::string>& fails, bool ok, const std::string& what)
{
    if (!ok) fails.push_back(what);
}

ChoiMatrix random_channel(int d_in, int d_out, std::mt19937_64& rng)
{
    return {d_in, d_out, dn::random_cptp_choi(d_in, d_out, rng), std::nullopt};
}

}  // namespace

CheckResult dense_equivalence(int max_n)
{
    return run("dense-oracle equivalence", [&](auto& fails, double& worst) {
        std::mt19937_64 rng(101);
        for (int n = 1; n <= max_n; ++n) {
            const auto b = basis({2, 2}, n);
            const auto md = marginal_data(b->spec());
            const long p = dn::ipow(2, n);
            const std::string tag = fmt::format("n={}", n);

            // Integer outputs: |O|, Tr C_E and κ are exact.
            for (std::uint64_t s = 0; s < b->size(); ++s) {
                const auto& e = b->orbits()[s];
                const auto c = dn::orbit_matrix(e, n);
                expect_true(fails, orbit_size(e) == BigInt(static_cast<long long>(c.sum())), tag + " orbit size");
                expect_true(fails, trace_orbit(e) == BigInt(static_cast<long long>(c.trace())), tag + " orbit trace");
                OrbitCoefficients one(b);
                one.add(s, 1.0);
                const auto tr = partial_trace_coeffs(one, md, Side::B);
                const auto ref = dn::ptrace_second(blocked(one), p, p);
                expect_true(fails, max_abs(dn::dense_from_coeffs(tr) - ref) == 0.0, tag + " kappa");
            }

            const auto x = dn::random_coeffs(b, rng);
            const auto y = dn::random_coeffs(b, rng);
            const Eigen::MatrixXcd xd = blocked(x), yd = blocked(y);
            const double scale = 1.0 + max_abs(xd) * max_abs(yd) * static_cast<double>(xd.rows());
            expect(fails, worst, std::abs(trace_coeffs(x) - xd.trace()) / scale, 1e-12, tag + " trace");
            expect(fails, worst, std::abs(hs_inner(x, y) - (xd.adjoint() * yd).trace()) / scale, 1e-12, tag + " HS");
            expect(fails, worst, max_abs(blocked(transpose_coeffs(x)) - xd.transpose()) / scale, 1e-12, tag + " transpose");
            expect(fails, worst, max_abs(blocked(partial_transpose_coeffs(x, Side::B)) - dn::ptranspose_second(xd, p, p)) / scale,
                   1e-12, tag + " partial transpose B");
            expect(fails, worst, max_abs(blocked(partial_transpose_coeffs(x, Side::A)) - dn::ptranspose_first(xd, p, p)) / scale,
                   1e-12, tag + " partial transpose A");
            expect(fails, worst,
                   max_abs(dn::dense_from_coeffs(partial_trace_coeffs(x, md, Side::B)) - dn::ptrace_second(xd, p, p)) / scale,
                   1e-12, tag + " partial trace B");
            expect(fails, worst,
                   max_abs(dn::dense_from_coeffs(partial_trace_coeffs(x, md, Side::A)) - dn::ptrace_first(xd, p, p)) / scale,
                   1e-12, tag + " partial trace A");

            // Link products with a CPTP channel power.
            const auto bs = std::make_shared<OrbitBasis>(enumerate_orbits(SystemSpec({2}, n)));
            const auto gamma = dn::random_cptp_choi(2, 2, rng);
            const auto chan = tensor_coefficients(gamma, n, b);
            const auto cmd = marginal_data_for(chan);
            const auto enc_d = dn::symmetrize_with_reference(dn::random_cptp_choi(2, p, rng), 2, 2, n, true);
            const auto enc = dn::ref_from_dense(enc_d, 2, bs, RefOrder::RefFirst);
            expect(fails, worst,
                   max_abs(dn::dense_from_ref(compose_after_encoder(chan, enc, cmd)) - dn::link(enc_d, blocked(chan), 2, p, p)),
                   1e-12, tag + " link after encoder");
            const auto dec_d = dn::symmetrize_with_reference(dn::random_cptp_choi(p, 2, rng), 2, 2, n, false);
            const auto dec = dn::ref_from_dense(dec_d, 2, bs, RefOrder::RefLast);
            expect(fails, worst,
                   max_abs(dn::dense_from_ref(compose_before_decoder(chan, dec, cmd)) - dn::link(blocked(chan), dec_d, p, p, 2)),
                   1e-12, tag + " link before decoder");

            // Covariant composition of two symmetrized channels.
            const auto table = build_tripartite({2, 2, 2}, n);
            const auto gn = dn::symmetrize(dn::blocked_to_interleaved(dn::random_cptp_choi(p, p, rng), 2, 2, n), 4, n);
            const auto go = dn::symmetrize(dn::blocked_to_interleaved(dn::random_cptp_choi(p, p, rng), 2, 2, n), 4, n);
            const auto cn = dn::coeffs_from_dense(gn, b), co = dn::coeffs_from_dense(go, b);
            expect(fails, worst, max_abs(blocked(compose_covariant(cn, co, table)) - dn::link(blocked(cn), blocked(co), p, p, p)),
                   1e-12, tag + " covariant link");
        }
    });
}

CheckResult dimension_anchors()
{
    return run("dimension anchors", [&](auto& fails, double&) {
        const std::uint64_t plain[] = {136, 816, 3876};
        const std::uint64_t flag[] = {36, 120, 330};
        for (int n = 2; n <= 4; ++n) {
            const auto b = enumerate_orbits(SystemSpec({2, 2}, n));
            expect_true(fails, b.size() == plain[n - 2] && b.orbits().size() == plain[n - 2],
                        fmt::format("plain n={}: {} orbits", n, b.size()));
            const auto a = algebra_orbits(AlgebraSpec({2, 2}, n));
            expect_true(fails, a.size() == flag[n - 2] && algebra_orbit_count(AlgebraSpec({2, 2}, n)) == flag[n - 2],
                        fmt::format("flagged n={}: {} orbits", n, a.size()));
        }
    });
}

CheckResult method_agreement(int n2, int n3)
{
    return run("encoding polynomial methods agree", [&](auto& fails, double&) {
        std::size_t pairs = 0;
        for (auto [d, nmax] : {std::pair{2, n2}, std::pair{3, n3}})
            for (int n = 1; n <= nmax; ++n)
                for (const auto& l : partitions(d, n)) {
                    const auto tabs = ssyt_enumerate(l, d);
                    for (const auto& t : tabs)
                        for (const auto& g : tabs) {
                            ++pairs;
                            if (!(encoding_poly_m1(t, g, d) == encoding_poly_m2(t, g, d)))
                                fails.push_back(fmt::format("d={} n={} pair differs", d, n));
                        }
                }
        expect_true(fails, pairs > 0, "no pairs checked");
    });
}

CheckResult star_isomorphism(int max_n)
{
    return run("*-isomorphism", [&](auto& fails, double& worst) {
        std::mt19937_64 rng(202);
        for (int n = 1; n <= max_n; ++n) {
            auto cob = std::make_shared<const ChangeOfBasis>(build_change_of_basis(2, n));
            const auto& b = cob->basis;
            const long dim = dn::ipow(2, n);
            const std::string tag = fmt::format("n={}", n);
            const Eigen::MatrixXcd xd = dn::symmetrize(dn::random_matrix(dim, dim, rng), 2, n);
            const Eigen::MatrixXcd yd = dn::symmetrize(dn::random_matrix(dim, dim, rng), 2, n);
            const auto x = dn::coeffs_from_dense(xd, b), y = dn::coeffs_from_dense(yd, b);
            const auto px = psi_tilde(x, cob), py = psi_tilde(y, cob);
            const auto pxy = psi_tilde(dn::coeffs_from_dense(xd * yd, b), cob);
            for (std::size_t k = 0; k < px.blocks.size(); ++k)
                expect(fails, worst, max_abs(pxy.blocks[k] - px.blocks[k] * py.blocks[k]), 1e-9, tag + " multiplicativity");
            for (const auto& blk : psi_tilde(identity_coeffs(b), cob).blocks)
                expect(fails, worst, max_abs(blk - Eigen::MatrixXcd::Identity(blk.rows(), blk.cols())), 1e-9, tag + " unit");
            cplx tr{}, hs{};
            for (std::size_t k = 0; k < px.blocks.size(); ++k) {
                tr += px.mult(k) * px.blocks[k].trace();
                hs += px.mult(k) * (px.blocks[k].adjoint() * py.blocks[k]).trace();
            }
            expect(fails, worst, std::abs(tr - xd.trace()), 1e-9, tag + " trace identity");
            expect(fails, worst, std::abs(hs - (xd.adjoint() * yd).trace()), 1e-9, tag + " HS identity");
            const auto pd = dn::coeffs_from_dense(dn::symmetrize(dn::random_psd(dim, rng), 2, n), b);
            for (const auto& rep : {psi(pd, cob), psi_tilde(pd, cob)})
                for (const auto& blk : rep.blocks) {
                    const double lo =
                        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(0.5 * (blk + blk.adjoint())).eigenvalues().minCoeff();
                    expect(fails, worst, std::max(0.0, -lo), 1e-9, tag + " PSD preservation");
                }
        }
    });
}

CheckResult schur_weyl_dimensions(int max_n)
{
    return run("Schur-Weyl dimension identities", [&](auto& fails, double&) {
        for (int d : {2, 3})
            for (int n = 1; n <= max_n; ++n) {
                BigInt sum_m2 = 0, sum_mf = 0;
                for (const auto& l : partitions(d, n)) {
                    const BigInt m = ssyt_count(l, d);
                    sum_m2 += m * m;
                    sum_mf += m * syt_count(l);
                }
                expect_true(fails, sum_m2 == binomial(n + d * d - 1, n), fmt::format("d={} n={}: sum m^2", d, n));
                BigInt pw = 1;
                for (int i = 0; i < n; ++i) pw *= d;
                expect_true(fails, sum_mf == pw, fmt::format("d={} n={}: sum m f", d, n));
            }
    });
}

CheckResult monotonicity(int runs, int max_n)
{
    return run("power-iteration and seesaw monotonicity", [&](auto& fails, double& worst) {
        std::mt19937_64 rng(303);
        CobCache cache;
        for (int i = 0; i < runs; ++i) {
            SeesawConfig cfg;
            cfg.n = 1 + i % max_n;
            cfg.seeds = 1;
            cfg.rng_seed = static_cast<std::uint64_t>(i);
            cfg.warm_start = i % 2 == 0;
            const auto res = seesaw_run(random_channel(2, 2, rng), cfg, &cache);
            for (const auto& r : res.runs)
                for (std::size_t k = 1; k < r.trajectory.size(); ++k) {
                    const double drop = r.trajectory[k - 1].value - r.trajectory[k].value;
                    expect(fails, worst, std::max(0.0, drop), 1e-9, fmt::format("run {} (n={}) step {}", i, cfg.n, k));
                }
        }
    });
}

CheckResult fidelity_anchors()
{
    return run("fidelity anchors", [&](auto& fails, double& worst) {
        SeesawConfig cfg;
        cfg.seeds = 2;
        CobCache cache;
        for (int n = 1; n <= 3; ++n) {
            cfg.n = n;
            expect(fails, worst, std::abs(seesaw_run(identity_channel(2), cfg, &cache).best_fidelity - 1.0), 1e-6,
                   fmt::format("identity n={}", n));
            expect(fails, worst, std::abs(seesaw_run(replacement(2, 2), cfg, &cache).best_fidelity - 0.25), 1e-8,
                   fmt::format("replacement n={}", n));
        }
        cfg.n = 1;
        for (double g : {0.1, 0.3}) {
            const double f = seesaw_run(adc(g), cfg, &cache).best_fidelity;
            expect(fails, worst, std::max(0.0, adc_uncoded(g) - f), 1e-6, fmt::format("ADC({}) n=1 vs uncoded", g));
        }
        std::mt19937_64 rng(404);
        const auto w = random_channel(2, 3, rng);
        const double fd = max_fidelity_recovery(w, 0, 8);
        const double fe = max_fidelity_preparation(w, 0, 8);
        expect(fails, worst, std::abs(fe - (4.0 / 9.0) * fd), 1e-6, "F_E = (d_A^2/d_B^2) F_D");
    });
}

CheckResult multiplicativity(int pairs)
{
    return run("multiplicativity of F_D", [&](auto& fails, double& worst) {
        std::mt19937_64 rng(505);
        for (int i = 0; i < pairs; ++i) {
            const auto n1 = random_channel(2, 2, rng);
            const auto n2 = random_channel(2, 2, rng);
            std::mt19937_64 r(static_cast<std::uint64_t>(i));
            const double f1 = dn::dense_fd(n1.gamma, 2, 2, r, 8);
            const double f2 = dn::dense_fd(n2.gamma, 2, 2, r, 8);
            const double f12 = dn::dense_fd(tensor_product(n1, n2).gamma, 4, 4, r, 8);
            expect(fails, worst, std::abs(f12 - f1 * f2) / (f1 * f2), 1e-4, fmt::format("pair {} dense", i));
            const double b12 = max_fidelity_recovery(tensor_product(n1, n2), 0, 8);
            expect(fails, worst, std::abs(b12 - f1 * f2) / (f1 * f2), 1e-4, fmt::format("pair {} block", i));
        }
    });
}

CheckResult flagged_additivity(int trials)
{
    return run("flagged additivity", [&](auto& fails, double& worst) {
        std::mt19937_64 rng(606);
        std::uniform_real_distribution<double> u(0.1, 0.9);
        const auto check = [&](const std::vector<ChoiMatrix>& parts, const std::vector<double>& probs, const std::string& tag) {
            const auto ch = flagged(parts, probs);
            double expected = 0.0;
            for (std::size_t i = 0; i < parts.size(); ++i) expected += probs[i] * max_fidelity_recovery(parts[i], 0, 8);
            expect(fails, worst, std::abs(max_fidelity_recovery(ch, 0, 8, 1e-12, 100000, true) - expected), 1e-6,
                   tag + " algebra decoder");
            expect(fails, worst, std::abs(max_fidelity_recovery(ch, 0, 8) - expected), 1e-6, tag + " plain decoder");
        };
        check({identity_channel(2), replacement(2, 2)}, {0.5, 0.5}, "id/replacement");
        for (int i = 0; i < trials; ++i) {
            const double q = u(rng);
            check({random_channel(2, 2, rng), random_channel(2, 2, rng)}, {q, 1.0 - q}, fmt::format("trial {}", i));
        }
    });
}

CheckResult scale_demo(double gamma, int max_n, int seeds, double limit_seconds)
{
    const auto start = Clock::now();
    std::vector<double> f;
    CheckResult r;
    r.name = "scale demonstration";
    try {
        CobCache cache;
        SeesawConfig cfg;
        cfg.seeds = seeds;
        for (int n = 1; n <= max_n; ++n) {
            cfg.n = n;
            f.push_back(seesaw_run(adc(gamma), cfg, &cache).best_fidelity);
        }
    } catch (const std::exception& e) {
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (!r.detail.empty()) return r;
    const auto best = std::max_element(f.begin(), f.end());
    std::string per_n;
    for (std::size_t i = 0; i < f.size(); ++i) per_n += fmt::format("{}{}:{:.6f}", i ? " " : "", i + 1, f[i]);
    r.pass = static_cast<int>(f.size()) == max_n && *best > f.front() && r.seconds < limit_seconds;
    r.detail = fmt::format("best n={} F={:.6f} vs n=1 F={:.6f}; {}", best - f.begin() + 1, *best, f.front(), per_n);
    return r;
}

}  // namespace permsym::checks

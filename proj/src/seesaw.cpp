#include "permsym/seesaw.hpp"

#include "permsym/error.hpp"
#include "permsym/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace permsym {

namespace {

void hermitize(Eigen::MatrixXcd& x) { x = 0.5 * (x + x.adjoint()).eval(); }

void require_same_layout(const BlockRep& a, const BlockRep& b)
{
    detail::require(a.cob == b.cob && a.d_r == b.d_r, "block representations use different layouts");
    detail::require(a.gauge == Gauge::Ortho && b.gauge == Gauge::Ortho, "power iteration needs the ORTHO gauge");
}

/// Square root of the PSD part; rounding-level negative eigenvalues are dropped.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& x)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (x + x.adjoint()));
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

/// m x m, formed as L L† with L = m √x so that the result stays PSD. The
/// direct product lets rounding-level negative directions of x grow from
/// step to step.
BlockRep sandwich(const BlockRep& m, const BlockRep& x)
{
    BlockRep out = x;
    for (std::size_t k = 0; k < x.blocks.size(); ++k) {
        const Eigen::MatrixXcd l = m.blocks[k] * psd_sqrt(x.blocks[k]);
        out.blocks[k] = l * l.adjoint();
        hermitize(out.blocks[k]);
    }
    return out;
}

template <class Normalize>
PowerResult power_iterate(const BlockRep& m, BlockRep seed, double delta_power, int max_power, Normalize normalize)
{
    require_same_layout(m, seed);
    detail::require(delta_power > 0.0 && max_power > 0, "power iteration thresholds must be positive");
    PowerResult out;
    out.x = std::move(seed);
    out.fidelity = block_fidelity(m, out.x);
    out.trace.push_back(out.fidelity);
    BlockRep best = out.x;
    double best_f = out.fidelity;
    out.truncated = true;
    for (int j = 0; j < max_power; ++j) {
        BlockRep next = sandwich(m, out.x);
        normalize(next);
        const double f = block_fidelity(m, next);
        out.trace.push_back(f);
        out.iterations = j + 1;
        const double gain = f - out.fidelity;
        out.x = std::move(next);
        out.fidelity = f;
        if (f > best_f) {
            best_f = f;
            best = out.x;
        }
        if (gain < delta_power) {
            out.truncated = false;
            break;
        }
    }
    if (out.truncated) {
        out.x = std::move(best);
        out.fidelity = best_f;
    }
    return out;
}

Eigen::MatrixXcd ginibre(long dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd out(dim, dim);
    for (long j = 0; j < dim; ++j)
        for (long i = 0; i < dim; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            out(i, j) = cplx(re, im);
        }
    return out;
}

void validate_config(const SeesawConfig& cfg, int d_a, int d_b)
{
    detail::require(cfg.n >= 1, "n must be positive");
    detail::require(cfg.d >= 1 && cfg.d <= kMaxReferenceDim, "code dimension out of range");
    detail::require(cfg.delta > 0.0 && cfg.delta_power > 0.0, "thresholds must be positive");
    detail::require(cfg.max_outer >= 1 && cfg.max_power >= 1 && cfg.seeds >= 1, "iteration caps must be positive");
    const double cap = std::pow(static_cast<double>(std::min(d_a, d_b)), cfg.n);
    detail::require(static_cast<double>(cfg.d) <= cap, "code dimension exceeds min(d_A, d_B)^n");
}

double max_cpu_residual(const BlockRep& b)
{
    const auto r = cpu_residual(b);
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

}  // namespace

std::mt19937_64 split_rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

BlockRep random_symmetric_seed(CobPtr cob, int d_r, SeedKind kind, std::mt19937_64& rng)
{
    detail::require(cob != nullptr && d_r >= 1 && d_r <= kMaxReferenceDim, "invalid seed request");
    BlockRep out = BlockRep::zeros(cob, d_r, Gauge::Ortho);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(out.blocks.size());
    for (auto& x : w) x = expo(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t k = 0; k < out.blocks.size(); ++k) {
        const long dim = static_cast<long>(d_r) * cob->blocks[k].m;
        const Eigen::MatrixXcd g = ginibre(dim, rng);
        Eigen::MatrixXcd x = g * g.adjoint();
        hermitize(x);
        out.blocks[k] = x * (w[k] / total / out.mult(k) / x.trace().real());
    }
    if (kind == SeedKind::Encoder)
        enforce_cptp(out);
    else
        enforce_cpu(out);
    return out;
}

std::optional<BlockRep> isometric_seed(CobPtr cob, int d_r, std::mt19937_64& rng)
{
    detail::require(cob != nullptr && !cob->blocks.empty(), "invalid seed request");
    const auto& first = cob->blocks.front();
    if (first.mult != 1.0 || first.m < d_r) return std::nullopt;
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd a(first.m, d_r);
    for (long j = 0; j < a.cols(); ++j)
        for (long i = 0; i < a.rows(); ++i) {
            const double re = g(rng);
            const double im = g(rng);
            a(i, j) = cplx(re, im);
        }
    const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ() *
                               Eigen::MatrixXcd::Identity(first.m, d_r);
    // Γ^E = Σ_{k,l} |k⟩⟨l| ⊗ v_k v_l† inside the symmetric block.
    Eigen::VectorXcd phi(static_cast<long>(d_r) * first.m);
    for (int k = 0; k < d_r; ++k) phi.segment(static_cast<long>(k) * first.m, first.m) = q.col(k);
    BlockRep out = BlockRep::zeros(cob, d_r, Gauge::Ortho);
    out.blocks[0] = phi * phi.adjoint();
    return out;
}

double block_fidelity(const BlockRep& m, const BlockRep& x)
{
    require_same_layout(m, x);
    return block_pairing(m, x).real() / (static_cast<double>(m.d_r) * m.d_r);
}

PowerResult power_fd(const BlockRep& m, BlockRep seed, double delta_power, int max_power)
{
    return power_iterate(m, std::move(seed), delta_power, max_power, [](BlockRep& x) { enforce_cpu(x); });
}

PowerResult power_fe(const BlockRep& m_adj, BlockRep seed, double delta_power, int max_power)
{
    return power_iterate(m_adj, std::move(seed), delta_power, max_power, [](BlockRep& x) { enforce_cptp(x); });
}

SeesawTables build_tables(const ChoiMatrix& channel, int n, bool use_flags, CobCache* cache, std::uint64_t budget)
{
    detail::require(n >= 1, "n must be positive");
    validate_channel(channel, 1e-8);
    SeesawTables t;
    t.channel = channel;
    t.n = n;
    t.flagged = use_flags;
    if (use_flags) {
        detail::require(channel.flags.has_value(), "channel declares no flag structure");
        t.blocks_b = channel.flags->block_dims;
    } else {
        t.blocks_b = {channel.d_out};
    }
    auto joint = std::make_shared<const OrbitBasis>(SystemSpec({channel.d_in, channel.d_out}, n));
    t.coeffs = tensor_coefficients(channel.gamma, n, joint);
    t.md = marginal_data_for(t.coeffs);
    CobCache local;
    CobCache& c = cache ? *cache : local;
    t.cob_a = c.plain(channel.d_in, n, budget);
    t.cob_b = use_flags ? c.algebra(AlgebraSpec(t.blocks_b, n), budget) : c.plain(channel.d_out, n, budget);
    return t;
}

BlockRep channel_after_encoder(const SeesawTables& t, const BlockRep& encoder)
{
    const RefCoefficients e = psi_tilde_inv_ref(encoder);
    if (t.flagged) {
        const auto m = algebra_link_after_encoder(t.coeffs, e, t.md, {t.channel.d_in}, t.blocks_b);
        return algebra_block_diag(m, t.cob_b);
    }
    return psi_tilde(compose_after_encoder(t.coeffs, e, t.md), t.cob_b);
}

BlockRep channel_before_decoder_adj(const SeesawTables& t, const BlockRep& decoder_adj)
{
    const RefCoefficients dec = adjoint(psi_tilde_inv_ref(decoder_adj));
    const RefCoefficients m = t.flagged
                                  ? algebra_link_before_decoder(t.coeffs, dec, t.md, {t.channel.d_in}, t.blocks_b)
                                  : compose_before_decoder(t.coeffs, dec, t.md);
    return psi_tilde(adjoint(m), t.cob_a);
}

const SeesawRun& SeesawResult::best() const
{
    detail::require(!runs.empty(), "result holds no runs");
    for (const auto& r : runs)
        if (r.seed_index == best_seed) return r;
    return runs.front();
}

SeesawRun seesaw_single(const SeesawTables& t, const SeesawConfig& cfg, BlockRep encoder, BlockRep decoder_adj,
                        std::uint64_t seed_index)
{
    SeesawRun run;
    run.seed_index = seed_index;
    const double delta = std::max(cfg.delta, kDeltaFloor);
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        const BlockRep m = channel_after_encoder(t, encoder);
        auto pd = power_fd(m, std::move(decoder_adj), cfg.delta_power, cfg.max_power);
        for (double v : pd.trace) run.trajectory.push_back({outer, "fd", v});
        decoder_adj = std::move(pd.x);
        run.fd = pd.fidelity;
        run.truncated = run.truncated || pd.truncated;

        const BlockRep m_adj = channel_before_decoder_adj(t, decoder_adj);
        auto pe = power_fe(m_adj, std::move(encoder), cfg.delta_power, cfg.max_power);
        for (double v : pe.trace) run.trajectory.push_back({outer, "fe", v});
        encoder = std::move(pe.x);
        run.fe = pe.fidelity;
        run.truncated = run.truncated || pe.truncated;
        run.outer = outer + 1;
        if (run.fe - run.fd < delta) {
            run.converged = true;
            break;
        }
    }
    if (!run.converged) run.truncated = true;
    run.fidelity = run.fe;
    run.encoder = std::move(encoder);
    run.decoder_adj = std::move(decoder_adj);
    return run;
}

SeesawResult seesaw_run(const SeesawTables& t, const SeesawConfig& cfg)
{
    validate_config(cfg, t.channel.d_in, t.channel.d_out);
    detail::require(cfg.n == t.n, "tables were built for a different n");
    const auto start = std::chrono::steady_clock::now();
    SeesawResult res;
    res.config = cfg;
    res.best_n = cfg.n;
    for (int s = 0; s < cfg.seeds; ++s) {
        const auto idx = static_cast<std::uint64_t>(s);
        auto rng_e = split_rng(cfg.rng_seed, 2 * idx);
        auto rng_d = split_rng(cfg.rng_seed, 2 * idx + 1);
        std::optional<BlockRep> enc;
        if (s == 0 && cfg.warm_start) enc = isometric_seed(t.cob_a, cfg.d, rng_e);
        if (!enc) enc = random_symmetric_seed(t.cob_a, cfg.d, SeedKind::Encoder, rng_e);
        BlockRep dec = random_symmetric_seed(t.cob_b, cfg.d, SeedKind::Decoder, rng_d);
        res.runs.push_back(seesaw_single(t, cfg, std::move(*enc), std::move(dec), idx));
        const auto& r = res.runs.back();
        if (s == 0 || r.fidelity > res.best_fidelity) {
            res.best_fidelity = r.fidelity;
            res.best_seed = idx;
        }
    }
    const auto& b = res.best();
    res.converged = b.converged;
    res.truncated = b.truncated;
    res.cpu_residual = max_cpu_residual(b.decoder_adj);
    res.cptp_residual = cptp_residual(b.encoder);
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return res;
}

SeesawResult seesaw_run(const ChoiMatrix& channel, const SeesawConfig& cfg, CobCache* cache)
{
    validate_config(cfg, channel.d_in, channel.d_out);
    return seesaw_run(build_tables(channel, cfg.n, false, cache, cfg.budget), cfg);
}

SeesawResult seesaw_flagged(const ChoiMatrix& channel, const SeesawConfig& cfg, CobCache* cache)
{
    validate_config(cfg, channel.d_in, channel.d_out);
    return seesaw_run(build_tables(channel, cfg.n, true, cache, cfg.budget), cfg);
}

RefCoefficients choi_as_ref(const ChoiMatrix& channel, RefOrder order)
{
    const bool ref_first = order == RefOrder::RefFirst;
    const int d_r = ref_first ? channel.d_in : channel.d_out;
    const int d_s = ref_first ? channel.d_out : channel.d_in;
    detail::require(d_r <= kMaxReferenceDim, "reference dimension too large");
    auto basis = std::make_shared<const OrbitBasis>(SystemSpec({d_s}, 1));
    auto out = RefCoefficients::zeros(d_r, basis, order);
    for (int k = 0; k < d_r; ++k)
        for (int l = 0; l < d_r; ++l)
            for (int a = 0; a < d_s; ++a)
                for (int b = 0; b < d_s; ++b) {
                    const cplx v = ref_first ? channel.gamma(k * d_s + a, l * d_s + b)
                                             : channel.gamma(a * d_r + k, b * d_r + l);
                    if (v == cplx(0.0)) continue;
                    auto e = CountMatrix::zeros(d_s);
                    e.at(a, b) = 1;
                    out.at(k, l).add(basis->index(e), v);
                }
    return out;
}

namespace {

double best_power(const BlockRep& m, CobPtr cob, SeedKind kind, std::uint64_t rng_seed, int seeds, double delta_power,
                  int max_power)
{
    double best = 0.0;
    for (int s = 0; s < seeds; ++s) {
        auto rng = split_rng(rng_seed, static_cast<std::uint64_t>(s));
        auto seed = random_symmetric_seed(cob, m.d_r, kind, rng);
        const auto r = kind == SeedKind::Decoder ? power_fd(m, std::move(seed), delta_power, max_power)
                                                 : power_fe(m, std::move(seed), delta_power, max_power);
        best = s == 0 ? r.fidelity : std::max(best, r.fidelity);
    }
    return best;
}

}  // namespace

double max_fidelity_recovery(const ChoiMatrix& channel, std::uint64_t rng_seed, int seeds, double delta_power,
                             int max_power, bool use_flags)
{
    if (use_flags) {
        detail::require(channel.flags.has_value(), "channel declares no flag structure");
        auto cob = std::make_shared<const ChangeOfBasis>(build_algebra_cob(AlgebraSpec(channel.flags->block_dims, 1)));
        const BlockRep m = algebra_block_diag(choi_as_ref(channel, RefOrder::RefFirst), cob);
        return best_power(m, cob, SeedKind::Decoder, rng_seed, seeds, delta_power, max_power);
    }
    auto cob = std::make_shared<const ChangeOfBasis>(build_change_of_basis(channel.d_out, 1));
    const BlockRep m = psi_tilde(choi_as_ref(channel, RefOrder::RefFirst), cob);
    return best_power(m, cob, SeedKind::Decoder, rng_seed, seeds, delta_power, max_power);
}

double max_fidelity_preparation(const ChoiMatrix& channel, std::uint64_t rng_seed, int seeds, double delta_power,
                                int max_power)
{
    auto cob = std::make_shared<const ChangeOfBasis>(build_change_of_basis(channel.d_in, 1));
    const BlockRep m = psi_tilde(adjoint(choi_as_ref(channel, RefOrder::RefLast)), cob);
    return best_power(m, cob, SeedKind::Encoder, rng_seed, seeds, delta_power, max_power);
}

ChoiMatrix family_channel(Family f, double param)
{
    return f == Family::Adc ? adc(param) : depolarizing(param);
}

std::vector<SweepRow> sweep(Family family, const std::vector<double>& params, const std::vector<int>& ns,
                            const SeesawConfig& cfg, CobCache* cache)
{
    CobCache local;
    CobCache& c = cache ? *cache : local;
    std::vector<SweepRow> rows;
    for (double p : params) {
        const ChoiMatrix ch = family_channel(family, p);
        const std::size_t first = rows.size();
        std::size_t best = first;
        for (int n : ns) {
            SeesawConfig run_cfg = cfg;
            run_cfg.n = n;
            const auto res = seesaw_run(ch, run_cfg, &c);
            rows.push_back({p, n, res.best_fidelity, false, res.converged});
            // A later n must beat the incumbent strictly; ties keep the smaller n.
            const auto& cur = rows.back();
            const auto& inc = rows[best];
            if (cur.fidelity > inc.fidelity + 1e-12 || (std::abs(cur.fidelity - inc.fidelity) <= 1e-12 && cur.n < inc.n))
                best = rows.size() - 1;
        }
        if (rows.size() > first) rows[best].best = true;
    }
    return rows;
}

nlohmann::json result_to_json(const SeesawResult& r, bool include_timing)
{
    using nlohmann::json;
    const auto& c = r.config;
    json out;
    out["code_version"] = kVersion;
    out["config"] = {{"n", c.n},
                     {"d", c.d},
                     {"delta", c.delta},
                     {"delta_power", c.delta_power},
                     {"max_outer", c.max_outer},
                     {"max_power", c.max_power},
                     {"seeds", c.seeds},
                     {"rng_seed", c.rng_seed},
                     {"warm_start", c.warm_start}};
    json iters = json::array();
    const auto& b = r.best();
    for (const auto& p : b.trajectory) iters.push_back({{"outer", p.outer}, {"phase", p.phase}, {"value", p.value}});
    out["per_iteration"] = std::move(iters);
    out["final"] = {{"fidelity", r.best_fidelity}, {"n", r.best_n},         {"seed", r.best_seed},
                    {"fd", b.fd},                  {"fe", b.fe},            {"outer", b.outer},
                    {"converged", r.converged},    {"truncated", r.truncated}};
    json runs = json::array();
    for (const auto& run : r.runs)
        runs.push_back({{"seed", run.seed_index},
                        {"fidelity", run.fidelity},
                        {"outer", run.outer},
                        {"converged", run.converged},
                        {"truncated", run.truncated}});
    out["runs"] = std::move(runs);
    out["residuals"] = {{"cpu", r.cpu_residual}, {"cptp", r.cptp_residual}};
    if (include_timing) out["wall_ms"] = r.wall_ms;
    return out;
}

}  // namespace permsym

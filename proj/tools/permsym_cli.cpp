// permsym: tables, seesaw runs, sweeps and validation suites.
//
// Exit codes: 0 success (seesaw converged), 2 seesaw truncated by an
// iteration cap, 1 any error.

#include "permsym/cache.hpp"
#include "permsym/checks.hpp"
#include "permsym/error.hpp"
#include "permsym/seesaw.hpp"
#include "permsym/version.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace permsym;

namespace {

std::vector<double> parse_doubles(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_ints(const std::string& s)
{
    std::vector<int> out;
    for (double v : parse_doubles(s)) out.push_back(static_cast<int>(v));
    return out;
}

struct RunOptions {
    int n = 1;
    int d = 2;
    int seeds = 4;
    std::uint64_t rng_seed = 0;
    double delta = 1e-7;
    double delta_power = 1e-9;
    int max_outer = 1000;
    int max_power = 10000;
    bool no_warm_start = false;
    std::string cache_dir;
    std::string out;
    std::string format = "json";
    bool timing = false;

    SeesawConfig config() const
    {
        SeesawConfig c;
        c.n = n;
        c.d = d;
        c.seeds = seeds;
        c.rng_seed = rng_seed;
        c.delta = delta;
        c.delta_power = delta_power;
        c.max_outer = max_outer;
        c.max_power = max_power;
        c.warm_start = !no_warm_start;
        return c;
    }

    std::optional<std::filesystem::path> cache() const
    {
        return resolve_cache_dir(cache_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(cache_dir));
    }
};

void add_run_options(CLI::App* cmd, RunOptions& o)
{
    cmd->add_option("--d", o.d, "code dimension (reference d_R = d)");
    cmd->add_option("--seeds", o.seeds, "random restarts");
    cmd->add_option("--rng-seed", o.rng_seed, "64-bit RNG seed");
    cmd->add_option("--delta", o.delta, "seesaw threshold on F_E - F_D");
    cmd->add_option("--delta-power", o.delta_power, "power-iteration threshold");
    cmd->add_option("--max-outer", o.max_outer, "seesaw iteration cap");
    cmd->add_option("--max-power", o.max_power, "power-iteration cap");
    cmd->add_flag("--no-warm-start", o.no_warm_start, "use random encoders for every restart");
    cmd->add_option("--cache-dir", o.cache_dir, "table cache directory (PERMSYM_CACHE overrides)");
    cmd->add_option("--out", o.out, "output file (default stdout)");
    cmd->add_flag("--timing", o.timing, "include wall-clock time in the output");
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write " + path);
    out << text;
}

nlohmann::json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

struct ChannelChoice {
    ChoiMatrix channel;
    bool flagged = false;
};

ChannelChoice make_channel(const std::string& spec, double gamma, double p)
{
    if (spec == "adc") return {adc(gamma), false};
    if (spec == "depolarizing") return {depolarizing(p), false};
    if (spec == "identity") return {identity_channel(2), false};
    if (spec.rfind("file:", 0) == 0) return {channel_from_json(read_json(spec.substr(5))), false};
    if (spec.rfind("flagged:", 0) == 0) {
        auto ch = channel_from_json(read_json(spec.substr(8)));
        if (!ch.flags) throw ParseError(spec.substr(8) + ": channel declares no flags");
        return {std::move(ch), true};
    }
    throw ArgumentError("unknown channel '" + spec + "'");
}

int cmd_tables(int d, int n, int d_b, int flags, const std::string& blocks, const std::string& cache_dir)
{
    CobCache cache(resolve_cache_dir(cache_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(cache_dir)));
    std::vector<int> algebra = parse_ints(blocks);
    if (flags > 0) algebra.assign(static_cast<std::size_t>(flags), d);
    CobPtr cob;
    if (!algebra.empty()) {
        const AlgebraSpec spec(algebra, n);
        fmt::print("algebra: blocks={} n={}\n", fmt::join(algebra, ","), n);
        fmt::print("orbits: {}\n", algebra_orbit_count(spec).str());
        cob = cache.algebra(spec);
    } else {
        fmt::print("system: d={} n={}\n", d, n);
        fmt::print("orbits: {}\n", binomial(n + d * d - 1, n).str());
        cob = cache.plain(d, n);
    }
    BigInt sum_m2 = 0, sum_dim = 0;
    for (const auto& b : cob->blocks) {
        sum_m2 += BigInt(b.m) * b.m;
        sum_dim += BigInt(b.m) * b.copies * b.f;
    }
    fmt::print("blocks: {} (sum m^2 = {}, sum copies*f*m = {})\n", cob->blocks.size(), sum_m2.str(), sum_dim.str());
    for (const auto& b : cob->blocks)
        fmt::print("  {} m={} f={} copies={}\n", b.label, b.m, b.f.str(), b.copies.str());
    if (d_b > 0) {
        const SystemSpec joint({d, d_b}, n);
        const auto md = marginal_data(joint);
        fmt::print("joint: d_A={} d_B={} orbits={} marginal entries={}\n", d, d_b, md.joint->size(), md.entries.size());
    }
    if (cache.dir())
        fmt::print("cache: {} {}\n", cache.builds() == 0 ? "hit" : "built", cache.dir()->string());
    else
        fmt::print("cache: disabled\n");
    return 0;
}

int cmd_seesaw(const std::string& channel_spec, double gamma, double p, const RunOptions& o)
{
    const auto choice = make_channel(channel_spec, gamma, p);
    CobCache cache(o.cache());
    const auto cfg = o.config();
    const auto res = choice.flagged ? seesaw_flagged(choice.channel, cfg, &cache) : seesaw_run(choice.channel, cfg, &cache);
    if (o.format == "csv") {
        std::string text = fmt::format("# permsym {} channel={} n={} d={} seeds={} rng_seed={}\nouter,phase,value\n", kVersion,
                                       channel_spec, cfg.n, cfg.d, cfg.seeds, cfg.rng_seed);
        for (const auto& pt : res.best().trajectory) text += fmt::format("{},{},{:.17g}\n", pt.outer, pt.phase, pt.value);
        write_output(o.out, text);
    } else {
        auto j = result_to_json(res, o.timing);
        j["command"] = "seesaw";
        j["channel"] = {{"spec", channel_spec}, {"flagged", choice.flagged}, {"choi", channel_to_json(choice.channel)}};
        if (channel_spec == "adc") j["channel"]["gamma"] = gamma;
        if (channel_spec == "depolarizing") j["channel"]["p"] = p;
        write_output(o.out, j.dump(2) + "\n");
    }
    fmt::print(std::cerr, "fidelity {:.12f} (n={}, seed {}, {})\n", res.best_fidelity, cfg.n, res.best_seed,
               res.truncated ? "truncated" : "converged");
    return res.truncated ? 2 : 0;
}

int cmd_sweep(const std::string& family_name, const std::string& grid, const std::string& ns_spec, const RunOptions& o)
{
    Family family;
    ReferenceKind ref;
    std::string ref_name;
    if (family_name == "adc") {
        family = Family::Adc;
        ref = ReferenceKind::Leung4;
        ref_name = "leung4";
    } else if (family_name == "depolarizing") {
        family = Family::Depolarizing;
        ref = ReferenceKind::FiveQubit;
        ref_name = "fivequbit";
    } else {
        throw ArgumentError("unknown family '" + family_name + "'");
    }
    const auto params = parse_doubles(grid);
    const auto ns = parse_ints(ns_spec);
    if (params.empty() || ns.empty()) throw ArgumentError("empty parameter grid or n range");
    CobCache cache(o.cache());
    const auto cfg = o.config();
    const auto rows = sweep(family, params, ns, cfg, &cache);
    const auto uncoded = [&](double x) { return family == Family::Adc ? adc_uncoded(x) : depolarizing_uncoded(x); };
    if (o.format == "json") {
        nlohmann::json j;
        j["code_version"] = kVersion;
        j["command"] = "sweep";
        j["family"] = family_name;
        j["config"] = {{"d", cfg.d},          {"seeds", cfg.seeds},         {"rng_seed", cfg.rng_seed},
                       {"delta", cfg.delta},  {"delta_power", cfg.delta_power}, {"max_outer", cfg.max_outer},
                       {"max_power", cfg.max_power}, {"warm_start", cfg.warm_start}};
        j["rows"] = nlohmann::json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"param", r.param},
                                 {"n", r.n},
                                 {"fidelity", r.fidelity},
                                 {"best", r.best},
                                 {"converged", r.converged},
                                 {"uncoded", uncoded(r.param)},
                                 {ref_name, reference_curve(ref, r.param)}});
        write_output(o.out, j.dump(2) + "\n");
    } else {
        std::string text = fmt::format("# permsym {} sweep family={} d={} seeds={} rng_seed={} delta={} delta_power={}\n",
                                       kVersion, family_name, cfg.d, cfg.seeds, cfg.rng_seed, cfg.delta, cfg.delta_power);
        text += fmt::format("param,n,fidelity,best_flag,converged,uncoded,{}\n", ref_name);
        for (const auto& r : rows)
            text += fmt::format("{:.17g},{},{:.17g},{},{},{:.17g},{:.17g}\n", r.param, r.n, r.fidelity, r.best ? 1 : 0,
                                r.converged ? 1 : 0, uncoded(r.param), reference_curve(ref, r.param));
        write_output(o.out, text);
    }
    bool all = true;
    for (const auto& r : rows) all = all && r.converged;
    return all ? 0 : 2;
}

int cmd_validate(const std::string& level)
{
    using namespace permsym::checks;
    const bool full = level == "full";
    if (!full && level != "quick") throw ArgumentError("level must be quick or full");
    std::vector<std::function<CheckResult()>> suite = {
        [&] { return dense_equivalence(full ? 3 : 2); },
        [] { return dimension_anchors(); },
        [&] { return full ? method_agreement(6, 4) : method_agreement(4, 3); },
        [&] { return star_isomorphism(full ? 4 : 2); },
        [] { return schur_weyl_dimensions(8); },
        [&] { return full ? monotonicity(50, 4) : monotonicity(10, 2); },
        [] { return fidelity_anchors(); },
        [&] { return multiplicativity(full ? 5 : 2); },
        [&] { return flagged_additivity(full ? 5 : 2); },
    };
    int failed = 0;
    for (const auto& check : suite) {
        const auto r = check();
        failed += r.pass ? 0 : 1;
        fmt::print("{} {} ({:.1f}s): {}\n", r.pass ? "PASS" : "FAIL", r.name, r.seconds, r.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} checks passed\n", suite.size() - static_cast<std::size_t>(failed), suite.size());
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Permutation-invariant channel fidelity tools"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    int t_d = 2, t_n = 1, t_db = 0, t_flags = 0, t_dr = 0;
    std::string t_blocks, t_cache;
    auto* tables = app.add_subcommand("tables", "build or load change-of-basis tables and print their dimensions");
    tables->add_option("--d", t_d, "local dimension")->required();
    tables->add_option("--n", t_n, "copies")->required();
    tables->add_option("--d-r", t_dr, "reference dimension (tables do not depend on it)");
    tables->add_option("--d-b", t_db, "also build marginal data for the bipartite system [d, d_b]");
    tables->add_option("--flags", t_flags, "flagged algebra with this many blocks of dimension d");
    tables->add_option("--blocks", t_blocks, "flagged algebra block dimensions, comma separated");
    tables->add_option("--cache-dir", t_cache, "cache directory (PERMSYM_CACHE overrides)");

    RunOptions s_opts;
    std::string s_channel = "adc";
    double s_gamma = 0.1, s_p = 0.05;
    auto* seesaw = app.add_subcommand("seesaw", "run the symmetric seesaw on one channel");
    seesaw->add_option("--channel", s_channel, "adc | depolarizing | identity | file:PATH | flagged:PATH");
    seesaw->add_option("--gamma", s_gamma, "amplitude-damping parameter");
    seesaw->add_option("--p", s_p, "depolarizing parameter");
    seesaw->add_option("--n", s_opts.n, "copies");
    seesaw->add_option("--format", s_opts.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    add_run_options(seesaw, s_opts);

    RunOptions w_opts;
    w_opts.format = "csv";
    std::string w_family = "adc", w_grid = "0,0.05,0.1,0.15,0.2", w_ns = "1,2,3";
    auto* sw = app.add_subcommand("sweep", "seesaw over a parameter grid and range of n");
    sw->add_option("--family", w_family, "adc | depolarizing");
    sw->add_option("--grid", w_grid, "comma-separated parameter values");
    sw->add_option("--ns", w_ns, "comma-separated values of n");
    sw->add_option("--format", w_opts.format, "csv | json")->check(CLI::IsMember({"json", "csv"}));
    add_run_options(sw, w_opts);

    std::string v_level = "quick";
    auto* validate = app.add_subcommand("validate", "run the oracle and property suites");
    validate->add_option("--level", v_level, "quick | full")->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    try {
        if (*tables) return cmd_tables(t_d, t_n, t_db, t_flags, t_blocks, t_cache);
        if (*seesaw) return cmd_seesaw(s_channel, s_gamma, s_p, s_opts);
        if (*sw) return cmd_sweep(w_family, w_grid, w_ns, w_opts);
        if (*validate) return cmd_validate(v_level);
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 1;
    }
    return 1;
}

#include "smax/commands.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smax/acceptance.hpp"
#include "smax/chain.hpp"
#include "smax/config.hpp"
#include "smax/csv.hpp"
#include "smax/ergodicity.hpp"
#include "smax/report.hpp"
#include "smax/validation.hpp"

namespace smax {

namespace {

namespace fs = std::filesystem;

const UnitVec3 kProbe(0.2, -0.4, 0.89);
const UnitVec3 kProbe2(-0.7, 0.1, 0.3);

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    int threads = 1;
};

/* --out names a directory (trailing slash or existing dir) holding default
 * file names, or a file path used for the primary artifact. */
fs::path resolve_primary(const std::string& out, const std::string& default_name) {
    if (out.empty()) return fs::path(default_name);
    fs::path p(out);
    if (fs::is_directory(p) || out.back() == '/') {
        fs::create_directories(p);
        return p / default_name;
    }
    if (p.has_extension()) {
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        return p;
    }
    fs::create_directories(p);
    return p / default_name;
}

fs::path with_suffix(const fs::path& primary, const std::string& tail) {
    fs::path q = primary.parent_path() / primary.stem();
    q += tail;
    return q;
}

/* Prints every record, writes the report file when requested, and returns
 * the exit code implied by the pass flags. */
int finish(const std::vector<CheckRecord>& records, const Common& c,
           const std::string& default_report) {
    for (const auto& r : records) std::cout << to_json_line(r) << '\n';
    if (!c.out.empty())
        write_report_file(resolve_primary(c.out, default_report).string(), records);
    if (!all_pass(records)) {
        std::cerr << failing_lines(records);
        return 1;
    }
    return 0;
}

int cmd_simulate_innovation(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    RngStream rng(seed);
    InnovationField z =
        cfg.eval_mode == EvalMode::sphere
            ? simulate_innovation(cfg.kappa, whole_sphere, rng, cfg.intensity_mode)
            : simulate_innovation(cfg.kappa, fibonacci_grid(cfg.grid_n), rng,
                                  cfg.intensity_mode);
    fs::path path = resolve_primary(c.out, "innovation.csv");
    write_event_csv_file(path.string(), z.events);
    std::cout << path.string() << ": " << z.events.size() << " events\n";
    return 0;
}

int cmd_simulate_chain(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    InitialField h0 = InitialField::constant(1.0);
    RngStream rng(seed);
    ChainState st = make_initial_state(h0, chain_cfg);
    SphericalGrid es = fibonacci_grid(cfg.grid_n);

    std::vector<FieldRow> rows;
    rows.reserve(es.size() * static_cast<std::size_t>(cfg.horizon + 1));
    auto dump = [&](const ChainState& state) {
        for (std::size_t i = 0; i < es.size(); ++i)
            rows.push_back({state.t, i, es.nodes[i], eval_state(state, es.nodes[i])});
    };
    dump(st);
    for (int t = 1; t <= cfg.horizon; ++t) {
        st = step(st, rng);
        dump(st);
    }

    fs::path traj = resolve_primary(c.out, "trajectory.csv");
    write_field_csv_file(traj.string(), rows);
    fs::path state_csv = with_suffix(traj, "_state.csv");
    fs::path state_json = with_suffix(traj, "_state.json");
    write_event_csv_file(state_csv.string(), st.events);
    write_snapshot_sidecar_file(
        state_json.string(),
        {st.t, chain_cfg.a, chain_cfg.theta, chain_cfg.axis, chain_cfg.kappa, st.scale, -1});
    std::cout << traj.string() << ", " << state_csv.string() << ", " << state_json.string()
              << '\n';
    return 0;
}

int cmd_stationary(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    StationaryParams sp{cfg.epsilon, cfg.delta, -1};
    const int J = truncation_depth(cfg.epsilon, cfg.delta, chain_cfg.sigma_z(), chain_cfg.a);
    RngStream rng(seed);
    ChainState st = stationary_draw(chain_cfg, sp, rng);

    fs::path path = resolve_primary(c.out, "stationary.csv");
    write_event_csv_file(path.string(), st.events);
    fs::path sidecar = with_suffix(path, ".json");
    write_snapshot_sidecar_file(
        sidecar.string(),
        {st.t, chain_cfg.a, chain_cfg.theta, chain_cfg.axis, chain_cfg.kappa, st.scale, J});
    std::cout << path.string() << ": " << st.events.size() << " events, depth " << J << '\n';
    return 0;
}

int cmd_verify_drift(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    InitialField h = InitialField::constant(1.0);
    DriftReport rep =
        drift_check(h, chain_cfg, cfg.gamma, cfg.replications, RngStream(seed), c.threads);

    CheckRecord r;
    r.check = "drift";
    r.params = {{"a", chain_cfg.a}, {"gamma", cfg.gamma},  {"kappa", chain_cfg.kappa},
                {"field", "const_1"}, {"L_h", rep.L_h},    {"rhs", rep.rhs}};
    r.estimate = rep.pl_mc;
    r.stderr_ = rep.mc_stderr;
    r.analytic = rep.pl_closed;
    r.n = rep.n;
    r.seed = seed;
    r.pass = rep.pass;
    return finish({r}, c, "drift.jsonl");
}

int cmd_verify_minorization(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    const double R = cfg.R;
    const double gamma = cfg.gamma;
    const double cval =
        std::min(R, std::pow(R / (1.0 + std::pow(2.0, -gamma)), 1.0 / gamma));
    InitialField h1 = InitialField::constant(cval);
    InitialField h2 = InitialField::constant(cval / 2.0);
    const double alpha = minorization_alpha(R, chain_cfg.a, chain_cfg.kappa,
                                            intensity_rate(chain_cfg.intensity));
    CouplingEstimate est = empirical_coupling_prob(h1, h2, chain_cfg, cfg.replications,
                                                  RngStream(seed), c.threads);

    CheckRecord r;
    r.check = "minorization";
    r.params = {{"R", R}, {"a", chain_cfg.a}, {"kappa", chain_cfg.kappa}, {"c", cval}};
    r.estimate = est.fraction;
    r.stderr_ = est.stderr_;
    r.analytic = alpha;
    r.n = cfg.replications;
    r.seed = seed;
    r.pass = est.fraction >= alpha - 3.0 * est.stderr_;
    return finish({r}, c, "minorization.jsonl");
}

int cmd_verify_margins(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    StationaryParams sp{cfg.epsilon, cfg.delta, -1};
    KsResult ks =
        chain_margin_check(chain_cfg, sp, kProbe, cfg.replications, RngStream(seed), c.threads);

    CheckRecord r;
    r.check = "margins";
    r.params = {{"a", chain_cfg.a}, {"kappa", chain_cfg.kappa}, {"probe",
                nlohmann::ordered_json::array({kProbe.x(), kProbe.y(), kProbe.z()})}};
    r.estimate = ks.statistic;
    r.analytic = ks.threshold;
    r.n = ks.n;
    r.seed = seed;
    r.pass = ks.pass;
    return finish({r}, c, "margins.jsonl");
}

int cmd_verify_stability(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    RngStream root(seed);

    std::vector<UnitVec3> points = {kProbe, kProbe2, UnitVec3(0.5, 0.5, -0.7)};
    RngStream rot_stream = root.derive(0);
    RotationStabilityResult rs =
        rotation_stability_check(points, chain_cfg.theta, chain_cfg.axis, chain_cfg.kappa,
                                 cfg.grid_n, 100000, rot_stream);
    CheckRecord r1;
    r1.check = "rotation_stability";
    r1.params = {{"m", points.size()},
                 {"kappa", chain_cfg.kappa},
                 {"theta", chain_cfg.theta},
                 {"grid_mc_consistent", rs.grid_mc_consistent}};
    r1.estimate = rs.rel_err;
    r1.stderr_ = std::max(rs.mc_stderr_lhs, rs.mc_stderr_rhs);
    r1.analytic = 1e-2;
    r1.n = 100000;
    r1.seed = seed;
    r1.pass = rs.rel_err < 1e-2 && rs.grid_mc_consistent;

    MaxStabilityResult ms = max_stability_check(chain_cfg, 10, kProbe, kProbe2,
                                                cfg.replications, root.derive(1), c.threads);
    CheckRecord r2;
    r2.check = "max_stability";
    r2.params = {{"n_copies", 10},
                 {"kappa", chain_cfg.kappa},
                 {"probe_ks", nlohmann::ordered_json::array(
                                  {ms.probe_ks[0].statistic, ms.probe_ks[1].statistic})}};
    r2.estimate = ms.bivariate_discrepancy;
    r2.analytic = ms.bivariate_threshold;
    r2.n = cfg.replications;
    r2.seed = seed;
    r2.pass = ms.pass;
    return finish({r1, r2}, c, "stability.jsonl");
}

int cmd_couple(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    InitialField h1 = InitialField::constant(2.0);
    InitialField h2 = InitialField::constant(1.0);
    const double diff = 1.0;
    SphericalGrid grid = fibonacci_grid(cfg.grid_n);
    RngStream rng(seed);
    std::vector<double> d = coupled_trajectory(h1, h2, chain_cfg, cfg.horizon, grid, rng);

    std::vector<double> bounds(d.size());
    bool ok = true;
    double max_excess = 0.0;
    for (std::size_t t = 0; t < d.size(); ++t) {
        bounds[t] = std::pow(chain_cfg.a, static_cast<double>(t)) * diff;
        max_excess = std::max(max_excess, d[t] - bounds[t]);
        if (d[t] > bounds[t] + 1e-12) ok = false;
    }
    fs::path path = resolve_primary(c.out, "coupling.csv");
    write_distance_csv_file(path.string(), d, bounds);

    CheckRecord r;
    r.check = "coupling_contraction";
    r.params = {{"a", chain_cfg.a}, {"kappa", chain_cfg.kappa}, {"horizon", cfg.horizon},
                {"distances_file", path.string()}};
    r.estimate = max_excess;
    r.analytic = 1e-12;
    r.n = static_cast<std::uint64_t>(cfg.horizon);
    r.seed = seed;
    r.pass = ok;
    for (const auto& rec : std::vector<CheckRecord>{r}) std::cout << to_json_line(rec) << '\n';
    if (!ok) {
        std::cerr << to_json_line(r) << '\n';
        return 1;
    }
    return 0;
}

int cmd_convergence(const RunConfig& cfg, std::uint64_t seed, const Common& c) {
    ChainConfig chain_cfg = cfg.chain();
    InitialField h0 = InitialField::constant(100.0);
    ConvergenceReport rep = convergence_rate(chain_cfg, h0, kProbe, cfg.horizon,
                                             cfg.replications, RngStream(seed), c.threads);

    CheckRecord r;
    r.check = "convergence_slope";
    auto dist = nlohmann::ordered_json::array();
    for (double v : rep.distances) dist.push_back(v);
    r.params = {{"a", chain_cfg.a},
                {"kappa", chain_cfg.kappa},
                {"h0", 100.0},
                {"horizon", cfg.horizon},
                {"noise_floor", rep.noise_floor},
                {"distances", dist}};
    r.estimate = rep.fitted_log_slope;
    r.analytic = rep.slope_threshold;
    r.n = cfg.replications;
    r.seed = seed;
    r.pass = rep.pass;
    return finish({r}, c, "convergence.jsonl");
}

int cmd_report_all(std::uint64_t seed, const Common& c) {
    std::vector<CheckRecord> all;
    bool ok = true;
    for (const auto& name : acceptance_names()) {
        auto recs = run_acceptance(name, seed, c.threads);
        bool check_ok = all_pass(recs);
        std::cout << (check_ok ? "[PASS] " : "[FAIL] ") << name << '\n';
        ok = ok && check_ok;
        for (auto& r : recs) all.push_back(std::move(r));
    }
    write_report_file(resolve_primary(c.out, "report.jsonl").string(), all);
    if (!ok) {
        std::cerr << failing_lines(all);
        return 1;
    }
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"simulation and verification toolkit for max-stable chains on the sphere"};
    app.require_subcommand(1);

    Common c;
    const std::vector<std::string> names = {
        "simulate-innovation", "simulate-chain",  "stationary",
        "verify-drift",        "verify-minorization", "verify-margins",
        "verify-stability",    "couple",          "convergence",
        "report-all"};
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", c.config, "run configuration file")->required();
        sub->add_option("--out", c.out, "output file or directory");
        sub->add_option("--seed", c.seed, "master seed override");
        sub->add_option("--override", c.overrides, "section.key=value config override");
        sub->add_option("--threads", c.threads, "worker threads inside estimators");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = parse_config(c.config, c.overrides);
        const std::uint64_t seed = c.seed.value_or(cfg.seed);
        const std::string name = app.get_subcommands().front()->get_name();

        if (name == "simulate-innovation") return cmd_simulate_innovation(cfg, seed, c);
        if (name == "simulate-chain") return cmd_simulate_chain(cfg, seed, c);
        if (name == "stationary") return cmd_stationary(cfg, seed, c);
        if (name == "verify-drift") return cmd_verify_drift(cfg, seed, c);
        if (name == "verify-minorization") return cmd_verify_minorization(cfg, seed, c);
        if (name == "verify-margins") return cmd_verify_margins(cfg, seed, c);
        if (name == "verify-stability") return cmd_verify_stability(cfg, seed, c);
        if (name == "couple") return cmd_couple(cfg, seed, c);
        if (name == "convergence") return cmd_convergence(cfg, seed, c);
        if (name == "report-all") return cmd_report_all(seed, c);
        std::cerr << "unknown subcommand: " << name << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace smax

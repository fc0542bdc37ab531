#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "smax/commands.hpp"
#include "smax/config.hpp"
#include "smax/csv.hpp"
#include "smax/report.hpp"
#include "smax/spectral.hpp"

using namespace smax;
namespace fs = std::filesystem;

namespace {

const char* kMinimalConfig =
    "[model]\n"
    "a = 0.5\n"
    "theta = 0.3\n"
    "axis = [0, 0, 1]\n"
    "kappa = 1.0\n"
    "\n"
    "[sim]\n"
    "seed = 42\n";

/* Expects the parse to fail with a message mentioning `needle`. */
void expect_config_error(const std::string& text, const std::string& needle,
                         const std::vector<std::string>& overrides = {}) {
    bool threw = false;
    try {
        (void)parse_config_text(text, overrides);
    } catch (const std::runtime_error& e) {
        threw = true;
        CAPTURE(e.what());
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
    CHECK(threw);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(static_cast<bool>(is));
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

int call_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "smax");
    std::vector<char*> argv;
    argv.reserve(args.size());
    for (auto& s : args) argv.push_back(s.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config_io: minimal document and defaults") {
    RunConfig cfg = parse_config_text(kMinimalConfig);
    CHECK(cfg.a == 0.5);
    CHECK(cfg.a_provenance == AProvenance::direct);
    CHECK(cfg.theta == 0.3);
    CHECK(cfg.axis.z() == 1.0);
    CHECK(cfg.kappa == 1.0);
    CHECK(cfg.seed == 42);
    CHECK(cfg.grid_n == 4096);
    CHECK(cfg.eval_mode == EvalMode::grid);
    CHECK(cfg.intensity_mode == IntensityMode::exact);
    CHECK(cfg.gamma == 0.5);
    CHECK(cfg.R == 1.0);
    CHECK(cfg.replications == 10000);
    CHECK(cfg.epsilon == 1e-3);
    CHECK(cfg.delta == 1e-3);
    CHECK(cfg.horizon == 12);
    CHECK_NOTHROW(cfg.chain().validate());
}

TEST_CASE("config_io: persistence can come from a continuous-time rate") {
    std::string text =
        "[model]\n"
        "nu = 0.7\n"
        "theta = 0.0\n"
        "axis = [1, 0, 0]\n"
        "kappa = 0.0\n"
        "[sim]\n"
        "seed = 1\n";
    RunConfig cfg = parse_config_text(text);
    CHECK(cfg.a == std::exp(-0.7));
    CHECK(cfg.a == doctest::Approx(0.4965853037914095).epsilon(1e-15));
    CHECK(cfg.a_provenance == AProvenance::continuous);
    CHECK(cfg.nu == 0.7);
    CHECK(cfg.step == 1.0);

    SUBCASE("explicit step length") {
        std::string two =
            "[model]\n"
            "nu = 0.35\n"
            "step = 2.0\n"
            "theta = 0.0\n"
            "axis = [1, 0, 0]\n"
            "kappa = 0.0\n"
            "[sim]\n"
            "seed = 1\n";
        CHECK(parse_config_text(two).a == std::exp(-0.7));
    }
}

TEST_CASE("config_io: rejected documents") {
    expect_config_error(
        "[model]\na = 1.5\ntheta = 0\naxis = [0,0,1]\nkappa = 0\n[sim]\nseed = 1\n",
        "model.a");
    expect_config_error(
        "[model]\na = 0.5\nphi = 0.5\ntheta = 0\naxis = [0,0,1]\nkappa = 0\n"
        "[sim]\nseed = 1\n",
        "exactly one");
    expect_config_error("[model]\ntheta = 0\naxis = [0,0,1]\nkappa = 0\n[sim]\nseed = 1\n",
                        "exactly one");
    expect_config_error(
        "[model]\na = 0.5\ntheta = 0\naxis = [0,0,1]\nkappa = 0\nwhat = 1\n"
        "[sim]\nseed = 1\n",
        "unknown key");
    expect_config_error(
        "[mystery]\nx = 1\n[model]\na = 0.5\ntheta = 0\naxis = [0,0,1]\nkappa = 0\n"
        "[sim]\nseed = 1\n",
        "section");
    expect_config_error(
        "[model]\na = 0.5\ntheta = 0\naxis = [0,0,1]\nkappa = 12\n[sim]\nseed = 1\n",
        "kappa");
    expect_config_error(
        "[model]\na = 0.5\ntheta = 0\naxis = [0,0]\nkappa = 0\n[sim]\nseed = 1\n",
        "axis");
    expect_config_error(
        "[model]\nstep = 2\ntheta = 0\naxis = [0,0,1]\nkappa = 0\n[sim]\nseed = 1\n",
        "model.step");
    expect_config_error(
        "[model]\na = 0.5\na = 0.6\ntheta = 0\naxis = [0,0,1]\nkappa = 0\n"
        "[sim]\nseed = 1\n",
        "duplicate");
    expect_config_error(
        "[model]\na = 0.5\ntheta = 0\naxis = [0,0,1]\nkappa = 0\n"
        "[sim]\nseed = 1\ngrid_n = 0\n",
        "grid_n");
}

TEST_CASE("config_io: overrides") {
    RunConfig cfg = parse_config_text(
        kMinimalConfig, {"model.kappa=2.5", "verify.gamma=0.25", "sim.grid_n=128"});
    CHECK(cfg.kappa == 2.5);
    CHECK(cfg.gamma == 0.25);
    CHECK(cfg.grid_n == 128);

    expect_config_error(kMinimalConfig, "override", {"kappa=2"});
    expect_config_error(kMinimalConfig, "override", {"model.kappa"});

    SUBCASE("optional keys parse from sections too") {
        std::string text = std::string(kMinimalConfig) +
                           "eval_mode = \"sphere\"\n"
                           "[verify]\n"
                           "replications = 500\n"
                           "horizon = 6\n";
        RunConfig c2 = parse_config_text(text);
        CHECK(c2.eval_mode == EvalMode::sphere);
        CHECK(c2.replications == 500);
        CHECK(c2.horizon == 6);
    }

    SUBCASE("comments and stray whitespace are ignored") {
        std::string text =
            "# leading comment\n"
            "[model]\n"
            "  a = 0.5   # trailing comment\n"
            "theta = 0.3\n"
            "axis = [ 0 , 0 , 1 ]\n"
            "kappa = 1.0\n"
            "intensity_mode = \"unit\"\n"
            "[sim]\n"
            "seed = 42\n";
        RunConfig c2 = parse_config_text(text);
        CHECK(c2.a == 0.5);
        CHECK(c2.intensity_mode == IntensityMode::unit);
    }
}

TEST_CASE("config_io: doubles survive the 17-digit format") {
    /* Normal range only: stod raises out_of_range on denormal input, and no
     * artifact ever carries one. */
    for (double v : {1.0 / 3.0, 0.1, 1e300, kFourPi, 2.2250738585072014e-308,
                     12345.678901234567}) {
        CAPTURE(v);
        CHECK(std::stod(fmt17(v)) == v);
    }
    CHECK(fmt17(0.0) == "0");
    CHECK(fmt17(2.5) == "2.5");
}

TEST_CASE("config_io: event CSV round trip is bit exact") {
    RngStream r(700);
    InnovationField z = simulate_innovation(2.0, whole_sphere, r);
    REQUIRE(z.events.size() > 3);

    std::stringstream ss;
    write_event_csv(ss, z.events);
    auto back = read_event_csv(ss);
    REQUIRE(back.size() == z.events.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].weight == z.events[i].weight);
        CHECK(back[i].center.x() == z.events[i].center.x());
        CHECK(back[i].center.y() == z.events[i].center.y());
        CHECK(back[i].center.z() == z.events[i].center.z());
    }

    SUBCASE("wrong header") {
        std::stringstream bad("w,x,y,z\n1,0,0,1\n");
        CHECK_THROWS_AS((void)read_event_csv(bad), std::runtime_error);
    }
    SUBCASE("wrong field count") {
        std::stringstream bad("weight,mu_x,mu_y,mu_z\n1,0,0\n");
        CHECK_THROWS_AS((void)read_event_csv(bad), std::runtime_error);
    }
    SUBCASE("junk number") {
        std::stringstream bad("weight,mu_x,mu_y,mu_z\n1,0,0,abc\n");
        CHECK_THROWS_AS((void)read_event_csv(bad), std::runtime_error);
    }
    SUBCASE("trailing junk") {
        std::stringstream bad("weight,mu_x,mu_y,mu_z\n1.5x,0,0,1\n");
        CHECK_THROWS_AS((void)read_event_csv(bad), std::runtime_error);
    }
}

TEST_CASE("config_io: field and distance CSV layouts") {
    std::vector<FieldRow> rows(1);
    rows[0].t = 0;
    rows[0].node_index = 1;
    rows[0].node = UnitVec3::trusted(0.0, 0.0, 1.0);
    rows[0].value = 2.5;
    std::stringstream ss;
    write_field_csv(ss, rows);
    CHECK(ss.str() == "t,node_index,x,y,z,value\n0,1,0,0,1,2.5\n");

    std::stringstream ds;
    write_distance_csv(ds, {1.0, 0.5}, {1.0, 0.5});
    CHECK(ds.str() == "t,distance,bound\n0,1,1\n1,0.5,0.5\n");
    CHECK_THROWS_AS(write_distance_csv(ds, {1.0}, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("config_io: snapshot sidecar") {
    SnapshotMeta meta;
    meta.t = 7;
    meta.a = 0.5;
    meta.theta = 0.3;
    meta.axis = UnitVec3(0.0, 0.0, 1.0);
    meta.kappa = 2.0;
    meta.scale = 0.0078125;
    std::stringstream ss;
    write_snapshot_sidecar(ss, meta);
    auto j = nlohmann::json::parse(ss.str());
    CHECK(j["t"] == 7);
    CHECK(j["a"] == 0.5);
    CHECK(j["theta"] == 0.3);
    CHECK(j["axis"].size() == 3);
    CHECK(j["axis"][2] == 1.0);
    CHECK(j["kappa"] == 2.0);
    CHECK(j["scale"] == 0.0078125);
    CHECK(j["J"] == -1);
}

TEST_CASE("config_io: report records serialize with a fixed key order") {
    CheckRecord r;
    r.check = "demo";
    r.pass = true;
    r.params["kappa"] = 2.0;
    r.estimate = 0.5;
    r.stderr_ = 0.01;
    r.analytic = 0.25;
    r.n = 100;
    r.seed = 7;
    CHECK(to_json_line(r) ==
          "{\"check\":\"demo\",\"pass\":true,\"params\":{\"kappa\":2.0},"
          "\"estimate\":0.5,\"stderr\":0.01,\"analytic\":0.25,\"n\":100,\"seed\":7}");

    CheckRecord bad = r;
    bad.check = "worse";
    bad.pass = false;
    CHECK(all_pass({r}));
    CHECK_FALSE(all_pass({r, bad}));
    std::string fl = failing_lines({r, bad});
    CHECK(fl.find("worse") != std::string::npos);
    CHECK(fl.find("demo") == std::string::npos);

    std::stringstream ss;
    write_report(ss, {r, bad});
    CHECK(ss.str() == to_json_line(r) + "\n" + to_json_line(bad) + "\n");
}

TEST_CASE("config_io: command line round trips") {
    fs::path dir = fs::temp_directory_path() / "smax_cli_tmp";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path cfg = dir / "run.toml";
    {
        std::ofstream os(cfg);
        os << kMinimalConfig;
    }

    SUBCASE("simulate-innovation writes a decreasing event file") {
        fs::path out = dir / "z.csv";
        int rc = call_cli({"simulate-innovation", "--config", cfg.string(), "--out",
                           out.string()});
        CHECK(rc == 0);
        auto events = read_event_csv_file(out.string());
        REQUIRE(events.size() >= 1);
        for (std::size_t i = 1; i < events.size(); ++i)
            CHECK(events[i].weight < events[i - 1].weight);

        fs::path out2 = dir / "z2.csv";
        int rc2 = call_cli({"simulate-innovation", "--config", cfg.string(), "--out",
                            out2.string()});
        CHECK(rc2 == 0);
        CHECK(slurp(out) == slurp(out2));
    }

    SUBCASE("seed flag changes the draw") {
        fs::path out = dir / "za.csv";
        fs::path out2 = dir / "zb.csv";
        CHECK(call_cli({"simulate-innovation", "--config", cfg.string(), "--out",
                        out.string(), "--seed", "1"}) == 0);
        CHECK(call_cli({"simulate-innovation", "--config", cfg.string(), "--out",
                        out2.string(), "--seed", "2"}) == 0);
        CHECK(slurp(out) != slurp(out2));
    }

    SUBCASE("verify-drift emits a deterministic passing report") {
        fs::path out = dir / "drift.jsonl";
        std::vector<std::string> args = {"verify-drift",
                                         "--config",
                                         cfg.string(),
                                         "--out",
                                         out.string(),
                                         "--override",
                                         "verify.replications=2000",
                                         "--override",
                                         "verify.gamma=0.25"};
        CHECK(call_cli(args) == 0);
        std::string first = slurp(out);
        auto j = nlohmann::json::parse(first.substr(0, first.find('\n')));
        CHECK(j["check"] == "drift");
        CHECK(j["pass"] == true);
        CHECK(call_cli(args) == 0);
        CHECK(slurp(out) == first);
    }

    SUBCASE("bad invocations exit with the usage code") {
        CHECK(call_cli({"no-such-command", "--config", cfg.string()}) == 2);
        CHECK(call_cli({"simulate-innovation"}) == 2);
        CHECK(call_cli({"simulate-innovation", "--config", (dir / "nope.toml").string()}) ==
              2);
    }
}

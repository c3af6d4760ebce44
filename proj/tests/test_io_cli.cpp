#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "dpp/configuration.hpp"
#include "dpp/io.hpp"

using Catch::Approx;
using nlohmann::json;
using namespace dpp;

namespace {

std::filesystem::path scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "dppkit_cli_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

int run_cli(const std::string& args, const std::filesystem::path& stdout_file) {
    const char* bin = std::getenv("DPPCLI_PATH");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string("\"") + bin + "\" " + args + " > \"" +
                            stdout_file.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
    for (double v : {3.141592653589793, 0.1, 1e-300, -2.5, 0.0, 12345678.901234567})
        CHECK(std::stod(fmt17(v)) == v);
}

TEST_CASE("experiment config round-trips through json") {
    ExperimentConfig cfg;
    cfg.kernel = "hermite:5";
    cfg.window_lo = -7.0;
    cfg.window_hi = 7.0;
    cfg.seed = 99;
    cfg.samples = 12;
    cfg.schedule = {{4.0, 0.3}, {6.0, 0.15}};
    cfg.anchor = 0.25;
    cfg.out = "somewhere.csv";
    const ExperimentConfig back = json(cfg).get<ExperimentConfig>();
    CHECK(back == cfg);
}

TEST_CASE("experiment config file save and load") {
    const auto path = scratch_dir() / "cfg_roundtrip.json";
    ExperimentConfig cfg;
    cfg.kernel = "bessel:0.5";
    cfg.window_lo = 0.1;
    cfg.window_hi = 20.0;
    cfg.trajectories = 7;
    save_experiment_config(cfg, path.string());
    CHECK(load_experiment_config(path.string()) == cfg);

    CHECK_THROWS_AS(load_experiment_config((scratch_dir() / "missing.json").string()),
                    PreconditionError);

    const auto bad = scratch_dir() / "bad.json";
    std::ofstream(bad) << "{oops";
    CHECK_THROWS_AS(load_experiment_config(bad.string()), PreconditionError);

    const auto wrong = scratch_dir() / "wrong_type.json";
    std::ofstream(wrong) << "{\"samples\": \"many\"}";
    CHECK_THROWS_AS(load_experiment_config(wrong.string()), PreconditionError);
}

TEST_CASE("csv writer layout") {
    std::ostringstream out;
    CsvWriter csv(out);
    csv.comment("seed 7");
    csv.header({"a", "b"});
    csv.row({1.5, 0.25});
    csv.raw_row({"x", "y"});
    CHECK(out.str() == "# seed 7\na,b\n1.5,0.25\nx,y\n");
}

TEST_CASE("jsonl writer emits one line per record") {
    std::ostringstream out;
    JsonlWriter w(out);
    w.record(json{{"k", 1}});
    w.record(json::array({1.0, 2.0}));
    CHECK(out.str() == "{\"k\":1}\n[1.0,2.0]\n");
}

TEST_CASE("configuration serializes as a sorted array") {
    const Configuration c = Configuration::from_points({3.0, 1.0, 2.0});
    const json j = configuration_to_json(c);
    REQUIRE(j.is_array());
    CHECK(j.get<std::vector<double>>() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("cli rejects missing and unknown subcommands") {
    const auto log = scratch_dir() / "usage.txt";
    CHECK(run_cli("", log) == 64);
    CHECK(run_cli("frobnicate", log) == 64);
    CHECK(run_cli("sample --no-such-flag", log) == 64);
}

TEST_CASE("cli check-kernel reports a healthy sine model") {
    const auto out = scratch_dir() / "check.json";
    REQUIRE(run_cli("check-kernel --kernel sine", out) == 0);
    const json j = json::parse(slurp(out));
    CHECK(j.at("kernel") == "sine");
    CHECK(j.at("ok") == true);
    CHECK(j.at("spectrum_ok") == true);
    CHECK(j.at("discretized_trace").get<double>() == Approx(20.0).margin(0.1));
}

TEST_CASE("cli rejects a reversed window") {
    const auto log = scratch_dir() / "reversed.txt";
    CHECK(run_cli("sample --kernel sine --window-lo 5 --window-hi -5 --samples 1", log) == 1);
}

TEST_CASE("cli sample emits config then sorted configurations, deterministically") {
    const auto out = scratch_dir() / "samples.jsonl";
    const std::string args =
        "sample --kernel hermite:3 --window-lo -8 --window-hi 8 --samples 5 --seed 7 --out " +
        out.string();
    REQUIRE(run_cli(args, scratch_dir() / "sample_stdout.txt") == 0);
    const std::string first = slurp(out);

    const std::vector<std::string> lines = lines_of(first);
    REQUIRE(lines.size() == 6);
    const json meta = json::parse(lines[0]);
    CHECK(meta.at("command") == "sample");
    CHECK(meta.at("config").at("kernel") == "hermite:3");
    CHECK(meta.at("config").at("seed") == 7);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto pts = json::parse(lines[i]).get<std::vector<double>>();
        REQUIRE(pts.size() == 3);
        CHECK(std::is_sorted(pts.begin(), pts.end()));
        for (double x : pts) CHECK(std::abs(x) <= 8.0);
    }

    // same seed, same file: byte-identical rerun
    REQUIRE(run_cli(args, scratch_dir() / "sample_stdout2.txt") == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("cli flags override a config file") {
    const auto cfg_path = scratch_dir() / "partial.json";
    std::ofstream(cfg_path) << R"({"kernel": "hermite:2", "samples": 3, "seed": 2})";
    const auto out = scratch_dir() / "override.jsonl";
    const std::string args = "sample --config " + cfg_path.string() +
                             " --samples 4 --window-lo -8 --window-hi 8 --out " + out.string();
    REQUIRE(run_cli(args, scratch_dir() / "override_stdout.txt") == 0);
    const std::vector<std::string> lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 5);  // config record + 4 samples
    const json meta = json::parse(lines[0]);
    CHECK(meta.at("config").at("kernel") == "hermite:2");
    CHECK(meta.at("config").at("samples") == 4);
    for (std::size_t i = 1; i < lines.size(); ++i)
        CHECK(json::parse(lines[i]).get<std::vector<double>>().size() == 2);
}

TEST_CASE("cli logderiv writes a schedule csv and a summary json") {
    const auto base = scratch_dir() / "ld_run";
    const std::string args =
        "logderiv --kernel hermite:4 --window-lo -8 --window-hi 8 --a 0.3 "
        "--schedule 6.5:0.002,7.5:0.001 --samples 30 --seed 5 --out " +
        base.string();
    REQUIRE(run_cli(args, scratch_dir() / "ld_stdout.txt") == 0);

    const std::vector<std::string> csv = lines_of(slurp(base.string() + ".csv"));
    REQUIRE(csv.size() == 5);  // config, seed, header, two schedule rows
    CHECK(csv[0].rfind("# config ", 0) == 0);
    CHECK(csv[1] == "# seed 5");
    CHECK(csv[2] == "R,delta,value,stderr");
    CHECK(csv[3].rfind("6.5,", 0) == 0);
    CHECK(csv[4].rfind("7.5,", 0) == 0);

    const json summary = json::parse(slurp(base.string() + ".json"));
    CHECK(summary.at("n") == 30);
    CHECK(summary.at("anchor").get<double>() == Approx(0.3));
    CHECK(std::isfinite(summary.at("extrapolated").get<double>()));
    CHECK(std::isfinite(summary.at("cauchy_gap").get<double>()));
    CHECK(summary.at("converged").is_boolean());
}

TEST_CASE("cli rn-check emits the default shift ladder") {
    const auto out = scratch_dir() / "rn.csv";
    const std::string args =
        "rn-check --kernel sine --a 0.3 --samples 200 --seed 11 --out " + out.string();
    REQUIRE(run_cli(args, scratch_dir() / "rn_stdout.txt") == 0);
    const std::vector<std::string> lines = lines_of(slurp(out));
    REQUIRE(lines.size() == 6);  // config, seed, header, three shifts
    CHECK(lines[2] == "eps,l2_gap");
    const std::vector<double> want = {0.2, 0.1, 0.05};
    for (int i = 0; i < 3; ++i) {
        const std::string& row = lines[3 + i];
        const double eps = std::stod(row.substr(0, row.find(',')));
        const double gap = std::stod(row.substr(row.find(',') + 1));
        CHECK(eps == Approx(want[i]));
        CHECK(gap >= 0.0);
        CHECK(std::isfinite(gap));
    }
}

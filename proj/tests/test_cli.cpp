#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "homflow/config.hpp"
#include "homflow/decay.hpp"

namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("/tmp") / ("homflow_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

int run_cli(const std::string& args, const std::string& dir) {
    const std::string cmd = std::string(HOMFLOW_BIN) + " " + args + " --out " +
                            dir + " > " + dir + "/stdout.txt 2> " + dir +
                            "/stderr.txt";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("config map: sections, comments, later assignments win") {
    const auto cfg = homflow::ConfigMap::from_string(
        "# a comment\n"
        "top = 1\n"
        "[sim]\n"
        "N = 16   # trailing comment\n"
        "dt = 1e-3\n"
        "dealias = true\n"
        "N = 32\n"
        "[background]\n"
        "c3 = 0.25\n");
    CHECK(cfg.get_int("top", 0) == 1);
    CHECK(cfg.get_int("sim.N", 0) == 32);
    CHECK(cfg.get_double("sim.dt", 0.0) == 1e-3);
    CHECK(cfg.get_bool("sim.dealias", false));
    CHECK(cfg.get_double("background.c3", 0.0) == 0.25);
    CHECK(cfg.get_double("absent", 7.5) == 7.5);
    CHECK_FALSE(cfg.has("absent"));

    CHECK_THROWS_AS(homflow::ConfigMap::from_string("just words\n"),
                    homflow::ConfigError);
    CHECK_THROWS_AS(homflow::ConfigMap::from_string("[sim\nk=v\n"),
                    homflow::ConfigError);
    CHECK_THROWS_AS(homflow::ConfigMap::from_string("= naked\n"),
                    homflow::ConfigError);
    const auto bad = homflow::ConfigMap::from_string("x = not_a_number\n");
    CHECK_THROWS_AS(bad.get_double("x", 0.0), homflow::ConfigError);
    CHECK_THROWS_AS(bad.get_bool("x", false), homflow::ConfigError);
}

TEST_CASE("classify reports the Landau-family thresholds") {
    const std::string dir = fresh_dir("classify");
    CHECK(run_cli("classify --c 0 0 0", dir) == 0);
    const auto rows = read_csv(dir + "/classify.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][3] == "-4");
    CHECK(rows[1][4] == "in_J");
    CHECK(std::abs(std::stod(rows[1][5]) + 2.0) < 1e-6);
    CHECK(std::abs(std::stod(rows[1][6]) - 2.0) < 1e-6);
    CHECK(fs::exists(dir + "/classify_manifest.json"));

    CHECK(run_cli("classify --c -2 0 0", dir) == 0);
    CHECK(slurp(dir + "/stdout.txt").find("outside_J") != std::string::npos);
}

TEST_CASE("malformed flags and bad configs exit with code 2") {
    const std::string dir = fresh_dir("badflags");
    CHECK(run_cli("classify --c nope 0 0", dir) == 2);
    CHECK(run_cli("classify", dir) == 2);
    CHECK(run_cli("constants --q 2 --tau 0.5", dir) == 2);
    CHECK(run_cli("verify --suite no-such-suite", dir) == 2);
    CHECK(run_cli("simulate --set sim.N=24", dir) == 2);
    CHECK(run_cli("simulate --config /tmp/does_not_exist_homflow.cfg", dir) == 2);
}

TEST_CASE("constants row matches the in-process closed form") {
    const std::string dir = fresh_dir("constants");
    CHECK(run_cli("constants --q 6 --tau 0.5", dir) == 0);
    const auto rows = read_csv(dir + "/constants.csv");
    REQUIRE(rows.size() == 2);
    const double c_q = std::stod(rows[1][2]);
    CHECK(std::abs(c_q - homflow::sharp_constant(6.0, 0.5)) < 1e-15);
    CHECK(std::stod(rows[1][3]) == 0.25);
    CHECK(std::stod(rows[1][5]) < 1e-8);
}

TEST_CASE("verify suite prints a pass report for the valid axis weight") {
    const std::string dir = fresh_dir("verify");
    CHECK(run_cli("verify --suite ckn-corollary --alpha 0.5", dir) == 0);
    CHECK(slurp(dir + "/stdout.txt").find("verdict = pass") != std::string::npos);
    const auto rows = read_csv(dir + "/verify.csv");
    REQUIRE(rows.size() == 8);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] == "1");

    CHECK(run_cli("verify --suite ckn-corollary --alpha 1.0", dir) == 0);
    CHECK(slurp(dir + "/stdout.txt").find("verdict = fail") != std::string::npos);
    const auto fail_rows = read_csv(dir + "/verify.csv");
    CHECK(fail_rows[1][1] == "0");  // measure_ok is the one that breaks
    CHECK(fail_rows[2][1] == "1");
}

TEST_CASE("simulate with zero initial data emits an all-zero series") {
    const std::string dir = fresh_dir("simzero");
    const int rc = run_cli(
        "simulate --set sim.N=8 --set sim.T=0.006 --set sim.dt=2e-3 "
        "--set sim.rho_m=1.8 --set background.c3=0.1",
        dir);
    CHECK(rc == 0);
    const auto rows = read_csv(dir + "/series.csv");
    REQUIRE(rows.size() >= 3);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][1]) == 0.0);
        CHECK(std::stod(rows[i][2]) == 0.0);
        CHECK(std::stod(rows[i][4]) == 0.0);
    }
}

TEST_CASE("replaying a manifest reproduces the CSV byte for byte") {
    const std::string dir = fresh_dir("replay_src");
    const std::string dir2 = fresh_dir("replay_dst");
    const int rc = run_cli(
        "simulate --set sim.N=8 --set sim.T=0.006 --set sim.dt=2e-3 "
        "--set sim.rho_m=1.8 --set background.c3=0.1 "
        "--set init.kind=random --set init.target_l3=0.05",
        dir);
    REQUIRE(rc == 0);
    CHECK(run_cli("replay " + dir + "/simulate_manifest.json", dir2) == 0);
    CHECK(slurp(dir + "/series.csv") == slurp(dir2 + "/series.csv"));
    CHECK(!slurp(dir + "/series.csv").empty());
}

TEST_CASE("numerical failures exit with code 3") {
    const std::string dir = fresh_dir("numfail");
    const int rc = run_cli(
        "simulate --set sim.N=8 --set sim.T=0.2 --set sim.dt=0.1 "
        "--set sim.rho_m=1.8 --set init.kind=random --set init.target_l3=80",
        dir);
    CHECK(rc == 3);
    CHECK(slurp(dir + "/stderr.txt").find("numerical failure") !=
          std::string::npos);
    // the manifest was still written before the run aborted
    CHECK(fs::exists(dir + "/simulate_manifest.json"));
}

TEST_CASE("sweep fans out one run per value with separate outputs") {
    const std::string dir = fresh_dir("sweep");
    const int rc = run_cli(
        "sweep --param background.c3 --values 0.05,0.1 "
        "--set sim.N=8 --set sim.T=0.004 --set sim.dt=2e-3 --set sim.rho_m=1.8",
        dir);
    CHECK(rc == 0);
    CHECK(fs::exists(dir + "/sweep_manifest.json"));
    CHECK(fs::exists(dir + "/run_0/series.csv"));
    CHECK(fs::exists(dir + "/run_1/series.csv"));
    const auto m0 = slurp(dir + "/run_0/simulate_manifest.json");
    const auto m1 = slurp(dir + "/run_1/simulate_manifest.json");
    CHECK(m0.find("\"background.c3\": \"0.050000000000000003\"") !=
          std::string::npos);
    CHECK(m1.find("\"background.c3\": \"0.10000000000000001\"") !=
          std::string::npos);
}

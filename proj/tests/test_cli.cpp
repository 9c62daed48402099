#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "flurlab/csvio.hpp"

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FLURLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("simulate emits a well-formed CSV with the requested rows") {
    CHECK(run_cli("simulate --d 0.3 --lambda 0.025 --n 1024 --seed 7 --out /tmp/fl_path.csv") == 0);
    auto t = flurlab::read_csv("/tmp/fl_path.csv");
    REQUIRE(t.header.size() == 2);
    CHECK(t.header[0] == "index");
    CHECK(t.header[1] == "value");
    CHECK(t.rows.size() == 1024);
}

TEST_CASE("simulate then fit-kernel round-trips") {
    CHECK(run_cli("simulate --d 0.3 --lambda 0.025 --n 2048 --seed 3 --out /tmp/fl_rt.csv") == 0);
    CHECK(run_cli("fit-kernel --in /tmp/fl_rt.csv --x-count 9 --out /tmp/fl_fit.csv") == 0);
    auto t = flurlab::read_csv("/tmp/fl_fit.csv");
    CHECK(t.header == std::vector<std::string>{"x", "estimate", "center", "scale"});
    CHECK(t.rows.size() == 9);
}

TEST_CASE("seed fully determines the output bytes") {
    CHECK(run_cli("simulate --d 0.3 --lambda 0.025 --n 512 --seed 11 --out /tmp/fl_a.csv") == 0);
    CHECK(run_cli("simulate --d 0.3 --lambda 0.025 --n 512 --seed 11 --out /tmp/fl_b.csv") == 0);
    CHECK(slurp("/tmp/fl_a.csv") == slurp("/tmp/fl_b.csv"));
    CHECK(run_cli("simulate --d 0.3 --lambda 0.025 --n 512 --seed 12 --out /tmp/fl_c.csv") == 0);
    CHECK(slurp("/tmp/fl_a.csv") != slurp("/tmp/fl_c.csv"));
}

TEST_CASE("fit-knot recovers a clean knot from file input") {
    // build a noiseless piecewise response as CSV
    const long n = 512;
    std::vector<std::vector<double>> rows;
    for (long j = 1; j <= n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n);
        rows.push_back({static_cast<double>(j), 1.0 + 2.0 * s + 3.0 * std::max(s - 0.5, 0.0)});
    }
    flurlab::write_csv("/tmp/fl_knot.csv", {"index", "value"}, rows);
    CHECK(run_cli("fit-knot --in /tmp/fl_knot.csv --q 2 --p 3 --out /tmp/fl_knot.json") == 0);
    const std::string js = slurp("/tmp/fl_knot.json");
    const auto pos = js.find("\"eta_hat\":");
    REQUIRE(pos != std::string::npos);
    const double eta = std::stod(js.substr(pos + 10));
    CHECK(std::fabs(eta - 0.5) < 1e-3);
    CHECK(js.find("\"profile\":[") != std::string::npos);
}

TEST_CASE("validation failures exit 1 with a machine-parsable code") {
    CHECK(run_cli("experiment --config /tmp/definitely_missing.toml") == 1);
    CHECK(run_cli("simulate --d -1 --lambda 0.1 --n 64 --seed 1 --out /tmp/fl_bad.csv") == 1);
    CHECK(run_cli("acvf --d 0.6 --lambda 0 --max-lag 4 --out /tmp/fl_bad2.csv") == 1);
}

TEST_CASE("variance subcommand prints the module value as JSON") {
    const std::string cmd = std::string(FLURLAB_CLI_PATH) +
                            " variance --case moderate --d 0.3 --lambda-star 1"
                            " --kernel epanechnikov > /tmp/fl_var.json 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const std::string js = slurp("/tmp/fl_var.json");
    CHECK(js.find("\"sigma2\":0.4752744") != std::string::npos);
}

TEST_CASE("experiment config file drives a run and flags override") {
    std::ofstream f("/tmp/fl_exp.toml");
    f << "kind=InvariancePrinciple\nd=0.3\nschedule=power\nc=1\ngamma=1\n"
         "n=2048\nreplications=120\nseed=5\nvar-tol=0.3\n";
    f.close();
    CHECK(run_cli("experiment --config /tmp/fl_exp.toml --out-json /tmp/fl_exp.json "
                  "--out-csv /tmp/fl_exp.csv") == 0);
    const std::string js = slurp("/tmp/fl_exp.json");
    CHECK(js.find("\"master_seed\":5") != std::string::npos);
    const std::string csv = slurp("/tmp/fl_exp.csv");
    CHECK(csv.rfind("test,statistic,target,threshold,pass", 0) == 0);
    // unknown keys are rejected
    std::ofstream g("/tmp/fl_bad.toml");
    g << "kind=InvariancePrinciple\nnot_a_key=1\n";
    g.close();
    CHECK(run_cli("experiment --config /tmp/fl_bad.toml") == 1);
}

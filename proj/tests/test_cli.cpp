#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end checks against the built binary (path injected by CMake).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "evoctrl/csv.hpp"
#include "evoctrl/policy.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(EVOCTRL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("solve writes the expected policy for n=1") {
    TempDir dir("evoctrl_cli_solve1");
    REQUIRE(run("solve --n 1 --out " + dir.path.string()) == 0);
    const evoctrl::PolicySpec p = evoctrl::load_policy((dir.path / "policy.csv").string());
    REQUIRE(p.kind() == evoctrl::PolicySpec::Kind::Table);
    REQUIRE(p.entries().size() == 1);
    CHECK(p.entries()[0] == 1.0);
}

TEST_CASE("solve --n 50: policy at state 49 is 0.02 and methods agree") {
    TempDir bi_dir("evoctrl_cli_bi");
    TempDir vi_dir("evoctrl_cli_vi");
    REQUIRE(run("solve --n 50 --out " + bi_dir.path.string()) == 0);
    REQUIRE(run("solve --n 50 --method vi --tolerance 1e-11 --out " + vi_dir.path.string()) == 0);

    const evoctrl::PolicySpec p = evoctrl::load_policy((bi_dir.path / "policy.csv").string());
    CHECK(p.entries()[49] == doctest::Approx(0.02));

    std::ifstream bi(bi_dir.path / "value.csv"), vi(vi_dir.path / "value.csv");
    std::string bi_line, vi_line;
    std::getline(bi, bi_line);
    std::getline(vi, vi_line);
    while (std::getline(bi, bi_line) && std::getline(vi, vi_line)) {
        const double a = std::stod(evoctrl::split_csv_line(bi_line)[1]);
        const double b = std::stod(evoctrl::split_csv_line(vi_line)[1]);
        CHECK(std::abs(a - b) < 1e-8);
    }
}

TEST_CASE("learn is deterministic and finds the n=1 optimum") {
    TempDir a("evoctrl_cli_learn_a");
    TempDir b("evoctrl_cli_learn_b");
    const std::string flags =
        "learn --n 1 --grid-min 0.25 --grid-step 0.25 --episodes 200 --seed 7 --out ";
    REQUIRE(run(flags + a.path.string()) == 0);
    REQUIRE(run(flags + b.path.string()) == 0);

    const evoctrl::PolicySpec p = evoctrl::load_policy((a.path / "policy.csv").string());
    CHECK(p.entries()[0] == 1.0);
    CHECK(slurp(a.path / "qtable.csv") == slurp(b.path / "qtable.csv"));
}

TEST_CASE("evaluate with a terminal start reports mean 0") {
    TempDir dir("evoctrl_cli_eval");
    REQUIRE(run("evaluate --n 1 --policies constant --runs 10 --start 1 --out " +
                dir.path.string()) == 0);
    const std::string csv = slurp(dir.path / "benchmark.csv");
    CHECK(csv.find("constant,1,10,0,0,0") != std::string::npos);
}

TEST_CASE("evaluate is seed-deterministic") {
    TempDir a("evoctrl_cli_eval_a");
    TempDir b("evoctrl_cli_eval_b");
    const std::string flags =
        "evaluate --n 20 --policies constant,reciprocal --runs 100 --seed 7 --out ";
    REQUIRE(run(flags + a.path.string()) == 0);
    REQUIRE(run(flags + b.path.string()) == 0);
    CHECK(slurp(a.path / "benchmark.csv") == slurp(b.path / "benchmark.csv"));
}

TEST_CASE("EVOCTRL_SEED is the seed fallback") {
    TempDir a("evoctrl_cli_env_a");
    TempDir b("evoctrl_cli_env_b");
    const std::string cmd = "EVOCTRL_SEED=7 " + std::string(EVOCTRL_CLI_PATH) +
                            " evaluate --n 12 --policies reciprocal --runs 50 --out ";
    REQUIRE(WEXITSTATUS(std::system((cmd + a.path.string() + " > /dev/null").c_str())) == 0);
    REQUIRE(run("evaluate --n 12 --policies reciprocal --runs 50 --seed 7 --out " +
                b.path.string()) == 0);
    CHECK(slurp(a.path / "benchmark.csv") == slurp(b.path / "benchmark.csv"));
}

TEST_CASE("simulate dumps a trace") {
    TempDir dir("evoctrl_cli_sim");
    REQUIRE(run("simulate --n 10 --policy reciprocal --start 3 --seed 5 --out " +
                dir.path.string()) == 0);
    const std::string csv = slurp(dir.path / "trace.csv");
    CHECK(csv.rfind("t,s,theta,s_prime\n0,3,", 0) == 0);
}

TEST_CASE("export produces the three figure files") {
    TempDir dir("evoctrl_cli_export");
    REQUIRE(run("export --n 20 --runs 100 --out " + dir.path.string()) == 0);
    for (const char* name : {"figure_values.csv", "figure_policies.csv", "figure_marks.csv"})
        CHECK(fs::exists(dir.path / name));

    std::ifstream in(dir.path / "figure_policies.csv");
    std::string line;
    int rows = -1;  // header
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 20);
}

TEST_CASE("config file supplies defaults, flags override, unknown keys rejected") {
    TempDir dir("evoctrl_cli_cfg");
    {
        std::ofstream cfg(dir.path / "run.cfg");
        cfg << "n=1\nruns=10\nstart=1\npolicies=constant\n";
    }
    REQUIRE(run("evaluate --config " + (dir.path / "run.cfg").string() + " --out " +
                dir.path.string()) == 0);
    CHECK(slurp(dir.path / "benchmark.csv").find("constant,1,10,0,0,0") != std::string::npos);

    {
        std::ofstream cfg(dir.path / "bad.cfg");
        cfg << "n=1\nbogus_key=3\n";
    }
    CHECK(run("evaluate --config " + (dir.path / "bad.cfg").string()) != 0);
}

TEST_CASE("incomplete visitation exits with code 2") {
    TempDir dir("evoctrl_cli_learn2");
    // One episode cannot visit every state below its start.
    CHECK(run("learn --n 50 --episodes 1 --seed 3 --out " + dir.path.string()) == 2);
}

TEST_CASE("operational errors exit with code 1") {
    CHECK(run("evaluate --n 5 --policies /nonexistent/policy.csv --runs 5") == 1);
}

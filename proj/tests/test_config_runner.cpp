#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace staticprop;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("staticprop_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing") {
    SECTION("defaults fill in") {
        const RunConfig cfg = parse_config("model = M1\nT = 10\ns = 1.0\n");
        REQUIRE(cfg.model == "M1");
        REQUIRE(cfg.half_width == 10.0);
        REQUIRE(cfg.nodes_per_unit == 16);
        REQUIRE(cfg.epsilons.size() == 5);
    }
    SECTION("comments and blank lines") {
        const RunConfig cfg = parse_config("# experiment\n\nmodel = M2  # trailing\n");
        REQUIRE(cfg.model == "M2");
    }
    SECTION("weight exponent boundary") {
        REQUIRE_THROWS_AS(parse_config("s = 0.4\n"), validation_error);
        REQUIRE_NOTHROW(parse_config("s = 0.51\n"));
    }
    SECTION("epsilon sweeps") {
        const RunConfig cfg = parse_config("epsilons = 1e-1,1e-2,1e-3\n");
        REQUIRE(cfg.epsilons == std::vector<double>{1e-1, 1e-2, 1e-3});
        REQUIRE_THROWS_AS(parse_config("epsilons = 1e-3,1e-2\n"), validation_error);
    }
    SECTION("unknown keys are rejected with the line number") {
        try {
            parse_config("model = M1\nmodle = M2\n");
            FAIL("expected parse_error");
        } catch (const parse_error& e) {
            REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SECTION("missing assignment") {
        REQUIRE_THROWS_AS(parse_config("just words\n"), parse_error);
    }
    SECTION("bad numbers carry the line number") {
        REQUIRE_THROWS_AS(parse_config("T = ten\n"), parse_error);
    }
}

TEST_CASE("model from config with overrides") {
    RunConfig cfg = parse_config("model = M1\nY = 0\n");
    const SpatialModel m = model_from_config(cfg);
    REQUIRE(m.n == 8);
    REQUIRE(m.y.maxCoeff() == 0.0);
    RunConfig custom = parse_config(
        "model = custom\nn = 4\ndx = 0.5\nboundary = dirichlet\nbeta = 1\ngSigma = 1\n"
        "Y = 1,2,3,4\nV = 0\nA = 0\n");
    const SpatialModel mc = model_from_config(custom);
    REQUIRE(mc.n == 4);
    REQUIRE(mc.boundary == Boundary::Dirichlet);
    REQUIRE(mc.y(2) == 3.0);
}

TEST_CASE("float formatting round-trips") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double x = dist(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
        const std::string s = format_double(x);
        REQUIRE(std::stod(s) == x);
        REQUIRE(s.size() <= 24);
    }
    REQUIRE(format_complex(Complex(0.0, 0.1)) == "0+0.1i");
    REQUIRE(format_complex(Complex(1.5, -2.0)) == "1.5-2i");
}

TEST_CASE("runner exit codes") {
    TempDir tmp("exit");
    std::ostringstream log;
    SECTION("check passes on M1 and reports the unit lower bound") {
        RunConfig cfg = parse_config("model = M1\n");
        cfg.out_dir = (tmp.path / "a").string();
        REQUIRE(run("check", cfg, log) == 0);
        const std::string csv = slurp(fs::path(cfg.out_dir) / "check.csv");
        const auto pos = csv.find("h_positive,1,");
        REQUIRE(pos != std::string::npos);
        const double witness = std::stod(csv.substr(pos + 13));
        REQUIRE(witness == Catch::Approx(1.0).margin(1e-10));
        REQUIRE(log.str().find("[PASS]") != std::string::npos);
    }
    SECTION("check fails on the degenerate Y = 0 model") {
        RunConfig cfg = parse_config("model = M1\nY = 0\n");
        cfg.out_dir = (tmp.path / "b").string();
        REQUIRE(run("check", cfg, log) == 1);
        REQUIRE(log.str().find("[FAIL]") != std::string::npos);
    }
    SECTION("identities pass on M0") {
        RunConfig cfg = parse_config("model = M0\nT = 6\n");
        cfg.out_dir = (tmp.path / "c").string();
        REQUIRE(run("identities", cfg, log) == 0);
        const std::string csv = slurp(fs::path(cfg.out_dir) / "identities.csv");
        REQUIRE(csv.find("E: pos - neg = pj") != std::string::npos);
    }
    SECTION("configuration errors exit 2") {
        REQUIRE(run("check", std::string("s = 0.4\n"), log) == 2);
        REQUIRE(run("nonsense", parse_config("model = M0\n"), log) == 2);
    }
}

TEST_CASE("deterministic artifacts") {
    TempDir tmp("det");
    std::ostringstream log;
    auto run_into = [&](const std::string& sub, const char* threads) {
        setenv("STATICPROP_THREADS", threads, 1);
        RunConfig cfg = parse_config("model = M1\nT = 4\n");
        cfg.out_dir = (tmp.path / sub).string();
        REQUIRE(run("kernels", cfg, log) == 0);
        REQUIRE(run("wick", cfg, log) == 0);
        unsetenv("STATICPROP_THREADS");
        return cfg.out_dir;
    };
    const auto a = run_into("one", "1");
    const auto b = run_into("two", "4");
    for (const char* file : {"kernel_feyn.csv", "kernel_pj.csv", "wick.csv"}) {
        INFO(file);
        REQUIRE(slurp(fs::path(a) / file) == slurp(fs::path(b) / file));
    }
}

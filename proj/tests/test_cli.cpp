#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ncmap/commands.hpp"
#include "ncmap/config.hpp"

namespace fs = std::filesystem;
using namespace ncmap;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result ncmap_cli(const std::string& args) {
    std::string cmd = std::string(NCMAP_BIN) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("ncmap_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("every shipped preset parses without overrides") {
    auto ids = preset_ids();
    CHECK(ids.size() == 7);
    for (const auto& id : ids) {
        INFO(id);
        RunConfig cfg = preset_config(id);
        CHECK_NOTHROW(validate(cfg));
        fs::path file = fs::path(NCMAP_PRESETS) / ("sim" + id + ".cfg");
        CHECK(fs::exists(file));
        CHECK(slurp(file) == preset_text(id));
    }
}

TEST_CASE("config round trip") {
    for (const auto& id : preset_ids()) {
        RunConfig cfg = preset_config(id);
        apply_override(cfg, "noise.sigma=0.125");
        apply_override(cfg, "stop.j_threshold", "1e-3");
        std::string text = serialize_config(cfg);
        CHECK(serialize_config(parse_config_text(text)) == text);
    }
    RunConfig cfg = parse_config_text("# comment\nn=3\nrun.x0=1,2,3\ntarget.family=H7\ntarget.a=2\n");
    CHECK(cfg.n == 3);
    CHECK(cfg.x0.size() == 3);
    CHECK(cfg.target_family == TargetFamily::H7);
    CHECK_THROWS_AS(parse_config_text("bogus.key=1\n"), Error);
    CHECK_THROWS_AS(parse_config_text("n=two\n"), Error);
}

TEST_CASE("compatibility gate runs before construction") {
    RunConfig cfg = preset_config("1");
    apply_override(cfg, "map.alpha1=1");
    apply_override(cfg, "map.alpha2=0");
    try {
        validate(cfg);
        FAIL("expected IncompatibleParams");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IncompatibleParams);
        CHECK(exit_code_for(e.kind()) == 2);
    }
}

TEST_CASE("construct subcommand") {
    auto dir = scratch("construct");
    auto r = ncmap_cli("construct --preset 2 --out " + dir.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("m=4\n") != std::string::npos);
    CHECK(fs::exists(dir / "W.txt"));
    CHECK(slurp(dir / "W.txt").rfind("# ncmap W n=2 m=4 ", 0) == 0);

    r = ncmap_cli("construct --preset 1 map.alpha1=1 map.alpha2=0 --out " + dir.string());
    CHECK(r.code == 2);
    r = ncmap_cli("construct --preset 1 construct.m_cap=6 --out " + dir.string());
    CHECK(r.code == 3);
    r = ncmap_cli("construct --preset 9");
    CHECK(r.code == 2);
    r = ncmap_cli("frobnicate");
    CHECK(r.code == 2);
    fs::remove_all(dir);
}

TEST_CASE("config file and seed options") {
    auto dir = scratch("config");
    std::ofstream(dir / "c.cfg") << preset_text("2") << "stop.max_iters=25\nnoise.sigma=0.01\n";
    auto a = ncmap_cli("run --config " + (dir / "c.cfg").string() + " --seed 3 --out " + (dir / "a").string());
    auto b = ncmap_cli("run --config " + (dir / "c.cfg").string() + " --seed 3 --out " + (dir / "b").string());
    auto c = ncmap_cli("run --config " + (dir / "c.cfg").string() + " --seed 4 --out " + (dir / "c").string());
    CHECK(a.code == 0);
    CHECK(a.out.find("iterations=25") != std::string::npos);
    CHECK(slurp(dir / "a" / "run.csv") == slurp(dir / "b" / "run.csv"));
    CHECK(slurp(dir / "a" / "run.csv") != slurp(dir / "c" / "run.csv"));
    CHECK(count_lines(slurp(dir / "a" / "run.csv")) == 27);
    CHECK(ncmap_cli("run --config " + (dir / "missing.cfg").string()).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("simulate writes plot data") {
    auto dir = scratch("simulate");
    auto r = ncmap_cli("simulate --preset 1 stop.max_iters=0 --out " + dir.string());
    CHECK(r.code == 0);
    std::string traj = slurp(dir / "trajectory.csv");
    CHECK(traj.rfind("k,x_1,x_2,J,h,evals_cum\n", 0) == 0);
    CHECK(count_lines(traj) == 2);
    CHECK(fs::exists(dir / "W.txt"));
    CHECK(fs::exists(dir / "polygon.csv"));
    CHECK(fs::exists(dir / "areas.csv"));

    auto d2 = scratch("simulate2");
    ncmap_cli("simulate --preset 1 stop.max_iters=50 --out " + dir.string());
    ncmap_cli("simulate --preset 1 stop.max_iters=50 --out " + d2.string());
    for (const char* f : {"trajectory.csv", "polygon.csv", "areas.csv", "W.txt"}) {
        CHECK(slurp(dir / f) == slurp(d2 / f));
    }

    // single-point preset has no area plot
    auto d3 = scratch("simulate3");
    CHECK(ncmap_cli("simulate --preset 3 stop.max_iters=5 --out " + d3.string()).code == 0);
    CHECK_FALSE(fs::exists(d3 / "areas.csv"));
    CHECK(ncmap_cli("simulate").code == 2);
    for (const auto& d : {dir, d2, d3}) fs::remove_all(d);
}

TEST_CASE("sim2 trajectory ends near the minimizer") {
    auto dir = scratch("sim2");
    auto r = ncmap_cli("simulate --preset 2 --out " + dir.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("m=4\n") != std::string::npos);
    std::istringstream is(slurp(dir / "trajectory.csv"));
    std::string line, last;
    while (std::getline(is, line)) last = line;
    double x1 = 0, x2 = 0;
    long k = 0;
    REQUIRE(std::sscanf(last.c_str(), "%ld,%lf,%lf", &k, &x1, &x2) == 3);
    CHECK(std::hypot(x1 - 1.0, x2 - 2.0) <= 0.25);
    fs::remove_all(dir);
}

TEST_CASE("verify subcommand") {
    auto r = ncmap_cli("verify interlacing --m-max 200");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("CHECK interlacing PASS", 0) == 0);

    r = ncmap_cli("verify catalog");
    CHECK(r.code == 0);
    CHECK(r.out.find("CHECK catalog PASS") != std::string::npos);

    r = ncmap_cli("verify shoelace --preset 1");
    CHECK(r.code == 0);
    r = ncmap_cli("verify shoelace --preset 3");
    CHECK(r.code == 2);

    r = ncmap_cli("verify brockett --preset 3");
    CHECK(r.code == 0);

    r = ncmap_cli("verify order --preset 1 run.x0=1,2");
    CHECK(r.code == 0);
    CHECK(r.out.find("gradient_order_negative_control PASS") != std::string::npos);

    CHECK(ncmap_cli("verify nonsense").code == 2);
}

#include "common.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

using namespace obt;
namespace fs = std::filesystem;

namespace {
struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(OB_CLI) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    std::array<char, 4096> buf;
    while (size_t k = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), k);
    int st = pclose(p);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("ob_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}
} // namespace

TEST_CASE("config parsing") {
    auto tc = parse_config_string(R"(
format_version = 1
name = "pair"
[[scatterer]]
kind = "circle"
center = [0, 0]
radius = "1"
[[scatterer]]
kind = "ellipse"
center = ["6", "0"]
semi_axes = [1.5, 1]
angle = 0.1
[run]
precision = 320
n_min = 5
n_max = 12
)");
    CHECK(tc.run.name == "pair");
    CHECK(tc.specs.size() == 2);
    CHECK(tc.specs[1].kind == CurveKind::ellipse);
    CHECK(tc.run.precision == 320);
    CHECK(tc.run.n_min == 5);
    CHECK(tc.run.order == 4);
    CHECK_THROWS_AS(parse_config_string("format_version = 1\n[[scatterer]]\nkind = \"blob\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("format_version = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("[[scatterer]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_string("format_version = 1\n[[scatterer]]\nkind = \"circle\"\ncenter = [0, 0]\nradius = 1\n"
                                        "[run]\nn_min = 9\nn_max = 4\n"),
                    ConfigError);
    for (auto name : {"equilateral", "collinear", "asymmetric", "fourier_symmetric", "near_degenerate"})
        CHECK_NOTHROW(load_config(config_path(std::string(name) + ".toml")));
}

TEST_CASE("validate exit codes") {
    CHECK(run("validate " + config_path("equilateral.toml")).code == 0);
    auto r = run("validate " + config_path("collinear.toml"));
    CHECK(r.code == 1);
    CHECK(r.out.find("eclipse") != std::string::npos);
    auto d = scratch("bad");
    std::ofstream(d / "bad.toml") << "format_version = 1\n[[scatterer]]\nkind = \"circle\"\nradius = \"x\"\n";
    CHECK(run("validate " + (d / "bad.toml").string()).code == 2);
    CHECK(run("validate " + (d / "missing.toml").string()).code == 2);
}

TEST_CASE("spectrum from a word list is deterministic") {
    auto d = scratch("spec");
    std::ofstream(d / "words.txt") << "12\n123\n11\n21\n1213\n";
    std::string base = "spectrum " + config_path("equilateral.toml") + " --precision 192 --words " + (d / "words.txt").string();
    auto a = run(base + " --threads 3 --out " + (d / "a.jsonl").string());
    auto b = run(base + " --threads 1 --out " + (d / "b.jsonl").string());
    CHECK(a.code == 1); // "11" is rejected, the rest is written
    CHECK(a.out.find("11") != std::string::npos);
    std::regex stamp("\"generated_at\":\"[^\"]*\"");
    auto A = std::regex_replace(slurp(d / "a.jsonl"), stamp, "");
    auto B = std::regex_replace(slurp(d / "b.jsonl"), stamp, "");
    CHECK(!A.empty());
    CHECK(A == B);
    auto st = read_spectrum((d / "a.jsonl").string());
    CHECK(st.entries.size() == 3);
    CHECK(st.find("11") == nullptr);
}

TEST_CASE("verify on the equilateral table") {
    auto d = scratch("verify");
    auto r = run("verify " + config_path("equilateral.toml") + " --out " + d.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(fs::exists(d / "verify.json"));
    CHECK(fs::exists(d / "spectrum.mls.jsonl"));
}

TEST_CASE("degenerate table is reported, not inverted") {
    auto d = scratch("degenerate");
    auto s = run("spectrum " + config_path("near_degenerate.toml") + " --precision 384 --n-max 20 --out " +
                 (d / "s.jsonl").string());
    REQUIRE(s.code == 0);
    auto e = run("extract " + (d / "s.jsonl").string() + " --out " + (d / "x.json").string());
    CHECK(e.code == 1);
    CHECK(e.out.find("condition (*)") != std::string::npos);
}

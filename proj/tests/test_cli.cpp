#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "akim/cli.hpp"

using namespace akim;
using namespace akim::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("akim-cli-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("angle syntax") {
    CHECK(parse_angle("0.7") == 0.7);
    CHECK(parse_angle("0.5pi") == kPi / 2);
    CHECK(parse_angle("pi/2") == kPi / 2);
    CHECK(parse_angle("3pi/2") == 3 * kPi / 2);
    CHECK(parse_angle("-pi") == -kPi);
    CHECK(parse_angle(" pi ") == kPi);
    CHECK_THROWS_AS(parse_angle("pie"), ArgumentError);
    CHECK_THROWS_AS(parse_angle("pi/0"), ArgumentError);
    CHECK_THROWS_AS(parse_angle("nan"), ArgumentError);
    CHECK_THROWS_AS(parse_angle(""), ArgumentError);
}

TEST_CASE("state descriptors") {
    const auto [a, b] = parse_dimer("zero");
    CHECK(a == Vector2(1, 0));
    CHECK(b == Vector2(1, 0));
    const auto [p, q] = parse_dimer("product:+,y-");
    CHECK(std::abs(p(1) - 1 / std::sqrt(2.0)) < 1e-16);
    CHECK(std::abs(q(1) - cplx(0, -1 / std::sqrt(2.0))) < 1e-16);
    const auto [c, d] = parse_dimer("case-a:theta=0.5pi,branch=1");
    CHECK(std::abs(std::abs(d(1)) - 1.0) < 1e-15);
    (void)c;

    CHECK(parse_state("zero", 4).amplitudes(0) == cplx(1, 0));
    CHECK(parse_state("product:1,0,0,1", 4).amplitudes(9) == cplx(1, 0));
    const PureState amp = parse_state("amplitudes:1,0,0,0,0,0,1,0", 2);
    CHECK(std::abs(amp.amplitudes(3) - 1 / std::sqrt(2.0)) < 1e-15);

    CHECK(is_dimer_descriptor("bloch:0,0,1,1"));
    CHECK_FALSE(is_dimer_descriptor("product:0,0,0,0"));
    CHECK_THROWS_AS(parse_state("zero", 3), ArgumentError);
    CHECK_THROWS_AS(parse_dimer("case-a:theta=1,colour=2"), ArgumentError);
    CHECK_THROWS_AS(parse_dimer("ghz"), ArgumentError);
    CHECK_THROWS_AS(parse_state("amplitudes:1,0", 2), ArgumentError);
}

TEST_CASE("CSV fields and numbers") {
    CHECK(csv_field("abc") == "abc");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(std::stod(format_number(kPi)) == kPi);
}

TEST_CASE("config round trip") {
    RunConfig c{"quench", {{"na", "4"}, {"g0", "0.5pi"}, {"state", "case-a:theta=0.2,branch=2"}}};
    const RunConfig back = config_from_json_text(to_json_text(c));
    CHECK(back.subcommand == c.subcommand);
    CHECK(back.values == c.values);
    const RunConfig num = config_from_json_text(R"({"subcommand":"gate","g0":0.25,"heatmap":true})");
    CHECK(num.values.at("g0") == "0.25");
    CHECK(num.values.at("heatmap") == "true");
    CHECK_THROWS_AS(config_from_json_text("[1,2]"), ArgumentError);
    CHECK_THROWS_AS(config_from_json_text("{"), ArgumentError);
}

TEST_CASE("exit codes") {
    const fs::path out = scratch("exit");
    CHECK(dispatch({"gate", "--out", out.string()}) == kOk);
    CHECK(dispatch({"gate", "--bogus", "1"}) == kArgumentError);
    CHECK(dispatch({"frobnicate"}) == kArgumentError);
    CHECK(dispatch({"gate", "--g0", "x", "--out", out.string()}) == kArgumentError);
    // a failing requirement is a check failure, with the residual in the manifest
    CHECK(dispatch({"check-duality", "--g0", "1.1", "--g1", "2.3", "--bath", "product:+,y+", "--require", "sic",
                    "--out", out.string()}) == kCheckFailed);
    const auto m = read_json(out / "manifest.json");
    CHECK(m["status"] == "fail");
    CHECK(m["checks"][1]["name"] == "sic");
    CHECK(m["checks"][1]["residual"].get<double>() > 1e-3);
}

TEST_CASE("unwritable output directory") {
    const fs::path blocker = scratch("blocker");
    std::ofstream(blocker) << "x";
    CHECK(dispatch({"gate", "--out", (blocker / "sub").string()}) == kCheckFailed);
    fs::remove(blocker);
}

TEST_CASE("trajectory output") {
    const fs::path out = scratch("traj");
    REQUIRE(dispatch({"trajectory", "--na", "8", "--g0", "0", "--g1", "0.7", "--state", "case-a:theta=0", "--tmax",
                      "12", "--out", out.string()}) == kOk);
    std::istringstream csv(slurp(out / "trajectory.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,S,expected,deviation,flat,renyi_spread\r");
    const double expected[] = {0, 2, 4, 6, 8, 8, 8, 8, 8, 8, 8, 8, 8};
    int t = 0;
    while (std::getline(csv, line)) {
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        CHECK(std::abs(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) - expected[t]) < 1e-8);
        ++t;
    }
    CHECK(t == 13);
    const auto m = read_json(out / "manifest.json");
    CHECK(m["tolerances"]["tol"] == 1e-7);
    CHECK(m["config"]["state"] == "case-a:theta=0");
    CHECK(fs::exists(out / "timing.json"));
}

TEST_CASE("channel spectrum output is sorted") {
    const fs::path out = scratch("spec");
    REQUIRE(dispatch({"channel-spectrum", "--na", "4", "--g0", "5pi/16", "--g1", "7pi/16", "--out", out.string()}) ==
            kOk);
    const auto j = read_json(out / "channel-spectrum.json");
    const auto& ev = j["eigenvalues"];
    REQUIRE(ev.size() == 256);
    for (std::size_t i = 1; i < ev.size(); ++i) {
        const double a = std::hypot(ev[i - 1][0].get<double>(), ev[i - 1][1].get<double>());
        const double b = std::hypot(ev[i][0].get<double>(), ev[i][1].get<double>());
        CHECK(a >= b - 1e-12);
    }
    CHECK(j["solvable_case"] == "none");
}

TEST_CASE("explicit case must match the phases") {
    CHECK(dispatch({"channel-spectrum", "--case", "b", "--g0", "0", "--g1", "1", "--out",
                    scratch("case").string()}) == kArgumentError);
}

TEST_CASE("identical runs give identical bytes, and manifests replay") {
    const fs::path a = scratch("det-a"), b = scratch("det-b"), c = scratch("det-c");
    const std::vector<std::string> args{"sff", "--l", "6", "--ensemble", "g0-zero", "--samples", "40", "--seed", "7",
                                        "--tmax", "60"};
    auto with_out = [&](const fs::path& p) {
        auto v = args;
        v.push_back("--out");
        v.push_back(p.string());
        return v;
    };
    REQUIRE(dispatch(with_out(a)) == kOk);
    REQUIRE(dispatch(with_out(b)) == kOk);
    REQUIRE(dispatch({"--config", (a / "manifest.json").string(), "--out", c.string()}) == kOk);
    for (const char* f : {"sff.csv", "sff.json", "manifest.json"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f) == slurp(c / f));
    }
}

TEST_CASE("flags override config values") {
    const fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << R"({"subcommand":"gate","g0":"0.5pi","g1":"0.5pi"})";
    REQUIRE(dispatch({"--config", (dir / "c.json").string(), "--g1", "0.3", "--out", dir.string()}) == kOk);
    const auto m = read_json(dir / "manifest.json");
    CHECK(m["config"]["g0"] == "0.5pi");
    CHECK(m["config"]["g1"] == "0.3");
}

TEST_CASE("output directory from the environment") {
    const fs::path dir = scratch("env");
    setenv("AKIM_OUT_DIR", dir.string().c_str(), 1);
    CHECK(dispatch({"gate"}) == kOk);
    unsetenv("AKIM_OUT_DIR");
    CHECK(fs::exists(dir / "gate.json"));
}

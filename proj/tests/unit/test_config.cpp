#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "irrev/config.hpp"
#include "irrev/error.hpp"

using namespace irrev;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

json base() {
    return json::parse(R"({
        "problem": {"grid": {"a": 0, "b": 1, "n": 11}, "lambda": 1.0,
                    "f": {"preset": "constant", "value": 0}, "z0": {"preset": "zero"}}
    })");
}

}  // namespace

TEST_CASE("defaults fill every block") {
    const RunConfig c = parse_config(base());
    CHECK(c.m == 100);
    CHECK(c.output.stride == 1);
    CHECK(c.diagnostics.minimality_samples == 1000);
    CHECK_FALSE(c.refine.has_value());
    const ProblemData d = c.problem();
    CHECK(d.grid.n() == 11);
    CHECK(d.lambda == 1.0);
    CHECK(d.z0 == Field(11, 0.0));
}

TEST_CASE("unknown keys name their full path") {
    json j = base();
    j["problem"]["grid"]["spacing"] = 0.1;
    CHECK(config_error(j) == "problem.grid.spacing: unknown key");

    j = base();
    j["outptu"] = json::object();
    CHECK(config_error(j).find("outptu: unknown key") != std::string::npos);

    j = base();
    j["problem"]["f"]["slope"] = 1.0;
    CHECK(config_error(j).find("problem.f.slope") != std::string::npos);
}

TEST_CASE("bad values are rejected with the key path") {
    json j = base();
    j["problem"]["lambda"] = "one";
    CHECK(config_error(j).find("problem.lambda: expected a number") != std::string::npos);

    j = base();
    j["problem"]["grid"]["n"] = 0;
    CHECK(config_error(j).find("problem.grid.n") != std::string::npos);

    j = base();
    j["solver"] = {{"method", "newton"}};
    CHECK(config_error(j).find("solver.method") != std::string::npos);

    j = base();
    j["problem"]["f"] = {{"preset", "wave"}};
    CHECK(config_error(j).find("unknown profile preset") != std::string::npos);

    j = base();
    j["problem"]["f"] = {{"preset", "expression"}, {"expr", "x +* 2"}};
    CHECK(config_error(j).find("problem.f.expr") != std::string::npos);
}

TEST_CASE("profile presets") {
    SUBCASE("bare number and bare string") {
        const TimeProfile c = parse_profile(json(2.5), "f");
        CHECK(c(0.3, 7.0) == 2.5);
        const TimeProfile e = parse_profile(json("x*t"), "f");
        CHECK(e(0.5, 4.0) == doctest::Approx(2.0));
    }
    SUBCASE("linear_t") {
        const TimeProfile p = parse_profile(json::parse(R"({"preset": "linear_t", "base": "x", "slope": 2})"), "f");
        CHECK(p(0.25, 0.5) == doctest::Approx(1.25));
        CHECK(p.dt(0.25, 0.5) == doctest::Approx(2.0));
    }
    SUBCASE("relaxation") {
        const TimeProfile p =
            parse_profile(json::parse(R"({"preset": "relaxation", "limit": -1, "amplitude": 2, "rate": 0.5})"), "f");
        CHECK(p(0.1, 2.0) == doctest::Approx(-1.0 + 2.0 * std::exp(-1.0)));
        CHECK(p.dt(0.1, 2.0) == doctest::Approx(-std::exp(-1.0)));
    }
    SUBCASE("tabulated interpolates bilinearly") {
        const TimeProfile p = parse_profile(json::parse(R"({"preset": "tabulated", "x": [0, 1], "t": [0, 1],
                                                            "values": [[0, 1], [2, 3]]})"),
                                            "f");
        CHECK(p(0.5, 0.5) == doctest::Approx(1.5));
        CHECK(p(1.0, 0.0) == doctest::Approx(1.0));
    }
    SUBCASE("ramp and sinusoidal") {
        const TimeProfile r = parse_profile(json::parse(R"({"preset": "ramp", "rate": 0.3})"), "load");
        CHECK(r(0.5, 2.0) == doctest::Approx(0.3));
        const TimeProfile s = parse_profile(json::parse(R"({"preset": "sinusoidal", "rate": 1, "frequency": 2})"), "load");
        CHECK(s(0.25, 1.0) == doctest::Approx(std::sin(0.5 * M_PI)));
    }
    SUBCASE("expression with explicit derivative") {
        const TimeProfile p =
            parse_profile(json::parse(R"J({"preset": "expression", "expr": "sin(t)", "dt": "cos(t)"})J"), "f");
        CHECK(p.has_analytic_dt());
        CHECK(p.dt(0.0, 0.3) == doctest::Approx(std::cos(0.3)));
    }
}

TEST_CASE("nonlinearity presets") {
    const Nonlinearity s = parse_nonlinearity(json::parse(R"({"preset": "sine", "amplitude": 0.5})"), "gamma");
    CHECK(s.gamma(1.0) == doctest::Approx(0.5 * std::sin(1.0)));
    CHECK(s.L == doctest::Approx(0.5));

    const Nonlinearity e = parse_nonlinearity(json::parse(R"({"preset": "expression", "expr": "-s"})"), "gamma");
    CHECK_FALSE(e.certified);
    CHECK(e.L == doctest::Approx(1.0).epsilon(1e-4));

    const Nonlinearity at = parse_nonlinearity(json::parse(R"({"preset": "at", "eps": 0.2, "delta_eps": 0.05})"), "gamma");
    CHECK(at.L == doctest::Approx(500.0).epsilon(1e-9));
}

TEST_CASE("z0 presets") {
    json j = base();
    j["problem"]["z0"] = {{"preset", "expression"}, {"expr", "x"}};
    ProblemData d = parse_config(j).problem();
    CHECK(d.z0[0] == doctest::Approx(d.grid.node(0)));

    j["problem"]["z0"] = {{"preset", "values"}, {"values", {0.0, 1.0}}};
    CHECK_NOTHROW(d = parse_config(j).problem());
    CHECK(d.z0.size() == 11);

    j["problem"]["z0"] = {{"preset", "equilibrium"}};
    j["problem"]["f"] = -2.0;
    d = parse_config(j).problem();
    CHECK(d.z0[5] < 0.0);
}

TEST_CASE("syntax errors report line and column") {
    const auto path = std::filesystem::temp_directory_path() / "irrev_syntax_test.json";
    {
        std::ofstream out(path);
        out << "{\n  \"problem\": {\n    \"lambda\": 1,\n  }\n}\n";
    }
    std::string msg;
    try {
        load_config(path);
    } catch (const ConfigError& e) {
        msg = e.what();
    }
    std::filesystem::remove(path);
    CHECK(msg.find(":4:") != std::string::npos);
    CHECK(msg.find("syntax") != std::string::npos);
}

TEST_CASE("missing file is a config error") {
    CHECK_THROWS_AS(load_config("/nonexistent/irrev.json"), ConfigError);
}

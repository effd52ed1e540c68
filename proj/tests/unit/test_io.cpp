#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "irrev/io.hpp"
#include "support/instances.hpp"

using namespace irrev;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "irrev_io_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("trajectory csv round trip") {
    const ProblemData data = testing::smooth_instance(21, testing::smooth_nonlinearity());
    const Trajectory traj = run_evolution(data, testing::smooth_nonlinearity(), 12);
    const auto path = scratch("traj.csv");
    write_trajectory_csv(path, traj);
    const Trajectory back = read_trajectory_csv(path, traj.grid);
    REQUIRE(back.times.size() == traj.times.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        CHECK(back.times[k] == traj.times[k]);
        for (std::size_t i = 0; i < traj.grid.n(); ++i) {
            const double a = traj.z[k][i], b = back.z[k][i];
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
            const double ea = traj.eta[k][i], eb = back.eta[k][i];
            worst = std::max(worst, std::abs(ea - eb) / std::max(1.0, std::abs(ea)));
        }
    }
    CHECK(worst <= 1e-15);
}

TEST_CASE("stride keeps the last stamp") {
    const ProblemData data = testing::smooth_instance(11, testing::smooth_nonlinearity());
    const Trajectory traj = run_evolution(data, testing::smooth_nonlinearity(), 10);
    const auto path = scratch("strided.csv");
    write_trajectory_csv(path, traj, 4);
    const Trajectory back = read_trajectory_csv(path, traj.grid);
    REQUIRE(back.times.size() == 4);
    CHECK(back.times[1] == traj.times[4]);
    CHECK(back.times.back() == traj.times.back());
    CHECK(slurp(path).rfind("t,x,z,eta", 0) == 0);
}

TEST_CASE("reading onto the wrong grid fails") {
    const ProblemData data = testing::smooth_instance(11, testing::smooth_nonlinearity());
    const Trajectory traj = run_evolution(data, testing::smooth_nonlinearity(), 3);
    const auto path = scratch("mismatch.csv");
    write_trajectory_csv(path, traj);
    CHECK_THROWS_AS(read_trajectory_csv(path, Grid(0.0, 1.0, 12)), Error);
}

TEST_CASE("verdict json carries all fields") {
    CheckVerdict v;
    v.name = "irreversibility";
    v.record(2e-13, 3, 4);
    v.tolerance = 1e-12;
    v.close();
    const nlohmann::json j = to_json(v);
    CHECK(j["name"] == "irreversibility");
    CHECK(j["pass"] == true);
    CHECK(j["worst_step"] == 3);
    CHECK(j["worst_node"] == 4);
    CHECK(j["max_violation"].get<double>() == 2e-13);
}

TEST_CASE("manifest describes grid and stride") {
    const ProblemData data = testing::smooth_instance(11, testing::smooth_nonlinearity());
    const Trajectory traj = run_evolution(data, testing::smooth_nonlinearity(), 5);
    const nlohmann::json j = trajectory_manifest(traj, 2);
    CHECK(j["grid"]["n"] == 11);
    CHECK(j["stride"] == 2);
    CHECK(j["m"] == 5);
}

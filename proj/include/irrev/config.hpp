#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "irrev/diagnostics.hpp"
#include "irrev/evolution.hpp"
#include "irrev/fracture.hpp"
#include "irrev/model.hpp"
#include "irrev/stationary.hpp"

namespace irrev {

struct OutputConfig {
    std::filesystem::path directory = "out";
    std::size_t stride = 1;
    bool csv = true;
    bool json = true;
};

struct DiagnosticsConfig {
    std::uint64_t seed = 1;
    std::size_t minimality_samples = 1000;
    std::size_t minimality_stamps = 5;
    double minimality_tol = 1e-10;
    double ls_tol = 1e-8;
    double irreversibility_tol = 1e-12;
    double no_evolution_tol = 1e-10;
};

struct RefineConfig {
    std::vector<std::size_t> m_list{50, 100, 200, 400};
    std::vector<std::size_t> n_list{51, 101, 201};
};

struct LongTimeConfig {
    double horizon = 40.0;
    std::size_t m_per_unit = 16;
    double final_tol = 1e-6;
    TimeProfile f_inf;
};

struct FractureConfig {
    ATParams params;
    std::size_t n = 101;
    double T = 1.0;
    std::size_t m = 50;
    double L_range = 10.0;
    /// Empty means the load-free equilibrium.
    std::optional<nlohmann::json> z0;
};

struct StationaryConfig {
    TimeProfile f_inf;
    std::optional<TimeProfile> sigma;
};

/// A fully parsed configuration. Every key is checked; unknown keys and
/// out-of-range values raise ConfigError naming the key path.
struct RunConfig {
    nlohmann::json raw;
    std::optional<nlohmann::json> problem_block;
    std::optional<Nonlinearity> nl;
    std::size_t m = 100;
    EvolutionOptions evolution;
    OutputConfig output;
    DiagnosticsConfig diagnostics;
    std::optional<RefineConfig> refine;
    std::optional<LongTimeConfig> longtime;
    std::optional<FractureConfig> fracture;
    std::optional<StationaryConfig> stationary;

    /// The problem block realized on its own grid.
    ProblemData problem() const;
    /// The problem block realized with n interior nodes.
    ProblemData problem(std::size_t n) const;
    ProblemFactory factory() const;
    /// Initial field of the fracture block on the given grid.
    Field fracture_z0(const Grid& grid) const;
};

RunConfig parse_config(const nlohmann::json& j);
/// Reads and parses a JSON file; syntax errors report line and column.
RunConfig load_config(const std::filesystem::path& path);

/// Profile from a preset block (constant, linear_t, relaxation, tabulated, expression, ramp, sinusoidal).
TimeProfile parse_profile(const nlohmann::json& j, const std::string& where);
Nonlinearity parse_nonlinearity(const nlohmann::json& j, const std::string& where);

}  // namespace irrev

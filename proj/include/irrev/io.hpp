#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "irrev/diagnostics.hpp"
#include "irrev/evolution.hpp"
#include "irrev/fracture.hpp"

namespace irrev {

/// Shortest text that round-trips a double ("%.17g"); "nan"/"inf" for non-finite values.
std::string format_double(double v);

/// Long format t,x,z,eta for every stride-th stamp; the last stamp is always written.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, std::size_t stride = 1);

/// Reads a file written by write_trajectory_csv back onto `grid`. Energies and
/// step metadata are not part of the CSV and are left empty.
Trajectory read_trajectory_csv(const std::filesystem::path& path, const Grid& grid);

nlohmann::json grid_to_json(const Grid& grid);
nlohmann::json trajectory_manifest(const Trajectory& traj, std::size_t stride = 1);
nlohmann::json to_json(const CheckVerdict& v);
nlohmann::json to_json(const EnergyReport& r);
nlohmann::json to_json(const ValidationReport& r);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Columns study,m,n,gap_V,balance_sum,order_estimate,increment_trend.
void write_refinement_csv(const std::filesystem::path& path, const RefinementTable& table);

/// Columns t,gap_V.
void write_gap_csv(const std::filesystem::path& path, const std::vector<double>& times,
                   const std::vector<double>& gap);

/// Columns x,z for a single field.
void write_field_csv(const std::filesystem::path& path, const Grid& grid, const Field& z);

/// Columns t,x,u,u_x for every stride-th state.
void write_displacement_csv(const std::filesystem::path& path, const std::vector<CoupledState>& states,
                            std::size_t stride = 1);

/// Columns t,energy.
void write_series_csv(const std::filesystem::path& path, const std::vector<double>& times,
                      const std::vector<double>& values, const std::string& column);

}  // namespace irrev

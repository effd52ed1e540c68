#include "irrev/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace irrev {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

std::vector<std::size_t> strided(std::size_t count, std::size_t stride) {
    if (stride == 0) stride = 1;
    std::vector<std::size_t> ks;
    for (std::size_t k = 0; k < count; k += stride) ks.push_back(k);
    if (count > 0 && ks.back() != count - 1) ks.push_back(count - 1);
    return ks;
}

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

const char* boundary_name(Boundary b) { return b == Boundary::Dirichlet ? "dirichlet" : "neumann"; }

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, std::size_t stride) {
    auto out = open_out(path);
    out << "t,x,z,eta\n";
    for (std::size_t k : strided(traj.z.size(), stride))
        for (std::size_t i = 0; i < traj.grid.n(); ++i)
            out << format_double(traj.times[k]) << ',' << format_double(traj.grid.node(i)) << ','
                << format_double(traj.z[k][i]) << ',' << format_double(traj.eta[k][i]) << '\n';
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "t,x,z,eta") throw ConfigError(path.string() + ": unexpected header '" + line + "'");
    Trajectory traj{grid, 0.0, {}, {}, {}, {}, {}};
    std::size_t lineno = 1;
    std::size_t col = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double v[4];
        for (double& x : v) {
            if (!std::getline(ss, cell, ',')) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": short row");
            x = std::stod(cell);
        }
        if (col == 0) {
            traj.times.push_back(v[0]);
            traj.z.emplace_back(grid.n());
            traj.eta.emplace_back(grid.n());
        }
        traj.z.back()[col] = v[2];
        traj.eta.back()[col] = v[3];
        col = (col + 1) % grid.n();
    }
    if (col != 0) throw GridMismatch(path.string() + ": row count is not a multiple of the grid size");
    if (traj.times.size() > 1) traj.tau = traj.times[1] - traj.times[0];
    return traj;
}

nlohmann::json grid_to_json(const Grid& grid) {
    return {{"a", grid.a()}, {"b", grid.b()}, {"n", grid.n()}, {"h", grid.h()},
            {"left", boundary_name(grid.left())}, {"right", boundary_name(grid.right())}};
}

nlohmann::json trajectory_manifest(const Trajectory& traj, std::size_t stride) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t k = 0; k < traj.z.size(); ++k) {
        nlohmann::json s{{"k", k}, {"t", traj.times[k]}, {"energy", number(traj.energy.at(k))}};
        if (k > 0) {
            s["iterations"] = traj.meta[k].iters;
            s["kkt_residual"] = traj.meta[k].kkt_residual;
            s["active_count"] = traj.meta[k].active_count;
        }
        steps.push_back(std::move(s));
    }
    return {{"grid", grid_to_json(traj.grid)},
            {"tau", traj.tau},
            {"m", traj.steps()},
            {"stride", stride == 0 ? 1 : stride},
            {"eta_at_t0", "placeholder zeros"},
            {"steps", std::move(steps)}};
}

nlohmann::json to_json(const CheckVerdict& v) {
    return {{"name", v.name},
            {"pass", v.pass},
            {"applicable", v.applicable},
            {"max_violation", number(v.max_violation)},
            {"tolerance", v.tolerance},
            {"worst_step", v.worst_step},
            {"worst_node", v.worst_node},
            {"detail", v.detail}};
}

nlohmann::json to_json(const EnergyReport& r) {
    nlohmann::json res = nlohmann::json::array();
    for (double x : r.residual) res.push_back(number(x));
    nlohmann::json en = nlohmann::json::array();
    for (double x : r.energy) en.push_back(number(x));
    return {{"energy", std::move(en)},
            {"residual", std::move(res)},
            {"max_abs_residual", number(r.max_abs_residual)},
            {"sum_abs_residual", number(r.sum_abs_residual)},
            {"order", number(r.order)},
            {"derivative_fallback", r.derivative_fallback}};
}

nlohmann::json to_json(const ValidationReport& r) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : r.items)
        items.push_back({{"name", it.name},
                         {"hypothesis", it.hypothesis},
                         {"value", number(it.value)},
                         {"tolerance", number(it.tolerance)},
                         {"pass", it.pass},
                         {"detail", it.detail}});
    return {{"lambda0", number(r.lambda0)},
            {"sigma_sup", number(r.sigma_sup)},
            {"admissibility_residual", number(r.admissibility_residual)},
            {"lipschitz_certified", r.lipschitz_certified},
            {"all_pass", r.all_pass()},
            {"items", std::move(items)}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_refinement_csv(const std::filesystem::path& path, const RefinementTable& table) {
    auto out = open_out(path);
    out << "study,m,n,gap_V,balance_sum,order_estimate,increment_trend\n";
    for (const auto& r : table.rows)
        out << r.study << ',' << r.m << ',' << r.n << ',' << format_double(r.gap_v) << ','
            << format_double(r.balance_sum) << ',' << format_double(r.order_estimate) << ','
            << format_double(r.increment_trend) << '\n';
}

void write_gap_csv(const std::filesystem::path& path, const std::vector<double>& times,
                   const std::vector<double>& gap) {
    write_series_csv(path, times, gap, "gap_V");
}

void write_field_csv(const std::filesystem::path& path, const Grid& grid, const Field& z) {
    auto out = open_out(path);
    out << "x,z\n";
    for (std::size_t i = 0; i < grid.n(); ++i) out << format_double(grid.node(i)) << ',' << format_double(z[i]) << '\n';
}

void write_displacement_csv(const std::filesystem::path& path, const std::vector<CoupledState>& states,
                            std::size_t stride) {
    auto out = open_out(path);
    out << "t,x,u,u_x\n";
    for (std::size_t k : strided(states.size(), stride)) {
        const auto& s = states[k];
        for (std::size_t j = 0; j < s.x.size(); ++j)
            out << format_double(s.t) << ',' << format_double(s.x[j]) << ',' << format_double(s.u[j]) << ','
                << format_double(s.u_x[j]) << '\n';
    }
}

void write_series_csv(const std::filesystem::path& path, const std::vector<double>& times,
                      const std::vector<double>& values, const std::string& column) {
    auto out = open_out(path);
    out << "t," << column << '\n';
    for (std::size_t k = 0; k < times.size() && k < values.size(); ++k)
        out << format_double(times[k]) << ',' << format_double(values[k]) << '\n';
}

}  // namespace irrev

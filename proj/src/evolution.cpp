#include "irrev/evolution.hpp"

#include <algorithm>
#include <sstream>

#include "irrev/functional.hpp"

namespace irrev {

void enforce_validation(const ValidationReport& report, Enforcement level) {
    std::ostringstream os;
    bool failed = false;
    for (const auto& item : report.items) {
        if (item.pass) continue;
        if (level == Enforcement::CoercivityOnly && item.name != "coercivity") continue;
        os << (failed ? "; " : "") << item.name << " (" << item.hypothesis << "): value " << item.value;
        failed = true;
    }
    if (failed) throw ValidationFailed("data rejected: " + os.str());
}

Trajectory run_evolution(const ProblemData& data, const Nonlinearity& nl, std::size_t m,
                         const EvolutionOptions& opts) {
    const DiscretizedData disc = discretize_time(data, m, opts.quad_pts);
    return run_evolution(data, nl, disc, opts);
}

Trajectory run_evolution(const ProblemData& data, const Nonlinearity& nl, const DiscretizedData& disc,
                         const EvolutionOptions& opts) {
    enforce_validation(validate(data, nl, opts.validation), opts.enforce);
    const Grid& grid = data.grid;
    grid.check(data.z0, "z0");

    Trajectory traj{grid, disc.tau, {}, {}, {}, {}, {}};
    traj.times.push_back(0.0);
    traj.z.push_back(data.z0);
    traj.eta.emplace_back(grid.n(), 0.0);
    traj.energy.push_back(energy(grid, data, nl, data.z0, 0.0));
    traj.meta.push_back({});

    for (std::size_t k = 1; k <= disc.m; ++k) {
        const StepProblem step{grid, traj.z.back(), disc.f[k], disc.sigma[k], data.lambda, nl};
        ObstacleResult r;
        try {
            r = solve_step(step, opts.solver);
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "step " << k << " (t=" << disc.times[k] << "): " << e.what();
            throw EvolutionError(os.str(), std::move(traj), k, e.kind());
        }
        traj.times.push_back(disc.times[k]);
        traj.energy.push_back(energy(grid, data, nl, r.z, disc.times[k]));
        traj.meta.push_back({r.iters, r.kkt_residual, r.active.size()});
        traj.z.push_back(std::move(r.z));
        traj.eta.push_back(std::move(r.eta));
    }
    return traj;
}

namespace {

std::size_t locate(const Trajectory& traj, double t) {
    if (traj.times.empty()) throw OutOfRange("empty trajectory");
    const double T = traj.times.back();
    const double slack = 1e-12 * std::max(1.0, T);
    if (t < -slack || t > T + slack) {
        std::ostringstream os;
        os << "time " << t << " outside [0, " << T << "]";
        throw OutOfRange(os.str());
    }
    auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
    if (it == traj.times.end()) return traj.times.size() - 1;
    return static_cast<std::size_t>(std::distance(traj.times.begin(), it));
}

}  // namespace

Field interp_linear(const Trajectory& traj, double t) {
    const std::size_t k = locate(traj, t);
    if (k == 0 || t >= traj.times[k]) return traj.z[k];
    const double theta = (t - traj.times[k - 1]) / (traj.times[k] - traj.times[k - 1]);
    const Field& a = traj.z[k - 1];
    const Field& b = traj.z[k];
    Field out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - theta) * a[i] + theta * b[i];
    return out;
}

Field interp_constant(const Trajectory& traj, double t) { return traj.z[locate(traj, t)]; }

}  // namespace irrev

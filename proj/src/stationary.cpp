#include "irrev/stationary.hpp"

#include <algorithm>
#include <cmath>

namespace irrev {

ObstacleResult solve_stationary(const StationaryProblem& p, const SolverOptions& opts,
                                std::span<const double> initial_guess) {
    p.grid.check(p.z0, "z0");
    p.grid.check(p.f_inf, "f_inf");
    p.grid.check(p.sigma_tilde, "sigma_tilde");
    const StepProblem step{p.grid, p.z0, p.f_inf, p.sigma_tilde, p.lambda, p.nl};
    return solve_step(step, opts, initial_guess);
}

LongTimeResult run_longtime(const ProblemData& data, std::span<const double> f_inf, const Nonlinearity& nl,
                            const LongTimeOptions& opts) {
    const Grid& grid = data.grid;
    grid.check(f_inf, "f_inf");
    if (!(opts.horizon > 0.0) || opts.m_per_unit == 0)
        throw ConfigError("long-time run needs a positive horizon and m_per_unit");

    ProblemData run = data;
    run.T = opts.horizon;
    const auto m = static_cast<std::size_t>(std::ceil(opts.horizon * static_cast<double>(opts.m_per_unit)));

    LongTimeResult out{Trajectory{grid, 0.0, {}, {}, {}, {}, {}}, {}, {}, 0.0, 0.0, true, 0.0, true, true};

    const Field sigma0 = data.sigma.sample(grid, 0.0);
    out.sigma_time_independent = is_time_independent(data.sigma, grid, opts.horizon);
    const std::size_t ns = 64;
    for (std::size_t j = 0; j <= ns; ++j) {
        const Field f = data.f.sample(grid, opts.horizon * static_cast<double>(j) / static_cast<double>(ns));
        for (std::size_t i = 0; i < grid.n(); ++i)
            if (f[i] < f_inf[i] - 1e-14 * (1.0 + std::abs(f_inf[i]))) out.f_above_limit = false;
    }

    const StationaryProblem sp{grid, data.z0, Field(f_inf.begin(), f_inf.end()), sigma0, data.lambda, nl};
    out.z_inf = solve_stationary(sp, opts.evolution.solver).z;
    out.trajectory = run_evolution(run, nl, m, opts.evolution);

    const Trajectory& traj = out.trajectory;
    for (std::size_t k = 0; k < traj.z.size(); ++k) {
        out.gap.push_back(norm_v(grid, difference(traj.z[k], out.z_inf)));
        if (k > 0) out.max_gap_increase = std::max(out.max_gap_increase, out.gap[k] - out.gap[k - 1]);
        for (std::size_t i = 0; i < grid.n(); ++i)
            out.sandwich_violation = std::max(out.sandwich_violation, out.z_inf[i] - traj.z[k][i]);
    }
    out.final_gap = out.gap.back();
    out.monotone = out.max_gap_increase <= opts.jitter;
    return out;
}

}  // namespace irrev

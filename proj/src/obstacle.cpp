#include "irrev/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "irrev/functional.hpp"
#include "irrev/tridiag.hpp"

namespace irrev {

const char* to_string(SolverFailure f) {
    switch (f) {
        case SolverFailure::CoercivityLost: return "CoercivityLost";
        case SolverFailure::MaxIterations: return "MaxIterations";
        case SolverFailure::NewtonFailure: return "NewtonFailure";
        case SolverFailure::NoCandidate: return "NoCandidate";
        case SolverFailure::AmbiguousCandidates: return "AmbiguousCandidates";
    }
    return "unknown";
}

double kkt_residual(std::span<const double> z, std::span<const double> eta,
                    std::span<const double> obstacle) {
    double r = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        r = std::max(r, std::abs(std::min(eta[i], obstacle[i] - z[i])));
    return r;
}

void require_coercive(const StepProblem& p, double margin) {
    p.grid.check(p.sigma, "sigma_k");
    double smax = 0.0;
    for (double s : p.sigma) smax = std::max(smax, s);
    const double lambda0 = p.lambda - p.nl.L * smax;
    if (!(lambda0 >= margin)) {
        std::ostringstream os;
        os << "lambda - L*max(sigma_k) = " << lambda0 << " is below " << margin;
        throw SolverError(SolverFailure::CoercivityLost, os.str());
    }
}

namespace {

double norm2(std::span<const double> v, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) s += v[i] * v[i];
    return std::sqrt(s);
}

double norm_inf(std::span<const double> v, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) s = std::max(s, std::abs(v[i]));
    return s;
}

Field residual(const StepProblem& p, std::span<const double> u) {
    return step_residual(p.grid, u, p.load, p.sigma, p.lambda, p.nl);
}

/// Damped Newton on the nodes with fixed[i] == 0; fixed nodes keep their value.
/// Returns the number of Newton iterations taken.
std::size_t newton_free(const StepProblem& p, const std::vector<char>& fixed, Field& u,
                        const SolverOptions& opts) {
    const Grid& grid = p.grid;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < grid.n(); ++i)
        if (!fixed[i]) free.push_back(i);
    if (free.empty()) return 0;

    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    const double tol = 1e-2 * opts.tol_kkt;
    const std::size_t nf = free.size();
    std::vector<double> lo(nf), di(nf), up(nf), rhs(nf);

    Field g = residual(p, u);
    for (std::size_t it = 0; it < opts.max_newton; ++it) {
        const double gmax = norm_inf(g, free);
        if (gmax <= tol) return it;

        for (std::size_t j = 0; j < nf; ++j) {
            const std::size_t i = free[j];
            const StencilRow row = laplacian_row(grid, i);
            di[j] = row.diag * inv_h2 + p.lambda + p.sigma[i] * p.nl.gamma_prime(u[i]);
            lo[j] = (j > 0 && free[j - 1] + 1 == i) ? row.lower * inv_h2 : 0.0;
            up[j] = (j + 1 < nf && free[j + 1] == i + 1) ? row.upper * inv_h2 : 0.0;
            rhs[j] = -g[i];
        }
        const std::vector<double> delta = solve_tridiagonal(lo, di, up, rhs);

        double dmax = 0.0, umax = 0.0;
        for (std::size_t j = 0; j < nf; ++j) {
            dmax = std::max(dmax, std::abs(delta[j]));
            umax = std::max(umax, std::abs(u[free[j]]));
        }
        if (!std::isfinite(dmax))
            throw SolverError(SolverFailure::NewtonFailure, "non-finite Newton direction");
        // Step at the rounding floor: nothing left to gain.
        if (dmax <= 1e-15 * (1.0 + umax)) return it;

        const double merit = norm2(g, free);
        double alpha = 1.0;
        Field trial = u;
        for (;;) {
            for (std::size_t j = 0; j < nf; ++j) trial[free[j]] = u[free[j]] + alpha * delta[j];
            Field gt = residual(p, trial);
            if (norm2(gt, free) <= (1.0 - 1e-4 * alpha) * merit) {
                u.swap(trial);
                g.swap(gt);
                break;
            }
            alpha *= opts.newton_damping;
            if (alpha < 1e-12) {
                // Merit cannot decrease further; accept if already at rounding level.
                if (gmax <= 1e3 * tol) return it;
                std::ostringstream os;
                os << "line search stalled with residual " << gmax;
                throw SolverError(SolverFailure::NewtonFailure, os.str());
            }
        }
    }
    if (norm_inf(g, free) <= 1e3 * tol) return opts.max_newton;
    throw SolverError(SolverFailure::NewtonFailure, "Newton iteration limit reached");
}

ObstacleResult finalize(const StepProblem& p, Field u, std::size_t iters, double tol) {
    ObstacleResult r;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::min(u[i], p.obstacle[i]);
    Field g = residual(p, u);
    r.eta.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r.eta[i] = 0.0 - g[i];
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i] == p.obstacle[i] && r.eta[i] > tol) r.active.push_back(i);
    r.kkt_residual = kkt_residual(u, r.eta, p.obstacle);
    r.z = std::move(u);
    r.iters = iters;
    return r;
}

void check_shapes(const StepProblem& p) {
    p.grid.check(p.obstacle, "obstacle");
    p.grid.check(p.load, "f_k");
    p.grid.check(p.sigma, "sigma_k");
}

}  // namespace

ObstacleResult solve_step(const StepProblem& p, const SolverOptions& opts,
                          std::span<const double> initial_guess) {
    if (opts.method == Method::ProjectedGradient) return solve_step_pg(p, opts);
    return solve_step_active_set(p, opts, initial_guess);
}

ObstacleResult solve_step_active_set(const StepProblem& p, const SolverOptions& opts,
                                     std::span<const double> initial_guess) {
    check_shapes(p);
    require_coercive(p, opts.coercivity_margin);
    const std::size_t n = p.grid.n();
    const double scale = 2.0 / (p.grid.h() * p.grid.h()) + p.lambda;
    const double c = opts.pdas_c * scale;

    Field u(p.obstacle.begin(), p.obstacle.end());
    if (!initial_guess.empty()) {
        p.grid.check(initial_guess, "initial guess");
        u.assign(initial_guess.begin(), initial_guess.end());
    }

    std::vector<char> active(n, 0);
    {
        const Field g = residual(p, u);
        for (std::size_t i = 0; i < n; ++i) active[i] = (-g[i] + c * (u[i] - p.obstacle[i])) > 0.0;
    }

    std::optional<ObstacleResult> best;
    std::size_t newton_total = 0;
    for (std::size_t outer = 1; outer <= opts.max_outer; ++outer) {
        for (std::size_t i = 0; i < n; ++i)
            if (active[i]) u[i] = p.obstacle[i];
        newton_total += newton_free(p, active, u, opts);

        const Field g = residual(p, u);
        std::vector<char> next(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = active[i] ? -g[i] : 0.0;
            next[i] = (eta + c * (u[i] - p.obstacle[i])) > 0.0;
        }

        ObstacleResult r = finalize(p, u, outer, opts.tol_kkt);
        // Nodes that flip between the two sets while sitting at η ≈ 0 and z ≈ obstacle
        // are ties; they do not count as a change of the active set.
        bool stable = true;
        for (std::size_t i = 0; i < n && stable; ++i) {
            if (next[i] == active[i]) continue;
            const bool tie = std::abs(r.eta[i]) <= opts.tol_kkt &&
                             c * std::abs(u[i] - p.obstacle[i]) <= opts.tol_kkt;
            stable = tie;
        }
        if (stable && r.kkt_residual <= opts.tol_kkt) return r;
        if (!best || r.kkt_residual < best->kkt_residual) best = r;
        if (next == active) {
            std::ostringstream os;
            os << "active set is stable but the KKT residual " << r.kkt_residual
               << " exceeds " << opts.tol_kkt;
            throw SolverError(SolverFailure::NewtonFailure, os.str(), best);
        }
        active.swap(next);
    }
    throw SolverError(SolverFailure::MaxIterations, "active set did not settle", best);
}

ObstacleResult solve_step_pg(const StepProblem& p, const SolverOptions& opts,
                             std::vector<double>* objective_trace) {
    check_shapes(p);
    require_coercive(p, opts.coercivity_margin);
    const Grid& grid = p.grid;
    const std::size_t n = grid.n();
    const double h = grid.h();
    const double s_ref = 1.0 / (4.0 / (h * h) + p.lambda);

    auto objective = [&](std::span<const double> v) {
        return frozen_energy(grid, v, p.load, p.sigma, p.lambda, p.nl);
    };
    auto project_step = [&](const Field& v, const Field& g, double s) {
        Field w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = std::min(v[i] - s * g[i], p.obstacle[i]);
        return w;
    };

    Field u(p.obstacle.begin(), p.obstacle.end());
    double J = objective(u);
    if (objective_trace) objective_trace->push_back(J);
    double s = 2.0 * s_ref;
    Field g = residual(p, u);

    for (std::size_t it = 1; it <= opts.max_pg_iterations; ++it) {
        // Projected-gradient residual in multiplier units.
        const Field ref = project_step(u, g, s_ref);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(u[i] - ref[i]) / s_ref);
        if (res <= opts.tol_kkt) return finalize(p, u, it - 1, opts.tol_kkt);

        for (;;) {
            Field trial = project_step(u, g, s);
            double lin = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = trial[i] - u[i];
                lin += g[i] * d;
                sq += d * d;
            }
            if (sq == 0.0) return finalize(p, u, it, opts.tol_kkt);
            const double Jt = objective(trial);
            Field gt = residual(p, trial);
            // Near the minimizer J(trial) - J(u) drops below the resolution of J;
            // the trapezoid rule on the gradient measures the difference directly.
            double dJ = Jt - J;
            if (std::abs(h * lin) < 1e-6 * (1.0 + std::abs(J))) {
                dJ = 0.0;
                for (std::size_t i = 0; i < n; ++i) dJ += 0.5 * (g[i] + gt[i]) * (trial[i] - u[i]);
                dJ *= h;
            }
            if (dJ <= h * lin + 0.5 * h * sq / s && dJ <= 0.0) {
                u.swap(trial);
                g.swap(gt);
                J = Jt;
                if (objective_trace) objective_trace->push_back(J);
                break;
            }
            s *= opts.newton_damping;
            if (s < 1e-20 * s_ref) {
                // Rounding floor: the objective can no longer resolve descent.
                return finalize(p, u, it, opts.tol_kkt);
            }
        }
        s = std::min(s * 2.0, 64.0 * s_ref);
    }
    ObstacleResult best = finalize(p, u, opts.max_pg_iterations, opts.tol_kkt);
    throw SolverError(SolverFailure::MaxIterations, "projected gradient iteration limit reached", best);
}

ObstacleResult oracle_enumerate(const StepProblem& p) {
    check_shapes(p);
    const std::size_t n = p.grid.n();
    if (n > 12) throw ConfigError("oracle_enumerate supports at most 12 nodes");
    require_coercive(p, 1e-12);

    SolverOptions opts;
    opts.tol_kkt = 1e-12;
    opts.max_newton = 200;
    std::vector<ObstacleResult> accepted;
    const std::size_t subsets = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::vector<char> fixed(n, 0);
        Field u(p.obstacle.begin(), p.obstacle.end());
        for (std::size_t i = 0; i < n; ++i) fixed[i] = (mask >> i) & 1u;
        try {
            newton_free(p, fixed, u, opts);
        } catch (const SolverError&) {
            continue;
        }
        const Field g = residual(p, u);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (fixed[i] && -g[i] < -1e-12) ok = false;
            if (u[i] > p.obstacle[i] + 1e-12) ok = false;
        }
        if (!ok) continue;
        ObstacleResult r = finalize(p, u, mask, 1e-12);
        accepted.push_back(std::move(r));
    }
    if (accepted.empty()) throw SolverError(SolverFailure::NoCandidate, "no subset satisfies the KKT system");

    std::size_t best = 0;
    for (std::size_t j = 1; j < accepted.size(); ++j)
        if (accepted[j].kkt_residual < accepted[best].kkt_residual) best = j;
    for (const auto& r : accepted) {
        double gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(r.z[i] - accepted[best].z[i]));
        if (gap > 1e-9) {
            std::ostringstream os;
            os << accepted.size() << " accepted subsets disagree by " << gap;
            throw SolverError(SolverFailure::AmbiguousCandidates, os.str());
        }
    }
    ObstacleResult out = std::move(accepted[best]);
    out.iters = subsets;
    return out;
}

Field solve_unconstrained(const Grid& grid, std::span<const double> load, std::span<const double> sigma,
                          double lambda, const Nonlinearity& nl, const SolverOptions& opts,
                          std::span<const double> initial_guess) {
    grid.check(load, "load");
    grid.check(sigma, "sigma");
    Field unused(grid.n(), 0.0);
    StepProblem p{grid, unused, load, sigma, lambda, nl};
    require_coercive(p, opts.coercivity_margin);
    Field u(grid.n(), 0.0);
    if (!initial_guess.empty()) {
        grid.check(initial_guess, "initial guess");
        u.assign(initial_guess.begin(), initial_guess.end());
    }
    std::vector<char> fixed(grid.n(), 0);
    newton_free(p, fixed, u, opts);
    return u;
}

}  // namespace irrev

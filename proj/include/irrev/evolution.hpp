#pragma once

#include <cstddef>
#include <vector>

#include "irrev/error.hpp"
#include "irrev/grid.hpp"
#include "irrev/model.hpp"
#include "irrev/obstacle.hpp"

namespace irrev {

struct StepMeta {
    std::size_t iters = 0;
    double kkt_residual = 0.0;
    std::size_t active_count = 0;
};

/// Discrete solution family z_0..z_m of the minimizing-movement scheme.
///
/// eta[k] and meta[k] describe step k; index 0 is a zero placeholder so that
/// every per-stamp vector has m + 1 entries. energy[k] = E(z_k, t_k).
struct Trajectory {
    Grid grid;
    double tau = 0.0;
    std::vector<double> times;
    std::vector<Field> z;
    std::vector<Field> eta;
    std::vector<double> energy;
    std::vector<StepMeta> meta;

    std::size_t steps() const { return z.empty() ? 0 : z.size() - 1; }
};

/// A step failed; carries the trajectory up to the last successful step.
class EvolutionError : public Error {
public:
    EvolutionError(const std::string& what, Trajectory partial, std::size_t step, SolverFailure kind)
        : Error(what), partial_(std::move(partial)), step_(step), kind_(kind) {}

    const Trajectory& partial() const { return partial_; }
    std::size_t step() const { return step_; }
    SolverFailure kind() const { return kind_; }

private:
    Trajectory partial_;
    std::size_t step_;
    SolverFailure kind_;
};

enum class Enforcement {
    All,             ///< every validation item must pass
    CoercivityOnly,  ///< only λ₀ > 0 is required
};

struct EvolutionOptions {
    SolverOptions solver;
    std::size_t quad_pts = 8;
    ValidationOptions validation;
    Enforcement enforce = Enforcement::All;
};

/// Validates the data, then solves z_k = argmin J_k over {u ≤ z_{k-1}} for k = 1..m.
Trajectory run_evolution(const ProblemData& data, const Nonlinearity& nl, std::size_t m,
                         const EvolutionOptions& opts = {});

/// Same, with caller-supplied time averages (skips discretize_time).
Trajectory run_evolution(const ProblemData& data, const Nonlinearity& nl, const DiscretizedData& disc,
                         const EvolutionOptions& opts = {});

/// Throws ValidationFailed if the report does not satisfy the enforcement level.
void enforce_validation(const ValidationReport& report, Enforcement level);

/// Piecewise-linear interpolant z_τ(t), 0 ≤ t ≤ T.
Field interp_linear(const Trajectory& traj, double t);

/// Piecewise-constant interpolant z̄_τ(t) = z_k on (t_{k-1}, t_k]; extended by z_0 at t = 0.
Field interp_constant(const Trajectory& traj, double t);

}  // namespace irrev

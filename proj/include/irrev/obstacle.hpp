#pragma once

#include <optional>
#include <span>
#include <vector>

#include "irrev/error.hpp"
#include "irrev/grid.hpp"
#include "irrev/model.hpp"

namespace irrev {

enum class Method { ActiveSet, ProjectedGradient };

struct SolverOptions {
    Method method = Method::ActiveSet;
    double tol_kkt = 1e-10;
    std::size_t max_outer = 100;
    /// Scaling of the primal term in the active-set predictor.
    double pdas_c = 1.0;
    /// Backtracking factor for both the inner Newton and the projected gradient line search.
    double newton_damping = 0.5;
    /// Smallest accepted λ - L·max σ_k.
    double coercivity_margin = 1e-12;
    std::size_t max_newton = 60;
    std::size_t max_pg_iterations = 2'000'000;
};

/// One implicit step: minimize the step functional over {u ≤ obstacle}.
/// Non-owning view; the referenced data must outlive the call.
struct StepProblem {
    const Grid& grid;
    std::span<const double> obstacle;
    std::span<const double> load;   ///< f_k
    std::span<const double> sigma;  ///< σ_k
    double lambda;
    const Nonlinearity& nl;
};

/// Solution z of one step with its multiplier η = f_k - (-Δz + λz + σ_kγ(z)).
///
/// η is reported for the undivided step equation, not scaled by τ. `active`
/// lists nodes with z_i = obstacle_i and η_i > tol_kkt; exact ties (η = 0 at
/// contact) are classified inactive.
struct ObstacleResult {
    Field z;
    Field eta;
    std::vector<std::size_t> active;
    std::size_t iters = 0;
    double kkt_residual = 0.0;
};

enum class SolverFailure { CoercivityLost, MaxIterations, NewtonFailure, NoCandidate, AmbiguousCandidates };

const char* to_string(SolverFailure f);

class SolverError : public Error {
public:
    SolverError(SolverFailure kind, const std::string& what,
                std::optional<ObstacleResult> best = std::nullopt)
        : Error(std::string(to_string(kind)) + ": " + what), kind_(kind), best_(std::move(best)) {}

    SolverFailure kind() const { return kind_; }
    /// Best iterate seen before giving up, when one exists.
    const std::optional<ObstacleResult>& best() const { return best_; }

private:
    SolverFailure kind_;
    std::optional<ObstacleResult> best_;
};

/// max_i |min(η_i, obstacle_i - z_i)|.
double kkt_residual(std::span<const double> z, std::span<const double> eta,
                    std::span<const double> obstacle);

/// Throws CoercivityLost unless λ - L·max σ ≥ margin.
void require_coercive(const StepProblem& p, double margin);

/// Dispatches on opts.method.
ObstacleResult solve_step(const StepProblem& p, const SolverOptions& opts = {},
                          std::span<const double> initial_guess = {});

/// Primal-dual active set with damped Newton on the inactive nodes.
ObstacleResult solve_step_active_set(const StepProblem& p, const SolverOptions& opts = {},
                                     std::span<const double> initial_guess = {});

/// Projected gradient with Armijo backtracking, started at the obstacle.
/// If `objective_trace` is given it receives J_k at every accepted iterate.
ObstacleResult solve_step_pg(const StepProblem& p, const SolverOptions& opts = {},
                             std::vector<double>* objective_trace = nullptr);

/// Exhaustive enumeration of the 2ⁿ candidate active sets (n ≤ 12).
ObstacleResult oracle_enumerate(const StepProblem& p);

/// Damped Newton for -Δu + λu + σγ(u) = f without constraint.
Field solve_unconstrained(const Grid& grid, std::span<const double> load, std::span<const double> sigma,
                          double lambda, const Nonlinearity& nl, const SolverOptions& opts = {},
                          std::span<const double> initial_guess = {});

}  // namespace irrev

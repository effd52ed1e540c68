#pragma once

#include <span>
#include <vector>

#include "irrev/evolution.hpp"
#include "irrev/grid.hpp"
#include "irrev/model.hpp"
#include "irrev/obstacle.hpp"

namespace irrev {

/// Limit problem: ∂I(z∞ - z0) - Δz∞ + λz∞ + σ̃γ(z∞) ∋ f∞.
struct StationaryProblem {
    Grid grid;
    Field z0;
    Field f_inf;
    Field sigma_tilde;
    double lambda = 0.0;
    Nonlinearity nl;
};

/// Same KKT system as one evolution step with obstacle z0.
ObstacleResult solve_stationary(const StationaryProblem& p, const SolverOptions& opts = {},
                                std::span<const double> initial_guess = {});

struct LongTimeOptions {
    double horizon = 40.0;
    std::size_t m_per_unit = 16;
    double jitter = 1e-10;
    double sandwich_tol = 1e-10;
    EvolutionOptions evolution;
};

struct LongTimeResult {
    Trajectory trajectory;
    Field z_inf;
    std::vector<double> gap;  ///< norm_v(z_k - z∞), one entry per stamp
    double final_gap = 0.0;
    /// Largest increase gap[k] - gap[k-1]; ≤ jitter when the series is monotone.
    double max_gap_increase = 0.0;
    bool monotone = true;
    /// max over k, i of (z∞ - z_k)_i.
    double sandwich_violation = 0.0;
    bool sigma_time_independent = true;
    bool f_above_limit = true;
};

/// Runs the evolution to `horizon` with data.T overridden and compares every
/// stamp with the stationary solution for (f_inf, σ(·,0)).
LongTimeResult run_longtime(const ProblemData& data, std::span<const double> f_inf, const Nonlinearity& nl,
                            const LongTimeOptions& opts = {});

}  // namespace irrev

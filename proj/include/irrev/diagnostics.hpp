#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "irrev/evolution.hpp"
#include "irrev/functional.hpp"
#include "irrev/model.hpp"

namespace irrev {

/// Outcome of one post-hoc check. pass ⇔ applicable and max_violation ≤ tolerance.
struct CheckVerdict {
    std::string name;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    bool applicable = true;
    std::size_t worst_step = 0;
    std::size_t worst_node = 0;
    std::string detail;

    void record(double violation, std::size_t k, std::size_t i);
    void close();
};

struct EnergyReport {
    std::vector<double> energy;    ///< E(z_k, t_k), k = 0..m
    std::vector<double> residual;  ///< one entry per interval (t_{k-1}, t_k]
    double max_abs_residual = 0.0;
    double sum_abs_residual = 0.0;
    /// Empirical order of sum_abs_residual in τ; NaN unless filled by a study.
    double order = std::numeric_limits<double>::quiet_NaN();
    /// True when ∂ₜf or ∂ₜσ came from finite differences.
    bool derivative_fallback = false;
};

/// Per-interval mismatch of the energy balance law with z̄_τ in the power term
/// and composite midpoint quadrature in time.
EnergyReport balance_residual(const Trajectory& traj, const ProblemData& data, const Nonlinearity& nl,
                              std::size_t quad_pts = 8);

struct BalanceStudy {
    std::vector<std::size_t> m;
    std::vector<double> sum_abs;
    std::vector<double> order;  ///< order[j] compares m[j-1] and m[j]; order[0] is NaN
    double min_order = std::numeric_limits<double>::quiet_NaN();
};
BalanceStudy balance_order_study(const ProblemData& data, const Nonlinearity& nl,
                                 std::span<const std::size_t> m_list, const EvolutionOptions& opts = {});

/// log(coarse/fine)/log(ratio).
double empirical_order(double coarse, double fine, double ratio);

struct MinimalityOptions {
    std::size_t n_samples = 1000;
    std::uint64_t seed = 1;
    double tolerance = 1e-10;
    /// When set, stamps k ≥ 1 are tested against the frozen step data (f_k, σ_k)
    /// that z_k actually minimizes; otherwise against f(·,t), σ(·,t).
    const DiscretizedData* frozen = nullptr;
};

/// Samples admissible competitors v = z(t) - a·p with p ≥ 0 drawn from three
/// families (single-node spikes, smooth bumps, global shifts) and asserts
/// E(z(t)) ≤ E(v) + tolerance. `t` must be a stored stamp.
CheckVerdict check_unilateral_minimality(const Trajectory& traj, const ProblemData& data,
                                         const Nonlinearity& nl, double t,
                                         const MinimalityOptions& opts = {});

/// f_k ∧ (-Δz_{k-1} + λz_{k-1} + σ_kγ(z_k)) ≤ -Δz_k + λz_k + σ_kγ(z_k) ≤ f_k nodewise.
CheckVerdict check_lewy_stampacchia(const Trajectory& traj, const DiscretizedData& disc, double lambda,
                                    const Nonlinearity& nl, double tol = 1e-8);

/// min over k, i of (z_{k-1} - z_k)_i ≥ -tol.
CheckVerdict check_irreversibility(const Trajectory& traj, double tol = 1e-12);

/// J_k(z_k) ≤ J_k(z_{k-1}) (relative tolerance), since z_{k-1} is admissible at step k.
CheckVerdict check_dissipation(const Trajectory& traj, const DiscretizedData& disc, double lambda,
                               const Nonlinearity& nl, double tol = 1e-12);

/// Stored energies equal energy(z_k, t_k) exactly.
CheckVerdict check_energy_identity(const Trajectory& traj, const ProblemData& data, const Nonlinearity& nl);

/// Max nodewise movement away from z_0 over all stamps.
CheckVerdict check_no_evolution(const Trajectory& traj, double tol = 1e-10);

/// Runs both problems with the same m and asserts z^A_k ≤ z^B_k + tol.
/// Marked inapplicable unless z0A ≤ z0B, fA ≤ fB on samples and σ, λ, grid coincide.
CheckVerdict check_comparison(const ProblemData& a, const ProblemData& b, const Nonlinearity& nl,
                              std::size_t m, const EvolutionOptions& opts = {}, double tol = 1e-10);

/// Same check on trajectories that are already computed.
CheckVerdict compare_trajectories(const Trajectory& a, const Trajectory& b, double tol = 1e-10);

struct RefinementRow {
    std::string study;  ///< "tau" or "h"
    std::size_t m = 0;
    std::size_t n = 0;
    /// Sup-in-time V-norm gap to the previous row of the same study; NaN on the first row.
    double gap_v = std::numeric_limits<double>::quiet_NaN();
    double balance_sum = 0.0;
    /// tau rows: order of balance_sum; h rows: order of gap_v. NaN where undefined.
    double order_estimate = std::numeric_limits<double>::quiet_NaN();
    /// max_k ‖z_k - z_{k-1}‖_V / sqrt(τ).
    double increment_trend = 0.0;
};

struct RefinementTable {
    std::vector<RefinementRow> rows;
    /// True when the tau gaps strictly decrease along the sweep.
    bool tau_gaps_decreasing = true;
};

using ProblemFactory = std::function<ProblemData(std::size_t n)>;

/// τ sweep over m_list at n = n_list.front(), then h sweep over n_list at m = m_list.front().
RefinementTable refinement_study(const ProblemFactory& make, const Nonlinearity& nl,
                                 std::span<const std::size_t> m_list, std::span<const std::size_t> n_list,
                                 const EvolutionOptions& opts = {});

/// Sup over the stamps of `coarse` of ‖coarse(t) - fine(t)‖_V, fine evaluated by z_τ.
double time_refinement_gap(const Trajectory& coarse, const Trajectory& fine);

}  // namespace irrev

#pragma once

#include <optional>
#include <vector>

#include "irrev/diagnostics.hpp"
#include "irrev/evolution.hpp"
#include "irrev/grid.hpp"
#include "irrev/model.hpp"

namespace irrev {

/// One-dimensional Ambrosio–Tortorelli data on (-1, 1).
struct ATParams {
    double eps = 0.2;
    double delta_eps = 0.05;
    /// Load h(x, t) with zero spatial average at every t.
    TimeProfile load;
};

/// γ(s) = s/(ε(s² + δ)²) with its primitive and L from the minimum of γ' on [-L_range, L_range].
Nonlinearity at_nonlinearity(const ATParams& params, double L_range = 10.0);

/// H(x, t) = ∫_{-1}^{x} h(y, t) dy at the n + 2 grid points including both ends.
/// Each cell is integrated with 3-point Gauss–Legendre; H(-1) = 0 exactly.
/// Throws ValidationFailed when |H(1)| > tol·max|H| (nonzero average).
std::vector<double> cumulative_load(const Grid& grid, const TimeProfile& load, double t, double tol = 1e-8);

/// σ = H², sampled on grid nodes through cumulative_load.
TimeProfile load_to_sigma(const Grid& grid, const ATParams& params);

/// Phase field and displacement at one time. Every vector has n + 2 entries
/// (both end points included); z vanishes at the ends and u(-1) = 0.
struct CoupledState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> z;
    std::vector<double> u;
    std::vector<double> u_x;
    std::vector<double> sigma;
};

/// u_x = -H/(z² + δ) and u by cumulative trapezoid from u(-1) = 0.
CoupledState recover_displacement(const Grid& grid, const Field& z, const ATParams& params, double t);

/// ½∫(z² + δ)u_x² + (ε/2)∫z_x² + (1/2ε)∫(1 - z)² by the trapezoid rule.
double at_energy(const Grid& grid, const CoupledState& state, const ATParams& params);

/// Grid on (-1, 1) with Dirichlet ends, as used by fracture runs.
Grid fracture_grid(std::size_t n);

/// Discrete solution of -z'' + (z - 1)/ε² = 0 with z = 0 at the ends.
Field fracture_equilibrium(const Grid& grid, double eps);

/// The evolution problem λ = f = 1/ε², σ = H², γ = γ_AT.
ProblemData fracture_problem(const Grid& grid, const ATParams& params, const Field& z0, double T);

struct FractureRun {
    ProblemData data;
    Nonlinearity nl;
    Trajectory trajectory;
    std::vector<CoupledState> displacement;  ///< one per stored stamp
    std::vector<double> at_energy;
};

/// Validates, runs the evolution and recovers u at every stamp. z0 defaults to
/// fracture_equilibrium. On a failed coercivity check the error message states
/// the load scale that would be admissible.
FractureRun run_fracture(const ATParams& params, const Grid& grid, std::optional<Field> z0, double T,
                         std::size_t m, const EvolutionOptions& opts = {});

/// Max over stamps and interior nodes of |σγ(z) - z·u_x²/ε| with u recovered from z.
CheckVerdict check_fracture_consistency(const FractureRun& run, const ATParams& params, double tol = 1e-10);

}  // namespace irrev

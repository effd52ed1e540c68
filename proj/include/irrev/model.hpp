#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "irrev/expression.hpp"
#include "irrev/grid.hpp"

namespace irrev {

using ScalarFn = std::function<double(double)>;

/// The reaction nonlinearity γ with its primitive γ̂ (γ̂(0) = 0) and derivative.
///
/// L is the one-sided Lipschitz constant: (γ(t) - γ(s))(t - s) + L|t - s|² ≥ 0.
/// C1 is the linear growth constant: |γ(s)| ≤ C1(|s| + 1).
struct Nonlinearity {
    std::string name;
    ScalarFn gamma;
    ScalarFn gamma_hat;
    ScalarFn gamma_prime;
    double L = 0.0;
    double C1 = 1.0;
    /// False when L was estimated by sampling rather than known in closed form.
    bool certified = true;

    static Nonlinearity zero();
    static Nonlinearity linear(double slope);
    /// γ(s) = amplitude·sin(s).
    static Nonlinearity sine(double amplitude);
    /// γ̂ by composite Gauss–Legendre quadrature, γ' by centered differences.
    /// A negative L requests a sampled (non-certified) estimate over [-range, range].
    static Nonlinearity from_expression(const Expression& gamma, double L, double C1,
                                        double range = 10.0);
};

/// max(0, -min γ') over a uniform sample of [lo, hi].
double estimate_one_sided_lipschitz(const ScalarFn& gamma_prime, double lo, double hi,
                                    std::size_t samples);

/// Sampled surrogates of the structural hypotheses on γ.
struct NonlinearityReport {
    double lipschitz_margin;   ///< min over pairs of (γ(t)-γ(s))/(t-s) + L; must be ≥ 0
    double growth_excess;      ///< max over samples of |γ(s)| - C1(|s|+1); must be ≤ 0
    double primitive_error;    ///< max |γ̂(s) - ∫₀ˢ γ| at spot checks
};
NonlinearityReport check_nonlinearity(const Nonlinearity& nl, double range, std::size_t samples,
                                      std::uint64_t seed);

/// Space-time data profile g(x, t) with its time derivative.
///
/// When no analytic ∂ₜg is supplied, a centered difference with step
/// 1e-6·max(1, |t|) is used. Evaluators must be pure.
class TimeProfile {
public:
    using Fn = std::function<double(double, double)>;
    using NodalFn = std::function<Field(const Grid&, double)>;

    TimeProfile();
    explicit TimeProfile(Fn value, Fn dt = {}, std::string name = {});

    static TimeProfile constant(double c);
    static TimeProfile from_expression(const Expression& value,
                                       std::optional<Expression> dt = std::nullopt);
    /// Profile whose nodal samples come from a dedicated routine; the pointwise
    /// evaluator is still required for off-grid use.
    static TimeProfile with_nodal(Fn value, NodalFn nodal, std::string name = {});

    double operator()(double x, double t) const { return value_(x, t); }
    double dt(double x, double t) const;
    bool has_analytic_dt() const { return static_cast<bool>(dt_); }
    const std::string& name() const { return name_; }

    /// Values at the interior nodes; throws NonFiniteValue naming the location.
    Field sample(const Grid& grid, double t) const;
    Field sample_dt(const Grid& grid, double t) const;

private:
    Fn value_;
    Fn dt_;
    NodalFn nodal_;
    std::string name_;
};

/// True when the nodal samples at `samples` + 1 uniform times in [0, T] agree with
/// those at t = 0 to 1e-14 relative.
bool is_time_independent(const TimeProfile& p, const Grid& grid, double T, std::size_t samples = 64);

/// Finite-difference step used for missing time derivatives.
inline double fd_time_step(double t) { return 1e-6 * std::max(1.0, t < 0 ? -t : t); }

/// The continuum problem: ∂I(∂ₜz) - Δz + λz + σγ(z) ∋ f on the grid's interval.
struct ProblemData {
    Grid grid;
    double lambda = 0.0;
    TimeProfile sigma;
    TimeProfile f;
    Field z0;
    double T = 1.0;
    /// Lower envelope f̃ ≤ f; the default envelope is used when absent.
    std::optional<Field> f_tilde;
};

struct CheckItem {
    std::string name;
    std::string hypothesis;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    double lambda0 = 0.0;
    double sigma_sup = 0.0;
    double admissibility_residual = 0.0;
    bool lipschitz_certified = true;
    std::vector<CheckItem> items;

    bool all_pass() const;
    const CheckItem* find(const std::string& name) const;
};

struct ValidationOptions {
    double tol_admiss = 1e-9;
    std::size_t time_samples = 64;
    double gamma_range = 10.0;
    std::size_t gamma_samples = 4000;
    std::uint64_t seed = 7;
};

/// Checks the existence hypotheses on sampled data. Never throws on a failed
/// check; every item carries its own verdict.
ValidationReport validate(const ProblemData& data, const Nonlinearity& nl,
                          const ValidationOptions& opts = {});

/// Time averages of f and σ over each step interval.
///
/// Index 0 holds f(·,0), σ(·,0); index k = 1..m holds the average over (t_{k-1}, t_k].
struct DiscretizedData {
    std::size_t m = 0;
    double tau = 0.0;
    std::vector<double> times;
    std::vector<Field> f;
    std::vector<Field> sigma;
};

/// Composite midpoint averages with quad_pts subintervals per step.
DiscretizedData discretize_time(const ProblemData& data, std::size_t m, std::size_t quad_pts = 8);

/// f̃(x) = f(x,0) - ∫₀ᵀ |∂ₜf(x,s)| ds by composite 3-point Gauss–Legendre quadrature.
Field lower_envelope_default(const ProblemData& data, std::size_t panels = 4096);

}  // namespace irrev

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "irrev/evolution.hpp"
#include "irrev/grid.hpp"
#include "irrev/model.hpp"
#include "irrev/obstacle.hpp"

namespace irrev::testing {

/// Owns the fields that a StepProblem views.
struct StepInstance {
    Grid grid;
    Field obstacle;
    Field load;
    Field sigma;
    double lambda;
    Nonlinearity nl;

    StepProblem view() const { return {grid, obstacle, load, sigma, lambda, nl}; }
};

inline Field random_field(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Field f(n);
    for (double& v : f) v = u(rng);
    return f;
}

/// Random obstacle step with a sine nonlinearity and λ₀ ≥ 0.5.
inline StepInstance random_step(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Boundary left = u(rng) < 0.3 ? Boundary::Neumann : Boundary::Dirichlet;
    const Boundary right = u(rng) < 0.3 ? Boundary::Neumann : Boundary::Dirichlet;
    const double len = 0.5 + 1.5 * u(rng);
    Grid grid(0.0, len, n, left, right);
    const double amp = 0.5 + u(rng);
    Nonlinearity nl = Nonlinearity::sine(amp);
    Field sigma = random_field(rng, n, 0.0, 1.0);
    const double lambda = amp * 1.0 + 0.5 + 2.0 * u(rng);
    const double scale = 1.0 / (grid.h() * grid.h());
    Field obstacle = random_field(rng, n, -0.5, 1.0);
    Field load = random_field(rng, n, -scale, scale);
    return {grid, obstacle, load, sigma, lambda, nl};
}

/// Smooth time-varying instance on [0, 1]: f = 2 + 0.5 sin(πx) - 3t·(1 + x), σ = 0.3(1 + t x),
/// γ = 0.8 sin, z0 the equilibrium of the data at t = 0.
inline ProblemData smooth_instance(std::size_t n, const Nonlinearity& nl) {
    Grid grid(0.0, 1.0, n);
    TimeProfile f([](double x, double t) { return 2.0 + 0.5 * std::sin(M_PI * x) - 3.0 * t * (1.0 + x); },
                  [](double x, double) { return -3.0 * (1.0 + x); });
    TimeProfile sigma([](double x, double t) { return 0.3 * (1.0 + t * x); },
                      [](double x, double) { return 0.3 * x; });
    ProblemData d{grid, 2.0, sigma, f, {}, 1.0, std::nullopt};
    d.z0 = solve_unconstrained(grid, f.sample(grid, 0.0), sigma.sample(grid, 0.0), d.lambda, nl);
    return d;
}

inline Nonlinearity smooth_nonlinearity() { return Nonlinearity::sine(0.8); }

}  // namespace irrev::testing

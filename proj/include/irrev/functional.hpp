#pragma once

#include <span>

#include "irrev/grid.hpp"
#include "irrev/model.hpp"

namespace irrev {

/// -Δu + λu + σγ(u), nodewise.
Field elliptic_operator(const Grid& grid, std::span<const double> u, std::span<const double> sigma,
                        double lambda, const Nonlinearity& nl);

/// G(u) = -Δu + λu + σγ(u) - f. This is also the gradient of the step
/// functional with respect to the h-weighted inner product.
Field step_residual(const Grid& grid, std::span<const double> u, std::span<const double> load,
                    std::span<const double> sigma, double lambda, const Nonlinearity& nl);

/// ½‖D⁺u‖² + (λ/2)‖u‖² + h·Σ σ_i γ̂(u_i) - (f, u) with frozen nodal data.
///
/// Both the step functional J_k (data f_k, σ_k) and the energy at time t
/// (data f(·,t), σ(·,t)) are evaluated through this single routine.
double frozen_energy(const Grid& grid, std::span<const double> u, std::span<const double> load,
                     std::span<const double> sigma, double lambda, const Nonlinearity& nl);

/// The step functional J_k(u).
inline double step_functional(const Grid& grid, std::span<const double> u,
                              std::span<const double> f_k, std::span<const double> sigma_k,
                              double lambda, const Nonlinearity& nl) {
    return frozen_energy(grid, u, f_k, sigma_k, lambda, nl);
}

/// The energy E(u, t) of the continuum data sampled at the grid nodes.
double energy(const Grid& grid, const ProblemData& data, const Nonlinearity& nl,
              std::span<const double> u, double t);

}  // namespace irrev

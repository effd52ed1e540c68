#include "irrev/functional.hpp"

namespace irrev {

Field elliptic_operator(const Grid& grid, std::span<const double> u, std::span<const double> sigma,
                        double lambda, const Nonlinearity& nl) {
    grid.check(sigma, "sigma");
    Field w = neg_laplacian(grid, u);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += lambda * u[i] + sigma[i] * nl.gamma(u[i]);
    return w;
}

Field step_residual(const Grid& grid, std::span<const double> u, std::span<const double> load,
                    std::span<const double> sigma, double lambda, const Nonlinearity& nl) {
    grid.check(load, "load");
    Field w = elliptic_operator(grid, u, sigma, lambda, nl);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= load[i];
    return w;
}

double frozen_energy(const Grid& grid, std::span<const double> u, std::span<const double> load,
                     std::span<const double> sigma, double lambda, const Nonlinearity& nl) {
    grid.check(u, "u");
    grid.check(load, "load");
    grid.check(sigma, "sigma");
    double reaction = 0.0;
    double work = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        reaction += sigma[i] * nl.gamma_hat(u[i]);
        work += load[i] * u[i];
        mass += u[i] * u[i];
    }
    const double h = grid.h();
    return 0.5 * gradient_energy(grid, u) + 0.5 * lambda * h * mass + h * reaction - h * work;
}

double energy(const Grid& grid, const ProblemData& data, const Nonlinearity& nl,
              std::span<const double> u, double t) {
    const Field f = data.f.sample(grid, t);
    const Field s = data.sigma.sample(grid, t);
    return frozen_energy(grid, u, f, s, data.lambda, nl);
}

}  // namespace irrev

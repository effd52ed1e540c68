#pragma once

#include <span>
#include <vector>

namespace irrev {

/// Thomas algorithm for a tridiagonal system. lower[0] and upper[n-1] are ignored.
/// Intended for the diagonally dominant M-matrices assembled by the solvers; no pivoting.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

}  // namespace irrev

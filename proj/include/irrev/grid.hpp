#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace irrev {

enum class Boundary { Dirichlet, Neumann };

/// Nodal values at the interior nodes of a Grid.
using Field = std::vector<double>;

/// Uniform mesh of the interval [a, b].
///
/// Only the n interior nodes x_i = a + (i + 1) h, i = 0..n-1, carry unknowns.
/// A Dirichlet end holds the value 0; a Neumann end is realized through a
/// mirror ghost equal to the adjacent interior value.
class Grid {
public:
    Grid(double a, double b, std::size_t n, Boundary left = Boundary::Dirichlet,
         Boundary right = Boundary::Dirichlet);

    double a() const { return a_; }
    double b() const { return b_; }
    std::size_t n() const { return n_; }
    double h() const { return h_; }
    Boundary left() const { return left_; }
    Boundary right() const { return right_; }

    /// True when at least one end is Dirichlet, so that -Δ alone is coercive.
    bool pinned() const { return left_ == Boundary::Dirichlet || right_ == Boundary::Dirichlet; }

    double node(std::size_t i) const { return a_ + static_cast<double>(i + 1) * h_; }
    Field nodes() const;

    /// Throws GridMismatch unless u has one value per interior node.
    void check(std::span<const double> u, const char* what = "field") const;

    bool operator==(const Grid&) const = default;

private:
    double a_;
    double b_;
    std::size_t n_;
    double h_;
    Boundary left_;
    Boundary right_;
};

/// Coefficients of row i of the discrete -Δ (times h²): lower, diagonal, upper.
struct StencilRow {
    double lower;
    double diag;
    double upper;
};
StencilRow laplacian_row(const Grid& grid, std::size_t i);

Field neg_laplacian(const Grid& grid, std::span<const double> u);

/// n + 1 forward differences (u_{i+1} - u_i)/h including both boundary ghosts.
std::vector<double> forward_differences(const Grid& grid, std::span<const double> u);

double inner_l2(const Grid& grid, std::span<const double> u, std::span<const double> v);
double norm_l2(const Grid& grid, std::span<const double> u);

/// h·Σ (D⁺u)², equal to inner_l2(neg_laplacian(u), u).
double gradient_energy(const Grid& grid, std::span<const double> u);

/// Discrete H¹ norm sqrt(‖D⁺u‖² + ‖u‖²).
double norm_v(const Grid& grid, std::span<const double> u);

double norm_max(std::span<const double> u);

Field difference(std::span<const double> u, std::span<const double> v);

/// Piecewise-linear transfer of a field between two grids on the same interval,
/// honoring the boundary convention of the source grid.
Field transfer(const Grid& from, std::span<const double> u, const Grid& to);

}  // namespace irrev

#include "irrev/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "irrev/error.hpp"

namespace irrev {

Grid::Grid(double a, double b, std::size_t n, Boundary left, Boundary right)
    : a_(a), b_(b), n_(n), h_(0.0), left_(left), right_(right) {
    if (n == 0) throw ConfigError("grid needs at least one interior node");
    if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
        throw ConfigError("grid interval must satisfy a < b");
    h_ = (b - a) / static_cast<double>(n + 1);
}

Field Grid::nodes() const {
    Field x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
    return x;
}

void Grid::check(std::span<const double> u, const char* what) const {
    if (u.size() != n_)
        throw GridMismatch(std::string(what) + " has " + std::to_string(u.size()) +
                           " values, grid has " + std::to_string(n_) + " nodes");
}

StencilRow laplacian_row(const Grid& grid, std::size_t i) {
    const std::size_t n = grid.n();
    StencilRow row{-1.0, 2.0, -1.0};
    if (i == 0) {
        row.lower = 0.0;
        if (grid.left() == Boundary::Neumann) row.diag -= 1.0;
    }
    if (i + 1 == n) {
        row.upper = 0.0;
        if (grid.right() == Boundary::Neumann) row.diag -= 1.0;
    }
    return row;
}

Field neg_laplacian(const Grid& grid, std::span<const double> u) {
    grid.check(u);
    const std::size_t n = grid.n();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    Field w(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Ghost values: 0 beyond a Dirichlet end, mirror of u beyond a Neumann end.
        const double left = i > 0 ? u[i - 1] : (grid.left() == Boundary::Neumann ? u[0] : 0.0);
        const double right =
            i + 1 < n ? u[i + 1] : (grid.right() == Boundary::Neumann ? u[n - 1] : 0.0);
        w[i] = (-left + 2.0 * u[i] - right) * inv_h2;
    }
    return w;
}

std::vector<double> forward_differences(const Grid& grid, std::span<const double> u) {
    grid.check(u);
    const std::size_t n = grid.n();
    std::vector<double> d(n + 1);
    const double left = grid.left() == Boundary::Neumann ? u[0] : 0.0;
    const double right = grid.right() == Boundary::Neumann ? u[n - 1] : 0.0;
    d[0] = (u[0] - left) / grid.h();
    for (std::size_t i = 1; i < n; ++i) d[i] = (u[i] - u[i - 1]) / grid.h();
    d[n] = (right - u[n - 1]) / grid.h();
    return d;
}

double inner_l2(const Grid& grid, std::span<const double> u, std::span<const double> v) {
    grid.check(u);
    grid.check(v);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return grid.h() * s;
}

double norm_l2(const Grid& grid, std::span<const double> u) {
    return std::sqrt(inner_l2(grid, u, u));
}

double gradient_energy(const Grid& grid, std::span<const double> u) {
    double s = 0.0;
    for (double d : forward_differences(grid, u)) s += d * d;
    return grid.h() * s;
}

double norm_v(const Grid& grid, std::span<const double> u) {
    return std::sqrt(gradient_energy(grid, u) + inner_l2(grid, u, u));
}

double norm_max(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

Field difference(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw GridMismatch("difference of fields of unequal size");
    Field d(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - v[i];
    return d;
}

Field transfer(const Grid& from, std::span<const double> u, const Grid& to) {
    from.check(u);
    if (from.a() != to.a() || from.b() != to.b())
        throw GridMismatch("transfer between grids on different intervals");
    const std::size_t n = from.n();
    // Extended node list including the two endpoint values.
    std::vector<double> xs(n + 2), vs(n + 2);
    xs[0] = from.a();
    vs[0] = from.left() == Boundary::Neumann ? u[0] : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i + 1] = from.node(i);
        vs[i + 1] = u[i];
    }
    xs[n + 1] = from.b();
    vs[n + 1] = from.right() == Boundary::Neumann ? u[n - 1] : 0.0;

    Field out(to.n());
    for (std::size_t j = 0; j < to.n(); ++j) {
        const double x = to.node(j);
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            std::distance(xs.begin(), it), 1, static_cast<std::ptrdiff_t>(n + 1)));
        const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        out[j] = (1.0 - w) * vs[k - 1] + w * vs[k];
    }
    return out;
}

}  // namespace irrev

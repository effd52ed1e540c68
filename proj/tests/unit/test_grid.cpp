#include <doctest.h>

#include <cmath>
#include <random>

#include "irrev/error.hpp"
#include "irrev/grid.hpp"
#include "irrev/tridiag.hpp"
#include "support/instances.hpp"

using namespace irrev;

TEST_CASE("grid geometry") {
    Grid g(0.0, 1.0, 4);
    CHECK(g.h() == doctest::Approx(0.2));
    CHECK(g.node(0) == doctest::Approx(0.2));
    CHECK(g.node(3) == doctest::Approx(0.8));
    CHECK(g.pinned());
    CHECK_FALSE(Grid(0.0, 1.0, 3, Boundary::Neumann, Boundary::Neumann).pinned());
    CHECK_THROWS_AS(Grid(1.0, 0.0, 3), Error);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 0), Error);
    CHECK_THROWS_AS(g.check(Field(3)), GridMismatch);
}

TEST_CASE("negative laplacian stencil") {
    SUBCASE("zero field") {
        Grid g(0.0, 1.0, 5);
        for (double v : neg_laplacian(g, Field(5, 0.0))) CHECK(v == 0.0);
    }
    SUBCASE("single node with Dirichlet ends") {
        Grid g(0.0, 2.0, 1);
        REQUIRE(g.h() == 1.0);
        CHECK(neg_laplacian(g, Field{1.0})[0] == 2.0);
    }
    SUBCASE("mirror ghost at a Neumann end") {
        Grid g(0.0, 0.8, 3, Boundary::Neumann, Boundary::Dirichlet);
        const double h = g.h();
        const Field w = neg_laplacian(g, Field{1.0, 1.0, 1.0});
        CHECK(w[0] == doctest::Approx(0.0));
        CHECK(w[1] == doctest::Approx(0.0));
        CHECK(w[2] == doctest::Approx(1.0 / (h * h)));
    }
    CHECK_THROWS_AS(neg_laplacian(Grid(0.0, 1.0, 3), Field(4)), GridMismatch);
}

TEST_CASE("inner product and norms") {
    CHECK(inner_l2(Grid(0.0, 2.5, 4), Field(4, 1.0), Field(4, 1.0)) == doctest::Approx(2.0));
    CHECK(inner_l2(Grid(0.0, 3.0, 2), Field{1.0, 2.0}, Field{3.0, 4.0}) == doctest::Approx(11.0));
    CHECK(inner_l2(Grid(0.0, 1.0, 3), Field(3, 0.0), Field{1.0, 2.0, 3.0}) == 0.0);
    CHECK(norm_v(Grid(0.0, 1.0, 3), Field(3, 0.0)) == 0.0);
    CHECK(norm_v(Grid(0.0, 2.0, 1), Field{1.0}) == doctest::Approx(std::sqrt(3.0)));
    CHECK(norm_max(Field{-3.0, 2.0}) == 3.0);

    std::mt19937_64 rng(3);
    Grid g(-1.0, 2.0, 17, Boundary::Neumann, Boundary::Dirichlet);
    const Field u = testing::random_field(rng, g.n(), -1.0, 1.0);
    Field cu = u;
    for (double& v : cu) v *= 2.5;
    CHECK(norm_v(g, cu) == doctest::Approx(2.5 * norm_v(g, u)).epsilon(1e-14));
}

TEST_CASE("laplacian is symmetric and positive semidefinite") {
    std::mt19937_64 rng(11);
    for (Boundary l : {Boundary::Dirichlet, Boundary::Neumann}) {
        for (Boundary r : {Boundary::Dirichlet, Boundary::Neumann}) {
            Grid g(0.0, 1.3, 23, l, r);
            for (int trial = 0; trial < 20; ++trial) {
                const Field u = testing::random_field(rng, g.n(), -1.0, 1.0);
                const Field v = testing::random_field(rng, g.n(), -1.0, 1.0);
                const double lhs = inner_l2(g, neg_laplacian(g, u), v);
                const double rhs = inner_l2(g, u, neg_laplacian(g, v));
                CHECK(std::abs(lhs - rhs) <= 1e-12 * norm_l2(g, u) * norm_l2(g, v) / (g.h() * g.h()));
                const double q = inner_l2(g, neg_laplacian(g, u), u);
                CHECK(q >= -1e-12);
                CHECK(q == doctest::Approx(gradient_energy(g, u)).epsilon(1e-12));
                if (g.pinned()) CHECK(q > 0.0);
            }
        }
    }
}

TEST_CASE("Rayleigh quotient of the sine mode converges at second order") {
    double prev_err = 0.0;
    for (std::size_t n : {15u, 31u, 63u, 127u}) {
        Grid g(0.0, 1.0, n);
        Field u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(M_PI * g.node(i));
        const double rq = inner_l2(g, neg_laplacian(g, u), u) / inner_l2(g, u, u);
        const double err = std::abs(rq - M_PI * M_PI);
        if (prev_err > 0.0) CHECK(std::log2(prev_err / err) == doctest::Approx(2.0).epsilon(0.05));
        prev_err = err;
    }
}

TEST_CASE("forward differences include both ghosts") {
    Grid g(0.0, 2.0, 1);
    const auto d = forward_differences(g, Field{1.0});
    REQUIRE(d.size() == 2);
    CHECK(d[0] == 1.0);
    CHECK(d[1] == -1.0);
    Grid gn(0.0, 3.0, 2, Boundary::Neumann, Boundary::Neumann);
    const auto dn = forward_differences(gn, Field{1.0, 3.0});
    CHECK(dn[0] == 0.0);
    CHECK(dn[1] == 2.0);
    CHECK(dn[2] == 0.0);
}

TEST_CASE("transfer reproduces piecewise-linear data") {
    Grid coarse(0.0, 1.0, 9);
    Grid fine(0.0, 1.0, 19);
    Field u(coarse.n());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = coarse.node(i) * (1.0 - coarse.node(i));
    const Field back = transfer(fine, transfer(coarse, u, fine), coarse);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-14));
    CHECK_THROWS_AS(transfer(coarse, u, Grid(0.0, 2.0, 5)), GridMismatch);
}

TEST_CASE("tridiagonal solver against a dense product") {
    std::mt19937_64 rng(5);
    const std::size_t n = 12;
    const Field lower = testing::random_field(rng, n, -1.0, 0.0);
    const Field upper = testing::random_field(rng, n, -1.0, 0.0);
    Field diag = testing::random_field(rng, n, 3.0, 4.0);
    const Field x = testing::random_field(rng, n, -2.0, 2.0);
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i)
        rhs[i] = diag[i] * x[i] + (i > 0 ? lower[i] * x[i - 1] : 0.0) + (i + 1 < n ? upper[i] * x[i + 1] : 0.0);
    const Field y = solve_tridiagonal(lower, diag, upper, rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-13));
}

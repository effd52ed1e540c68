#include <doctest.h>

#include <cmath>

#include "irrev/diagnostics.hpp"
#include "irrev/evolution.hpp"
#include "support/instances.hpp"

using namespace irrev;

namespace {

ProblemData scalar_two_step() {
    const Expression f = Expression::parse("-3*step(t - 0.5)");
    ProblemData d{Grid(0.0, 2.0, 1), 1.0, TimeProfile::constant(0.0), TimeProfile::from_expression(f),
                  Field{0.0}, 1.0, Field{-3.0}};
    return d;
}

ProblemData stationary_instance(std::size_t n) {
    const Nonlinearity nl = testing::smooth_nonlinearity();
    Grid g(0.0, 1.0, n, Boundary::Neumann, Boundary::Dirichlet);
    TimeProfile f([](double x, double) { return 1.0 + std::cos(2.0 * x); }, [](double, double) { return 0.0; });
    TimeProfile s([](double x, double) { return 0.5 * x; }, [](double, double) { return 0.0; });
    ProblemData d{g, 1.0, s, f, {}, 1.0, std::nullopt};
    d.z0 = solve_unconstrained(g, f.sample(g, 0.0), s.sample(g, 0.0), d.lambda, nl);
    return d;
}

}  // namespace

TEST_CASE("stationary data produce no evolution") {
    const ProblemData d = stationary_instance(101);
    const Trajectory t = run_evolution(d, testing::smooth_nonlinearity(), 100);
    REQUIRE(t.steps() == 100);
    CHECK(t.tau == doctest::Approx(0.01));
    for (const Field& z : t.z) CHECK(norm_max(difference(z, d.z0)) <= 1e-10);
    CHECK(check_no_evolution(t).pass);
}

TEST_CASE("zero data stay at zero") {
    ProblemData d{Grid(0.0, 1.0, 7), 1.0, TimeProfile::constant(0.0), TimeProfile::constant(0.0), Field(7, 0.0), 1.0,
                  std::nullopt};
    const Trajectory t = run_evolution(d, Nonlinearity::zero(), 5);
    for (const Field& z : t.z)
        for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("scalar two-step trajectory") {
    const ProblemData d = scalar_two_step();
    const Trajectory t = run_evolution(d, Nonlinearity::zero(), 2);
    REQUIRE(t.steps() == 2);
    CHECK(std::abs(t.z[1][0]) <= 1e-12);
    CHECK(t.z[2][0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(t.eta[0][0] == 0.0);
    CHECK(t.energy[0] == 0.0);
    CHECK(t.energy[2] == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(t.meta[2].active_count == 0);
}

TEST_CASE("interpolants") {
    const ProblemData d = testing::smooth_instance(21, testing::smooth_nonlinearity());
    const Trajectory t = run_evolution(d, testing::smooth_nonlinearity(), 8);
    const double tau = t.tau;
    for (std::size_t k = 1; k <= t.steps(); ++k) {
        CHECK(interp_linear(t, t.times[k]) == t.z[k]);
        CHECK(interp_constant(t, t.times[k]) == t.z[k]);
        CHECK(interp_constant(t, t.times[k] - tau / 3.0) == t.z[k]);
        const Field mid = interp_linear(t, 0.5 * (t.times[k - 1] + t.times[k]));
        for (std::size_t i = 0; i < mid.size(); ++i)
            CHECK(mid[i] == doctest::Approx(0.5 * (t.z[k - 1][i] + t.z[k][i])).epsilon(1e-14));
    }
    CHECK(interp_linear(t, 0.0) == d.z0);
    CHECK(interp_constant(t, 0.0) == d.z0);
    CHECK_THROWS_AS(interp_linear(t, 1.5), OutOfRange);
    CHECK_THROWS_AS(interp_constant(t, -0.1), OutOfRange);

    double max_inc = 0.0;
    for (std::size_t k = 1; k <= t.steps(); ++k)
        max_inc = std::max(max_inc, norm_v(t.grid, difference(t.z[k], t.z[k - 1])));
    Field prev = interp_linear(t, 0.0);
    for (int j = 1; j <= 97; ++j) {
        const double s = static_cast<double>(j) / 97.0;
        const Field cur = interp_linear(t, s);
        for (std::size_t i = 0; i < cur.size(); ++i) CHECK(cur[i] <= prev[i] + 1e-14);
        CHECK(norm_v(t.grid, difference(cur, interp_constant(t, s))) <= max_inc + 1e-14);
        prev = cur;
    }
}

TEST_CASE("norm stays bounded under time refinement") {
    const Nonlinearity nl = testing::smooth_nonlinearity();
    const ProblemData d = testing::smooth_instance(41, nl);
    double prev = 0.0;
    for (std::size_t m : {10u, 20u, 40u}) {
        const Trajectory t = run_evolution(d, nl, m);
        double mx = 0.0;
        for (const Field& z : t.z) mx = std::max(mx, norm_v(t.grid, z));
        if (prev > 0.0) CHECK(mx <= 1.05 * prev);
        prev = mx;
    }
}

TEST_CASE("invalid data are rejected before any step") {
    ProblemData d{Grid(0.0, 1.0, 5), 1.0, TimeProfile::constant(0.0), TimeProfile::constant(-1.0), Field(5, 0.0),
                  1.0, std::nullopt};
    CHECK_THROWS_AS(run_evolution(d, Nonlinearity::zero(), 3), ValidationFailed);
    EvolutionOptions loose;
    loose.enforce = Enforcement::CoercivityOnly;
    CHECK_NOTHROW(run_evolution(d, Nonlinearity::zero(), 3, loose));
    ProblemData bad = d;
    bad.sigma = TimeProfile::constant(1.0);
    CHECK_THROWS_AS(run_evolution(bad, Nonlinearity::linear(-2.0), 3, loose), ValidationFailed);
}

TEST_CASE("a failing step returns the partial trajectory") {
    ProblemData d{Grid(0.0, 1.0, 4), 2.0, TimeProfile([](double, double t) { return t; }, [](double, double) { return 1.0; }),
                  TimeProfile::constant(0.0), Field(4, 0.0), 1.0, std::nullopt};
    EvolutionOptions o;
    o.solver.coercivity_margin = 1.5;
    try {
        run_evolution(d, Nonlinearity::linear(-1.0), 4, o);
        FAIL("expected an evolution error");
    } catch (const EvolutionError& e) {
        CHECK(e.step() == 3);
        CHECK(e.kind() == SolverFailure::CoercivityLost);
        CHECK(e.partial().z.size() == 3);
        CHECK(e.partial().energy.size() == 3);
    }
}

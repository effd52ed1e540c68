#include <doctest.h>

#include <cmath>
#include <random>

#include "irrev/diagnostics.hpp"
#include "irrev/functional.hpp"
#include "support/instances.hpp"

using namespace irrev;

namespace {

ProblemData linear_ramp(std::size_t n) {
    Grid g(0.0, 1.0, n);
    TimeProfile f([](double x, double t) { return 4.0 * std::sin(M_PI * x) * (1.0 - 2.0 * t); },
                  [](double x, double) { return -8.0 * std::sin(M_PI * x); });
    ProblemData d{g, 1.0, TimeProfile::constant(0.0), f, {}, 1.0, std::nullopt};
    d.z0 = solve_unconstrained(g, f.sample(g, 0.0), Field(n, 0.0), 1.0, Nonlinearity::zero());
    return d;
}

ProblemData constant_data(std::size_t n) {
    const Nonlinearity nl = testing::smooth_nonlinearity();
    Grid g(0.0, 1.0, n);
    ProblemData d{g, 1.5, TimeProfile::constant(0.4), TimeProfile::constant(2.0), {}, 1.0, std::nullopt};
    d.z0 = solve_unconstrained(g, Field(n, 2.0), Field(n, 0.4), 1.5, nl);
    return d;
}

}  // namespace

TEST_CASE("energy by hand and agreement with the step functional") {
    ProblemData d{Grid(0.0, 2.0, 1), 1.0, TimeProfile::constant(0.0), TimeProfile::constant(3.0), Field{0.0}, 1.0,
                  std::nullopt};
    CHECK(energy(d.grid, d, Nonlinearity::zero(), Field{0.0}, 0.3) == 0.0);
    CHECK(energy(d.grid, d, Nonlinearity::zero(), Field{1.0}, 0.3) == doctest::Approx(-1.5));

    const Nonlinearity nl = testing::smooth_nonlinearity();
    const ProblemData s = testing::smooth_instance(15, nl);
    const Field u = s.z0;
    const double t = 0.37;
    CHECK(energy(s.grid, s, nl, u, t) ==
          step_functional(s.grid, u, s.f.sample(s.grid, t), s.sigma.sample(s.grid, t), s.lambda, nl));
}

TEST_CASE("balance residual") {
    SUBCASE("stationary data cancel exactly") {
        const ProblemData d = constant_data(51);
        const Trajectory t = run_evolution(d, testing::smooth_nonlinearity(), 20);
        const EnergyReport r = balance_residual(t, d, testing::smooth_nonlinearity());
        CHECK(r.residual.size() == 20);
        CHECK(r.max_abs_residual <= 1e-10);
        CHECK_FALSE(r.derivative_fallback);
    }
    SUBCASE("scalar two-step ledger") {
        ProblemData d{Grid(0.0, 2.0, 1), 1.0, TimeProfile::constant(0.0),
                      TimeProfile::from_expression(Expression::parse("-3*step(t - 0.5)")), Field{0.0}, 1.0, Field{-3.0}};
        const Trajectory t = run_evolution(d, Nonlinearity::zero(), 2);
        const EnergyReport r = balance_residual(t, d, Nonlinearity::zero());
        CHECK(r.derivative_fallback);
        // The jump of f falls between quadrature nodes: the power term vanishes and the
        // residual equals the energy drop E(z_2, 1) - E(z_1, 1/2) = -1.5 - 0.
        CHECK(std::abs(r.residual[0]) <= 1e-12);
        CHECK(r.residual[1] == doctest::Approx(-1.5).epsilon(1e-12));
    }
    SUBCASE("first-order decay in tau, linear case") {
        const ProblemData d = linear_ramp(101);
        const std::vector<std::size_t> ms{50, 100, 200, 400};
        const BalanceStudy st = balance_order_study(d, Nonlinearity::zero(), ms);
        REQUIRE(st.order.size() == 4);
        CHECK(std::isnan(st.order[0]));
        CHECK(st.min_order >= 0.9);
    }
    CHECK(empirical_order(4.0, 1.0, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("unilateral minimality") {
    const Nonlinearity nl = testing::smooth_nonlinearity();
    SUBCASE("stationary run") {
        const ProblemData d = constant_data(41);
        const Trajectory t = run_evolution(d, nl, 10);
        for (double s : {0.0, 0.3, 1.0}) {
            const CheckVerdict v = check_unilateral_minimality(t, d, nl, s);
            CHECK(v.pass);
            CHECK(v.max_violation <= 1e-10);
        }
        CHECK_THROWS_AS(check_unilateral_minimality(t, d, nl, 0.35), OutOfRange);
    }
    SUBCASE("time-varying run with frozen step data, and fault injection") {
        const ProblemData d = testing::smooth_instance(41, nl);
        const DiscretizedData disc = discretize_time(d, 20);
        const Trajectory t = run_evolution(d, nl, disc);
        MinimalityOptions o;
        o.frozen = &disc;
        for (std::size_t k : {0u, 5u, 10u, 20u}) CHECK(check_unilateral_minimality(t, d, nl, t.times[k], o).pass);

        Trajectory broken = t;
        for (double& v : broken.z[10]) v += 1e-3;
        CHECK_FALSE(check_unilateral_minimality(broken, d, nl, t.times[10], o).pass);
    }
    SUBCASE("deterministic given the seed") {
        const ProblemData d = testing::smooth_instance(21, nl);
        const Trajectory t = run_evolution(d, nl, 5);
        const CheckVerdict a = check_unilateral_minimality(t, d, nl, t.times[3]);
        const CheckVerdict b = check_unilateral_minimality(t, d, nl, t.times[3]);
        CHECK(a.max_violation == b.max_violation);
        CHECK(a.detail == b.detail);
    }
}

TEST_CASE("Lewy-Stampacchia, irreversibility and dissipation on runs") {
    const Nonlinearity nl = testing::smooth_nonlinearity();
    for (std::size_t n : {1u, 9u, 60u}) {
        const ProblemData d = testing::smooth_instance(n, nl);
        const DiscretizedData disc = discretize_time(d, 16);
        const Trajectory t = run_evolution(d, nl, disc);
        CHECK(check_lewy_stampacchia(t, disc, d.lambda, nl).pass);
        CHECK(check_irreversibility(t).pass);
        CHECK(check_dissipation(t, disc, d.lambda, nl).pass);
        CHECK(check_energy_identity(t, d, nl).pass);
    }
    Trajectory up = run_evolution(constant_data(5), nl, 3);
    up.z[2][1] += 1e-6;
    const CheckVerdict v = check_irreversibility(up);
    CHECK_FALSE(v.pass);
    CHECK(v.worst_step == 2);
    CHECK(v.worst_node == 1);
}

TEST_CASE("comparison principle") {
    SUBCASE("scalar ordered loads") {
        ProblemData a{Grid(0.0, 2.0, 1), 1.0, TimeProfile::constant(0.0), TimeProfile::constant(-3.0), Field{-1.0},
                      1.0, std::nullopt};
        ProblemData b = a;
        b.f = TimeProfile::constant(3.0);
        b.z0 = Field{0.0};
        const CheckVerdict v = check_comparison(a, b, Nonlinearity::zero(), 2);
        CHECK(v.applicable);
        CHECK(v.pass);
        CHECK_FALSE(check_comparison(b, a, Nonlinearity::zero(), 2).applicable);
    }
    SUBCASE("identical data") {
        const Nonlinearity nl = testing::smooth_nonlinearity();
        const ProblemData d = testing::smooth_instance(11, nl);
        const CheckVerdict v = check_comparison(d, d, nl, 6);
        CHECK(v.pass);
        CHECK(v.max_violation == 0.0);
    }
    SUBCASE("random monotone pairs") {
        const Nonlinearity nl = testing::smooth_nonlinearity();
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const ProblemData a = testing::smooth_instance(15, nl);
            ProblemData b = a;
            const double amp = 0.5 + static_cast<double>(seed);
            const TimeProfile fa = a.f;
            b.f = TimeProfile([fa, amp](double x, double t) { return fa(x, t) + amp * (1.0 + std::sin(5 * x + t)); });
            b.z0 = solve_unconstrained(b.grid, b.f.sample(b.grid, 0.0), b.sigma.sample(b.grid, 0.0), b.lambda, nl);
            CHECK(check_comparison(a, b, nl, 10).pass);
        }
    }
}

TEST_CASE("refinement studies") {
    SUBCASE("stationary data have zero tau gaps") {
        const ProblemFactory make = [](std::size_t n) { return constant_data(n); };
        const std::vector<std::size_t> ms{5, 10, 20};
        const std::vector<std::size_t> ns{21};
        const RefinementTable tab = refinement_study(make, testing::smooth_nonlinearity(), ms, ns);
        for (const auto& row : tab.rows)
            if (row.study == "tau" && !std::isnan(row.gap_v)) CHECK(row.gap_v <= 1e-10);
    }
    SUBCASE("smooth instance: tau gaps decrease, h rows are reported") {
        const Nonlinearity nl = testing::smooth_nonlinearity();
        const ProblemFactory make = [nl](std::size_t n) { return testing::smooth_instance(n, nl); };
        const std::vector<std::size_t> ms{10, 20, 40, 80};
        const std::vector<std::size_t> ns{11, 23, 47};
        const RefinementTable tab = refinement_study(make, nl, ms, ns);
        CHECK(tab.tau_gaps_decreasing);
        std::size_t h_rows = 0;
        for (const auto& row : tab.rows) {
            if (row.study != "h") continue;
            ++h_rows;
            CHECK(row.m == 10);
            CHECK(std::isfinite(row.balance_sum));
        }
        CHECK(h_rows == 3);
        CHECK(std::isfinite(tab.rows.back().order_estimate));
    }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "irrev/error.hpp"
#include "irrev/model.hpp"

using namespace irrev;

namespace {

ProblemData constant_problem(std::size_t n, double lambda, double sigma, double f) {
    Grid g(0.0, 1.0, n);
    return {g, lambda, TimeProfile::constant(sigma), TimeProfile::constant(f), Field(n, 0.0), 1.0, std::nullopt};
}

}  // namespace

TEST_CASE("nonlinearity presets satisfy their structural constants") {
    for (const Nonlinearity& nl :
         {Nonlinearity::zero(), Nonlinearity::linear(2.0), Nonlinearity::linear(-1.5), Nonlinearity::sine(0.7)}) {
        CHECK(nl.gamma(0.0) == 0.0);
        CHECK(nl.gamma_hat(0.0) == 0.0);
        const NonlinearityReport r = check_nonlinearity(nl, 10.0, 4000, 17);
        CHECK(r.lipschitz_margin >= -1e-9);
        CHECK(r.growth_excess <= 1e-12);
        CHECK(r.primitive_error <= 1e-8);
    }
    CHECK(Nonlinearity::linear(-1.5).L == 1.5);
    CHECK(Nonlinearity::linear(2.0).L == 0.0);
    CHECK(Nonlinearity::sine(0.7).L == doctest::Approx(0.7));
}

TEST_CASE("expression nonlinearity: quadrature primitive and sampled L") {
    const Expression e = Expression::parse("s^3 - s");
    const Nonlinearity nl = Nonlinearity::from_expression(e, -1.0, 1000.0, 2.0);
    CHECK_FALSE(nl.certified);
    CHECK(nl.L == doctest::Approx(1.0).epsilon(1e-6));
    for (double s : {-1.7, -0.3, 0.0, 0.4, 1.9})
        CHECK(nl.gamma_hat(s) == doctest::Approx(s * s * s * s / 4.0 - s * s / 2.0).epsilon(1e-12));
    CHECK(nl.gamma_prime(0.5) == doctest::Approx(3.0 * 0.25 - 1.0).epsilon(1e-8));
    CHECK(estimate_one_sided_lipschitz(nl.gamma_prime, -2.0, 2.0, 2001) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("validate reports every hypothesis") {
    SUBCASE("all-zero data pass") {
        const ValidationReport r = validate(constant_problem(5, 1.0, 0.0, 0.0), Nonlinearity::zero());
        CHECK(r.all_pass());
        CHECK(r.lambda0 == 1.0);
        CHECK(r.admissibility_residual == 0.0);
    }
    SUBCASE("coercivity lost") {
        const ValidationReport r = validate(constant_problem(5, 1.0, 1.0, 0.0), Nonlinearity::linear(-2.0));
        CHECK(r.lambda0 == doctest::Approx(-1.0));
        REQUIRE(r.find("coercivity"));
        CHECK_FALSE(r.find("coercivity")->pass);
        CHECK_FALSE(r.all_pass());
    }
    SUBCASE("inadmissible initial datum") {
        const ValidationReport r = validate(constant_problem(5, 1.0, 0.0, -1.0), Nonlinearity::zero());
        CHECK(r.admissibility_residual == doctest::Approx(1.0));
        REQUIRE(r.find("admissibility"));
        CHECK_FALSE(r.find("admissibility")->pass);
        CHECK(r.find("coercivity")->pass);
    }
    SUBCASE("negative sigma") {
        const ValidationReport r = validate(constant_problem(5, 3.0, -0.5, 0.0), Nonlinearity::sine(1.0));
        CHECK_FALSE(r.find("sigma_nonnegative")->pass);
    }
    SUBCASE("f below a supplied envelope") {
        ProblemData d = constant_problem(4, 1.0, 0.0, 0.0);
        d.f_tilde = Field(4, 0.5);
        CHECK_FALSE(validate(d, Nonlinearity::zero()).find("lower_envelope")->pass);
    }
    SUBCASE("validation is idempotent") {
        const ProblemData d = constant_problem(6, 2.0, 0.3, 0.1);
        const ValidationReport a = validate(d, Nonlinearity::sine(1.0));
        const ValidationReport b = validate(d, Nonlinearity::sine(1.0));
        REQUIRE(a.items.size() == b.items.size());
        for (std::size_t i = 0; i < a.items.size(); ++i) CHECK(a.items[i].value == b.items[i].value);
    }
}

TEST_CASE("time averages") {
    Grid g(0.0, 1.0, 4);
    SUBCASE("constant in time") {
        ProblemData d{g, 1.0, TimeProfile::constant(0.2), TimeProfile::constant(-0.7), Field(4, 0.0), 2.0, std::nullopt};
        for (std::size_t q : {1u, 3u, 8u}) {
            const DiscretizedData disc = discretize_time(d, 5, q);
            for (std::size_t k = 0; k <= 5; ++k)
                for (double v : disc.f[k]) CHECK(v == doctest::Approx(-0.7).epsilon(1e-15));
        }
    }
    SUBCASE("linear in time is exact") {
        ProblemData d{g, 1.0, TimeProfile([](double x, double t) { return x * t; }),
                      TimeProfile([](double, double t) { return t; }), Field(4, 0.0), 1.0, std::nullopt};
        const DiscretizedData disc = discretize_time(d, 2, 3);
        CHECK(disc.tau == 0.5);
        for (double v : disc.f[1]) CHECK(std::abs(v - 0.25) <= 1e-13);
        for (double v : disc.f[2]) CHECK(std::abs(v - 0.75) <= 1e-13);
        for (std::size_t k = 1; k <= 2; ++k)
            for (std::size_t i = 0; i < 4; ++i)
                CHECK(std::abs(disc.sigma[k][i] - g.node(i) * 0.5 * (disc.times[k - 1] + disc.times[k])) <= 1e-13);
        for (double v : disc.f[0]) CHECK(v == 0.0);
    }
    SUBCASE("averages telescope to the time integral") {
        ProblemData d{g, 1.0, TimeProfile::constant(0.0), TimeProfile([](double x, double t) { return std::cos(3 * t + x); }),
                      Field(4, 0.0), 1.5, std::nullopt};
        const DiscretizedData disc = discretize_time(d, 7, 16);
        for (std::size_t i = 0; i < 4; ++i) {
            double sum = 0.0;
            for (std::size_t k = 1; k <= 7; ++k) sum += disc.tau * disc.f[k][i];
            const double x = g.node(i);
            CHECK(sum == doctest::Approx((std::sin(4.5 + x) - std::sin(x)) / 3.0).epsilon(1e-4));
        }
    }
    SUBCASE("non-finite data report the location") {
        ProblemData d{g, 1.0, TimeProfile::constant(0.0), TimeProfile([](double x, double) { return 1.0 / (x - 0.4); }),
                      Field(4, 0.0), 1.0, std::nullopt};
        CHECK_THROWS_AS(discretize_time(d, 2, 1), NonFiniteValue);
    }
}

TEST_CASE("default lower envelope") {
    Grid g(0.0, 1.0, 3);
    SUBCASE("constant") {
        ProblemData d{g, 1.0, TimeProfile::constant(0.0), TimeProfile::constant(2.0), Field(3, 0.0), 1.0, std::nullopt};
        for (double v : lower_envelope_default(d)) CHECK(v == doctest::Approx(2.0));
    }
    SUBCASE("decreasing ramp") {
        ProblemData d{g, 1.0, TimeProfile::constant(0.0),
                      TimeProfile([](double, double t) { return 1.0 - t; }, [](double, double) { return -1.0; }),
                      Field(3, 0.0), 1.0, std::nullopt};
        for (double v : lower_envelope_default(d)) CHECK(std::abs(v) <= 1e-12);
    }
    SUBCASE("sine over half a period") {
        ProblemData d{g, 1.0, TimeProfile::constant(0.0),
                      TimeProfile([](double, double t) { return std::sin(t); }, [](double, double t) { return std::cos(t); }),
                      Field(3, 0.0), M_PI, std::nullopt};
        for (double v : lower_envelope_default(d)) CHECK(v == doctest::Approx(-2.0).epsilon(1e-6));
    }
}

TEST_CASE("time derivative fallback") {
    TimeProfile p([](double x, double t) { return x * t * t; });
    CHECK_FALSE(p.has_analytic_dt());
    CHECK(p.dt(2.0, 3.0) == doctest::Approx(12.0).epsilon(1e-8));
    CHECK(fd_time_step(0.1) == 1e-6);
    CHECK(fd_time_step(-30.0) == doctest::Approx(3e-5));
}

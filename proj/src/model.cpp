#include "irrev/model.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "irrev/error.hpp"
#include "irrev/functional.hpp"

namespace irrev {

namespace {

constexpr std::array<double, 4> kGaussX = {0.1834346424956498, 0.5255324099163290,
                                           0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGaussW = {0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

// ∫₀ˢ g by composite 8-point Gauss–Legendre, panels no wider than 1/8.
double integrate_from_zero(const ScalarFn& g, double s) {
    if (s == 0.0) return 0.0;
    const std::size_t panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(s) * 8.0)));
    const double w = s / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * w;
        double acc = 0.0;
        for (std::size_t j = 0; j < kGaussX.size(); ++j) {
            acc += kGaussW[j] * (g(mid - 0.5 * w * kGaussX[j]) + g(mid + 0.5 * w * kGaussX[j]));
        }
        total += 0.5 * w * acc;
    }
    return total;
}

double simpson(const ScalarFn& g, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = g(lm);
    const double frm = g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const ScalarFn& g, double a, double b, double tol) {
    const double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(g, a, b, fa, fm, fb, whole, tol, 40);
}

void require_finite(double v, const char* what, double x, double t) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << what << " is not finite at x=" << x << ", t=" << t;
        throw NonFiniteValue(os.str());
    }
}

}  // namespace

Nonlinearity Nonlinearity::zero() {
    Nonlinearity nl;
    nl.name = "zero";
    nl.gamma = [](double) { return 0.0; };
    nl.gamma_hat = [](double) { return 0.0; };
    nl.gamma_prime = [](double) { return 0.0; };
    nl.L = 0.0;
    nl.C1 = 1.0;
    return nl;
}

Nonlinearity Nonlinearity::linear(double slope) {
    Nonlinearity nl;
    nl.name = "linear";
    nl.gamma = [slope](double s) { return slope * s; };
    nl.gamma_hat = [slope](double s) { return 0.5 * slope * s * s; };
    nl.gamma_prime = [slope](double) { return slope; };
    nl.L = std::max(0.0, -slope);
    nl.C1 = std::max(std::abs(slope), 1e-300);
    return nl;
}

Nonlinearity Nonlinearity::sine(double amplitude) {
    Nonlinearity nl;
    nl.name = "sine";
    nl.gamma = [amplitude](double s) { return amplitude * std::sin(s); };
    nl.gamma_hat = [amplitude](double s) { return amplitude * (1.0 - std::cos(s)); };
    nl.gamma_prime = [amplitude](double s) { return amplitude * std::cos(s); };
    nl.L = std::abs(amplitude);
    nl.C1 = std::max(std::abs(amplitude), 1e-300);
    return nl;
}

Nonlinearity Nonlinearity::from_expression(const Expression& gamma, double L, double C1,
                                           double range) {
    Nonlinearity nl;
    nl.name = "expression:" + gamma.text();
    nl.gamma = [gamma](double s) { return gamma(ExprVars{0.0, 0.0, s}); };
    ScalarFn g = nl.gamma;
    nl.gamma_hat = [g](double s) { return integrate_from_zero(g, s); };
    nl.gamma_prime = [g](double s) {
        const double d = 1e-6 * std::max(1.0, std::abs(s));
        return (g(s + d) - g(s - d)) / (2.0 * d);
    };
    if (L < 0.0) {
        nl.L = estimate_one_sided_lipschitz(nl.gamma_prime, -range, range, 20001);
        nl.certified = false;
    } else {
        nl.L = L;
    }
    nl.C1 = C1;
    return nl;
}

double estimate_one_sided_lipschitz(const ScalarFn& gamma_prime, double lo, double hi,
                                    std::size_t samples) {
    double min_slope = std::numeric_limits<double>::infinity();
    const std::size_t k = std::max<std::size_t>(samples, 2);
    for (std::size_t i = 0; i < k; ++i) {
        const double s = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
        min_slope = std::min(min_slope, gamma_prime(s));
    }
    return std::max(0.0, -min_slope);
}

NonlinearityReport check_nonlinearity(const Nonlinearity& nl, double range, std::size_t samples,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> wide(-range, range);
    std::uniform_real_distribution<double> near(1e-4 * range, 1e-2 * range);

    NonlinearityReport r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = wide(rng);
        const double t = (i % 2 == 0) ? wide(rng) : s + near(rng);
        if (s == t) continue;
        const double secant = (nl.gamma(t) - nl.gamma(s)) / (t - s);
        r.lipschitz_margin = std::min(r.lipschitz_margin, secant + nl.L);
    }
    auto growth = [&](double s) {
        r.growth_excess = std::max(r.growth_excess, std::abs(nl.gamma(s)) - nl.C1 * (std::abs(s) + 1.0));
    };
    for (std::size_t i = 0; i < samples; ++i) growth(wide(rng));
    for (double mag = range; mag <= range * 1e4; mag *= 10.0) {
        growth(mag);
        growth(-mag);
    }
    for (int j = -10; j <= 10; ++j) {
        const double s = range * static_cast<double>(j) / 10.0;
        const double exact = s >= 0.0 ? adaptive_simpson(nl.gamma, 0.0, s, 1e-12)
                                      : -adaptive_simpson(nl.gamma, s, 0.0, 1e-12);
        r.primitive_error = std::max(r.primitive_error, std::abs(nl.gamma_hat(s) - exact));
    }
    return r;
}

TimeProfile::TimeProfile() : TimeProfile([](double, double) { return 0.0; }, [](double, double) { return 0.0; }, "zero") {}

TimeProfile::TimeProfile(Fn value, Fn dt, std::string name)
    : value_(std::move(value)), dt_(std::move(dt)), name_(std::move(name)) {}

TimeProfile TimeProfile::constant(double c) {
    return TimeProfile([c](double, double) { return c; }, [](double, double) { return 0.0; },
                       "constant");
}

TimeProfile TimeProfile::from_expression(const Expression& value, std::optional<Expression> dt) {
    Fn v = [value](double x, double t) { return value(x, t); };
    Fn d;
    if (dt) d = [e = *dt](double x, double t) { return e(x, t); };
    return TimeProfile(std::move(v), std::move(d), "expression:" + value.text());
}

TimeProfile TimeProfile::with_nodal(Fn value, NodalFn nodal, std::string name) {
    TimeProfile p(std::move(value), {}, std::move(name));
    p.nodal_ = std::move(nodal);
    return p;
}

double TimeProfile::dt(double x, double t) const {
    if (dt_) return dt_(x, t);
    const double d = fd_time_step(t);
    return (value_(x, t + d) - value_(x, t - d)) / (2.0 * d);
}

Field TimeProfile::sample(const Grid& grid, double t) const {
    Field out;
    if (nodal_) {
        out = nodal_(grid, t);
        grid.check(out, "nodal profile sample");
    } else {
        out.resize(grid.n());
        for (std::size_t i = 0; i < grid.n(); ++i) out[i] = value_(grid.node(i), t);
    }
    for (std::size_t i = 0; i < out.size(); ++i) require_finite(out[i], "profile value", grid.node(i), t);
    return out;
}

Field TimeProfile::sample_dt(const Grid& grid, double t) const {
    Field out(grid.n());
    if (dt_) {
        for (std::size_t i = 0; i < grid.n(); ++i) out[i] = dt_(grid.node(i), t);
    } else {
        const double d = fd_time_step(t);
        const Field hi = sample(grid, t + d);
        const Field lo = sample(grid, t - d);
        for (std::size_t i = 0; i < grid.n(); ++i) out[i] = (hi[i] - lo[i]) / (2.0 * d);
    }
    for (std::size_t i = 0; i < out.size(); ++i) require_finite(out[i], "profile time derivative", grid.node(i), t);
    return out;
}

bool is_time_independent(const TimeProfile& p, const Grid& grid, double T, std::size_t samples) {
    const Field ref = p.sample(grid, 0.0);
    for (std::size_t j = 1; j <= samples; ++j) {
        const Field v = p.sample(grid, T * static_cast<double>(j) / static_cast<double>(samples));
        for (std::size_t i = 0; i < grid.n(); ++i)
            if (std::abs(v[i] - ref[i]) > 1e-14 * (1.0 + std::abs(ref[i]))) return false;
    }
    return true;
}

bool ValidationReport::all_pass() const {
    for (const auto& it : items)
        if (!it.pass) return false;
    return true;
}

const CheckItem* ValidationReport::find(const std::string& name) const {
    for (const auto& it : items)
        if (it.name == name) return &it;
    return nullptr;
}

ValidationReport validate(const ProblemData& data, const Nonlinearity& nl,
                          const ValidationOptions& opts) {
    const Grid& grid = data.grid;
    ValidationReport rep;
    rep.lipschitz_certified = nl.certified;

    const NonlinearityReport nr = check_nonlinearity(nl, opts.gamma_range, opts.gamma_samples, opts.seed);
    {
        const double tol = 1e-9 * (1.0 + nl.L);
        rep.items.push_back({"gamma_one_sided_lipschitz",
                             "(gamma(t)-gamma(s))(t-s) + L|t-s|^2 >= 0 on sampled pairs",
                             nr.lipschitz_margin, tol, nr.lipschitz_margin >= -tol,
                             nl.certified ? "L supplied in closed form" : "L estimated by sampling (not certified)"});
    }
    {
        const double tol = 1e-9 * (1.0 + nl.C1);
        rep.items.push_back({"gamma_growth", "|gamma(s)| <= C1(|s|+1) on sampled s", nr.growth_excess, tol,
                             nr.growth_excess <= tol, ""});
    }
    rep.items.push_back({"gamma_primitive", "gamma_hat is the primitive of gamma with gamma_hat(0)=0",
                         nr.primitive_error, 1e-8, nr.primitive_error <= 1e-8, ""});

    const std::size_t ns = std::max<std::size_t>(opts.time_samples, 1);
    double sigma_sup = 0.0;
    double sigma_min = std::numeric_limits<double>::infinity();
    std::vector<Field> f_samples;
    for (std::size_t j = 0; j <= ns; ++j) {
        const double t = data.T * static_cast<double>(j) / static_cast<double>(ns);
        const Field s = data.sigma.sample(grid, t);
        for (double v : s) {
            sigma_sup = std::max(sigma_sup, v);
            sigma_min = std::min(sigma_min, v);
        }
        f_samples.push_back(data.f.sample(grid, t));
    }
    rep.sigma_sup = sigma_sup;
    rep.lambda0 = data.lambda - nl.L * sigma_sup;
    rep.items.push_back({"coercivity", "lambda0 = lambda - L*sup(sigma) > 0", rep.lambda0, 0.0,
                         rep.lambda0 > 0.0, ""});

    grid.check(data.z0, "z0");
    const Field sigma0 = data.sigma.sample(grid, 0.0);
    const Field op = elliptic_operator(grid, data.z0, sigma0, data.lambda, nl);
    double r = -std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
    for (std::size_t i = 0; i < grid.n(); ++i) {
        const double v = op[i] - f_samples[0][i];
        if (v > r) {
            r = v;
            worst = i;
        }
    }
    rep.admissibility_residual = r;
    {
        std::ostringstream os;
        os << "worst node x=" << grid.node(worst);
        rep.items.push_back({"admissibility",
                             "admissible initial state: -Lap z0 + lambda z0 + sigma(.,0) gamma(z0) <= f(.,0)",
                             r, opts.tol_admiss, r <= opts.tol_admiss, os.str()});
    }

    const Field f_tilde = data.f_tilde ? *data.f_tilde : lower_envelope_default(data);
    grid.check(f_tilde, "f_tilde");
    double env = -std::numeric_limits<double>::infinity();
    for (const Field& fs : f_samples)
        for (std::size_t i = 0; i < grid.n(); ++i)
            env = std::max(env, (f_tilde[i] - fs[i]) / (1.0 + std::abs(fs[i])));
    rep.items.push_back({"lower_envelope", "f(x,t) >= f_tilde(x) on sampled (x,t)", env, 1e-8,
                         env <= 1e-8,
                         data.f_tilde ? "user-supplied envelope" : "default envelope f(.,0) - int |df/dt|"});

    rep.items.push_back({"sigma_nonnegative", "sigma >= 0 on sampled (x,t)", sigma_min, 0.0,
                         sigma_min >= 0.0, ""});
    return rep;
}

DiscretizedData discretize_time(const ProblemData& data, std::size_t m, std::size_t quad_pts) {
    if (m == 0) throw ConfigError("step count m must be at least 1");
    if (quad_pts == 0) throw ConfigError("quad_pts must be at least 1");
    const Grid& grid = data.grid;
    DiscretizedData d;
    d.m = m;
    d.tau = data.T / static_cast<double>(m);
    d.times.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) d.times[k] = data.T * static_cast<double>(k) / static_cast<double>(m);
    d.f.reserve(m + 1);
    d.sigma.reserve(m + 1);
    d.f.push_back(data.f.sample(grid, 0.0));
    d.sigma.push_back(data.sigma.sample(grid, 0.0));
    const double q = static_cast<double>(quad_pts);
    for (std::size_t k = 1; k <= m; ++k) {
        Field fk(grid.n(), 0.0), sk(grid.n(), 0.0);
        for (std::size_t j = 0; j < quad_pts; ++j) {
            const double t = d.times[k - 1] + (static_cast<double>(j) + 0.5) * d.tau / q;
            const Field fv = data.f.sample(grid, t);
            const Field sv = data.sigma.sample(grid, t);
            for (std::size_t i = 0; i < grid.n(); ++i) {
                fk[i] += fv[i];
                sk[i] += sv[i];
            }
        }
        for (std::size_t i = 0; i < grid.n(); ++i) {
            fk[i] /= q;
            sk[i] /= q;
        }
        d.f.push_back(std::move(fk));
        d.sigma.push_back(std::move(sk));
    }
    return d;
}

Field lower_envelope_default(const ProblemData& data, std::size_t panels) {
    const Grid& grid = data.grid;
    Field env = data.f.sample(grid, 0.0);
    static constexpr double node[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double weight[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double w = data.T / static_cast<double>(panels);
    for (std::size_t j = 0; j < panels; ++j) {
        const double mid = (static_cast<double>(j) + 0.5) * w;
        for (std::size_t q = 0; q < 3; ++q) {
            const Field d = data.f.sample_dt(grid, mid + 0.5 * w * node[q]);
            for (std::size_t i = 0; i < grid.n(); ++i) env[i] -= 0.5 * w * weight[q] * std::abs(d[i]);
        }
    }
    return env;
}

}  // namespace irrev

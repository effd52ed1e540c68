#include "irrev/fracture.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace irrev {

namespace {

void require_params(const ATParams& p) {
    if (!(p.eps > 0.0) || !(p.delta_eps > 0.0)) {
        std::ostringstream os;
        os << "fracture parameters must be positive (eps = " << p.eps << ", delta_eps = " << p.delta_eps << ")";
        throw ConfigError(os.str());
    }
}

double gauss_cell(const TimeProfile& load, double lo, double hi, double t) {
    static constexpr std::array<double, 3> node{-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> weight{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t q = 0; q < 3; ++q) acc += weight[q] * load(mid + half * node[q], t);
    return half * acc;
}

/// H at an arbitrary x by panels of width at most 1/64.
double cumulative_at(const TimeProfile& load, double x, double t) {
    const double len = x + 1.0;
    if (len <= 0.0) return 0.0;
    const auto panels = static_cast<std::size_t>(std::ceil(len * 64.0));
    const double w = len / static_cast<double>(panels);
    double acc = 0.0;
    for (std::size_t j = 0; j < panels; ++j)
        acc += gauss_cell(load, -1.0 + static_cast<double>(j) * w, -1.0 + static_cast<double>(j + 1) * w, t);
    return acc;
}

double at_gamma(double s, double eps, double delta) {
    const double q = s * s + delta;
    return s / (eps * q * q);
}

double at_gamma_prime(double s, double eps, double delta) {
    const double q = s * s + delta;
    return (delta - 3.0 * s * s) / (eps * q * q * q);
}

}  // namespace

Nonlinearity at_nonlinearity(const ATParams& params, double L_range) {
    require_params(params);
    if (!(L_range > 0.0)) throw ConfigError("L_range must be positive");
    const double eps = params.eps;
    const double delta = params.delta_eps;

    Nonlinearity nl;
    nl.name = "at";
    nl.gamma = [eps, delta](double s) { return at_gamma(s, eps, delta); };
    nl.gamma_hat = [eps, delta](double s) { return -1.0 / (2.0 * eps * (s * s + delta)) + 1.0 / (2.0 * eps * delta); };
    nl.gamma_prime = [eps, delta](double s) { return at_gamma_prime(s, eps, delta); };

    // γ' is even; its interior minimum sits at s² = δ.
    double min_prime = std::min(at_gamma_prime(0.0, eps, delta), at_gamma_prime(L_range, eps, delta));
    const double crit = std::sqrt(delta);
    if (crit <= L_range) min_prime = std::min(min_prime, at_gamma_prime(crit, eps, delta));
    const std::size_t samples = 20000;
    for (std::size_t j = 0; j <= samples; ++j)
        min_prime = std::min(min_prime, at_gamma_prime(L_range * static_cast<double>(j) / samples, eps, delta));
    nl.L = std::max(0.0, -min_prime);
    // max|γ| is attained at s² = δ/3.
    nl.C1 = std::abs(at_gamma(std::sqrt(delta / 3.0), eps, delta));
    nl.certified = true;
    return nl;
}

std::vector<double> cumulative_load(const Grid& grid, const TimeProfile& load, double t, double tol) {
    const std::size_t n = grid.n();
    std::vector<double> H(n + 2, 0.0);
    double prev = grid.a();
    for (std::size_t j = 1; j <= n + 1; ++j) {
        const double x = grid.a() + static_cast<double>(j) * grid.h();
        H[j] = H[j - 1] + gauss_cell(load, prev, x, t);
        prev = x;
    }
    double hmax = 0.0;
    for (double v : H) hmax = std::max(hmax, std::abs(v));
    if (std::abs(H.back()) > tol * hmax) {
        std::ostringstream os;
        os << "load has nonzero spatial average at t = " << t << ": H(1) = " << H.back() << ", max|H| = " << hmax;
        throw ValidationFailed(os.str());
    }
    return H;
}

TimeProfile load_to_sigma(const Grid& grid, const ATParams& params) {
    if (grid.a() != -1.0 || grid.b() != 1.0) throw ConfigError("fracture grid must span (-1, 1)");
    const TimeProfile load = params.load;
    TimeProfile::Fn value = [load](double x, double t) {
        const double H = cumulative_at(load, x, t);
        return H * H;
    };
    TimeProfile::NodalFn nodal = [load](const Grid& g, double t) {
        const std::vector<double> H = cumulative_load(g, load, t);
        Field s(g.n());
        for (std::size_t i = 0; i < g.n(); ++i) s[i] = H[i + 1] * H[i + 1];
        return s;
    };
    return TimeProfile::with_nodal(std::move(value), std::move(nodal), "at_sigma");
}

CoupledState recover_displacement(const Grid& grid, const Field& z, const ATParams& params, double t) {
    require_params(params);
    grid.check(z, "phase field");
    const std::size_t n = grid.n();
    const std::vector<double> H = cumulative_load(grid, params.load, t);

    CoupledState st;
    st.t = t;
    st.x.resize(n + 2);
    st.z.assign(n + 2, 0.0);
    st.u.assign(n + 2, 0.0);
    st.u_x.resize(n + 2);
    st.sigma.resize(n + 2);
    for (std::size_t j = 0; j < n + 2; ++j) {
        st.x[j] = grid.a() + static_cast<double>(j) * grid.h();
        if (j >= 1 && j <= n) st.z[j] = z[j - 1];
        st.u_x[j] = -H[j] / (st.z[j] * st.z[j] + params.delta_eps);
        st.sigma[j] = H[j] * H[j];
    }
    st.x.back() = grid.b();
    for (std::size_t j = 1; j < n + 2; ++j) st.u[j] = st.u[j - 1] + 0.5 * grid.h() * (st.u_x[j - 1] + st.u_x[j]);
    return st;
}

double at_energy(const Grid& grid, const CoupledState& st, const ATParams& params) {
    const double h = grid.h();
    const double eps = params.eps;
    double bulk = 0.0;
    double surface = 0.0;
    for (std::size_t j = 0; j < st.x.size(); ++j) {
        const double w = (j == 0 || j + 1 == st.x.size()) ? 0.5 * h : h;
        bulk += w * 0.5 * (st.z[j] * st.z[j] + params.delta_eps) * st.u_x[j] * st.u_x[j];
        surface += w * (1.0 - st.z[j]) * (1.0 - st.z[j]) / (2.0 * eps);
    }
    double grad = 0.0;
    for (std::size_t j = 1; j < st.z.size(); ++j) {
        const double d = (st.z[j] - st.z[j - 1]) / h;
        grad += h * d * d;
    }
    return bulk + 0.5 * eps * grad + surface;
}

Grid fracture_grid(std::size_t n) { return Grid(-1.0, 1.0, n, Boundary::Dirichlet, Boundary::Dirichlet); }

Field fracture_equilibrium(const Grid& grid, double eps) {
    const double lambda = 1.0 / (eps * eps);
    const Field load(grid.n(), lambda);
    const Field sigma(grid.n(), 0.0);
    return solve_unconstrained(grid, load, sigma, lambda, Nonlinearity::zero());
}

ProblemData fracture_problem(const Grid& grid, const ATParams& params, const Field& z0, double T) {
    require_params(params);
    const double lambda = 1.0 / (params.eps * params.eps);
    ProblemData d{grid, lambda, load_to_sigma(grid, params), TimeProfile::constant(lambda), z0, T, std::nullopt};
    return d;
}

FractureRun run_fracture(const ATParams& params, const Grid& grid, std::optional<Field> z0, double T,
                         std::size_t m, const EvolutionOptions& opts) {
    const Field start = z0 ? *z0 : fracture_equilibrium(grid, params.eps);
    FractureRun run{fracture_problem(grid, params, start, T), at_nonlinearity(params), {grid, 0.0, {}, {}, {}, {}, {}},
                    {}, {}};

    const ValidationReport report = validate(run.data, run.nl, opts.validation);
    if (const CheckItem* c = report.find("coercivity"); c && !c->pass && report.sigma_sup > 0.0) {
        const double scale = std::sqrt(run.data.lambda / (run.nl.L * report.sigma_sup));
        std::ostringstream os;
        os << "coercivity fails for the fracture data: lambda0 = " << report.lambda0
           << "; scaling the load by a factor below " << scale << " would be admissible";
        throw ValidationFailed(os.str());
    }

    run.trajectory = run_evolution(run.data, run.nl, m, opts);
    for (std::size_t k = 0; k < run.trajectory.z.size(); ++k) {
        run.displacement.push_back(recover_displacement(grid, run.trajectory.z[k], params, run.trajectory.times[k]));
        run.at_energy.push_back(at_energy(grid, run.displacement.back(), params));
    }
    return run;
}

CheckVerdict check_fracture_consistency(const FractureRun& run, const ATParams& params, double tol) {
    CheckVerdict v;
    v.name = "fracture_consistency";
    v.tolerance = tol;
    for (std::size_t k = 0; k < run.displacement.size(); ++k) {
        const CoupledState& st = run.displacement[k];
        for (std::size_t j = 1; j + 1 < st.x.size(); ++j) {
            const double lhs = st.sigma[j] * run.nl.gamma(st.z[j]);
            const double rhs = st.z[j] * st.u_x[j] * st.u_x[j] / params.eps;
            v.record(std::abs(lhs - rhs), k, j - 1);
        }
    }
    v.close();
    return v;
}

}  // namespace irrev

#include "irrev/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace irrev {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

/// Object view that remembers which keys were read and rejects the rest.
class Block {
public:
    Block(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) fail(where_, "expected an object");
    }

    const std::string& where() const { return where_; }
    std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = find(key);
        if (!v) fail(path(key), "required key is missing");
        return *v;
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const json* v = find(key);
        if (!v) {
            if (!fallback) fail(path(key), "required key is missing");
            return *fallback;
        }
        if (!v->is_number()) fail(path(key), "expected a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) fail(path(key), "value must be finite");
        return x;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double x = number(key, fallback);
        if (!(x > 0.0)) fail(path(key), "value must be positive");
        return x;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt,
                      std::size_t min = 1) {
        const json* v = find(key);
        if (!v) {
            if (!fallback) fail(path(key), "required key is missing");
            return *fallback;
        }
        if (!v->is_number_integer() || v->get<long long>() < static_cast<long long>(min))
            fail(path(key), "expected an integer >= " + std::to_string(min));
        return v->get<std::size_t>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const json* v = find(key);
        if (!v) {
            if (!fallback) fail(path(key), "required key is missing");
            return *fallback;
        }
        if (!v->is_string()) fail(path(key), "expected a string");
        return v->get<std::string>();
    }

    bool flag(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(path(key), "expected true or false");
        return v->get<bool>();
    }

    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_array() || v->empty()) fail(path(key), "expected a non-empty array of integers");
        std::vector<std::size_t> out;
        for (const auto& e : *v) {
            if (!e.is_number_integer() || e.get<long long>() < 1) fail(path(key), "entries must be integers >= 1");
            out.push_back(e.get<std::size_t>());
        }
        return out;
    }

    std::vector<double> numbers(const json& v, const std::string& key) const {
        if (!v.is_array() || v.empty()) fail(path(key), "expected a non-empty array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail(path(key), "entries must be numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) fail(path(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Expression parse_expr(const std::string& text, const std::string& where) {
    try {
        return Expression::parse(text);
    } catch (const ConfigError& e) {
        fail(where, e.what());
    }
}

/// A number or an expression string in x and t.
TimeProfile::Fn scalar_or_expr(const json& v, const std::string& where) {
    if (v.is_number()) {
        const double c = v.get<double>();
        return [c](double, double) { return c; };
    }
    if (v.is_string()) {
        Expression e = parse_expr(v.get<std::string>(), where);
        return [e](double x, double t) { return e(x, t); };
    }
    fail(where, "expected a number or an expression string");
}

double interp1(const std::vector<double>& knots, const std::vector<double>& vals, double x) {
    if (knots.size() == 1) return vals[0];
    if (x <= knots.front()) return vals.front();
    if (x >= knots.back()) return vals.back();
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - knots.begin());
    const double th = (x - knots[j - 1]) / (knots[j] - knots[j - 1]);
    return (1.0 - th) * vals[j - 1] + th * vals[j];
}

Boundary parse_boundary(const std::string& s, const std::string& where) {
    if (s == "dirichlet") return Boundary::Dirichlet;
    if (s == "neumann") return Boundary::Neumann;
    fail(where, "expected \"dirichlet\" or \"neumann\"");
}

Grid parse_grid(const json& j, const std::string& where, std::optional<std::size_t> n_override = std::nullopt) {
    Block b(j, where);
    const double a = b.number("a", 0.0);
    const double hi = b.number("b", 1.0);
    const std::size_t n = b.count("n");
    const Boundary left = parse_boundary(b.text("left", "dirichlet"), b.path("left"));
    const Boundary right = parse_boundary(b.text("right", "dirichlet"), b.path("right"));
    b.finish();
    if (!(hi > a)) fail(where, "b must exceed a");
    return Grid(a, hi, n_override.value_or(n), left, right);
}

SolverOptions parse_solver(const json& j, const std::string& where) {
    Block b(j, where);
    SolverOptions o;
    const std::string method = b.text("method", "active_set");
    if (method == "active_set") o.method = Method::ActiveSet;
    else if (method == "projected_gradient") o.method = Method::ProjectedGradient;
    else fail(b.path("method"), "expected \"active_set\" or \"projected_gradient\"");
    o.tol_kkt = b.positive("tol_kkt", o.tol_kkt);
    o.max_outer = b.count("max_outer", o.max_outer);
    o.pdas_c = b.positive("pdas_c", o.pdas_c);
    o.newton_damping = b.positive("newton_damping", o.newton_damping);
    if (o.newton_damping >= 1.0) fail(b.path("newton_damping"), "value must lie in (0, 1)");
    o.coercivity_margin = b.positive("coercivity_margin", o.coercivity_margin);
    o.max_newton = b.count("max_newton", o.max_newton);
    o.max_pg_iterations = b.count("max_pg_iterations", o.max_pg_iterations);
    b.finish();
    return o;
}

ValidationOptions parse_validation(const json& j, const std::string& where) {
    Block b(j, where);
    ValidationOptions o;
    o.tol_admiss = b.positive("tol_admiss", o.tol_admiss);
    o.time_samples = b.count("time_samples", o.time_samples);
    o.gamma_range = b.positive("gamma_range", o.gamma_range);
    o.gamma_samples = b.count("gamma_samples", o.gamma_samples, 2);
    o.seed = b.count("seed", o.seed, 0);
    b.finish();
    return o;
}

Field parse_z0(const json& j, const std::string& where, const Grid& grid, const ProblemData& partial,
               const Nonlinearity& nl) {
    Block b(j, where);
    const std::string preset = b.text("preset");
    Field z(grid.n(), 0.0);
    if (preset == "zero") {
    } else if (preset == "constant") {
        std::fill(z.begin(), z.end(), b.number("value"));
    } else if (preset == "expression") {
        const Expression e = parse_expr(b.text("expr"), b.path("expr"));
        for (std::size_t i = 0; i < grid.n(); ++i) z[i] = e(grid.node(i), 0.0);
    } else if (preset == "values") {
        const std::vector<double> v = b.numbers(b.require("values"), "values");
        if (v.size() == grid.n()) {
            z = v;
        } else {
            // Values given on a grid of different size on the same interval.
            const Grid src(grid.a(), grid.b(), v.size(), grid.left(), grid.right());
            z = transfer(src, v, grid);
        }
    } else if (preset == "equilibrium") {
        z = solve_unconstrained(grid, partial.f.sample(grid, 0.0), partial.sigma.sample(grid, 0.0), partial.lambda, nl);
    } else {
        fail(b.path("preset"), "unknown z0 preset '" + preset + "'");
    }
    b.finish();
    return z;
}

ProblemData build_problem(const json& j, std::optional<std::size_t> n, const Nonlinearity& nl) {
    Block b(j, "problem");
    const Grid grid = parse_grid(b.require("grid"), "problem.grid", n);
    ProblemData d{grid, 0.0, TimeProfile::constant(0.0), TimeProfile::constant(0.0), {}, 1.0, std::nullopt};
    d.lambda = b.number("lambda");
    d.T = b.positive("T", 1.0);
    b.count("m", 100);
    b.count("quad_pts", 8);
    b.find("gamma");
    if (const json* s = b.find("sigma")) d.sigma = parse_profile(*s, "problem.sigma");
    if (const json* f = b.find("f")) d.f = parse_profile(*f, "problem.f");
    if (const json* ft = b.find("f_tilde")) {
        const auto fn = scalar_or_expr(*ft, "problem.f_tilde");
        Field env(grid.n());
        for (std::size_t i = 0; i < grid.n(); ++i) env[i] = fn(grid.node(i), 0.0);
        d.f_tilde = env;
    }
    const json* z0 = b.find("z0");
    d.z0 = z0 ? parse_z0(*z0, "problem.z0", grid, d, nl) : Field(grid.n(), 0.0);
    b.finish();
    return d;
}

}  // namespace

TimeProfile parse_profile(const json& j, const std::string& where) {
    if (j.is_number() || j.is_string()) {
        // Shorthand: a number is a constant, a string an expression in x and t.
        if (j.is_number()) return TimeProfile::constant(j.get<double>());
        return TimeProfile::from_expression(parse_expr(j.get<std::string>(), where));
    }
    Block b(j, where);
    const std::string preset = b.text("preset");
    TimeProfile p;
    if (preset == "constant") {
        const auto v = scalar_or_expr(b.require("value"), b.path("value"));
        p = TimeProfile([v](double x, double) { return v(x, 0.0); }, [](double, double) { return 0.0; }, "constant");
    } else if (preset == "linear_t") {
        const auto base = scalar_or_expr(b.require("base"), b.path("base"));
        const auto slope = scalar_or_expr(b.require("slope"), b.path("slope"));
        p = TimeProfile([base, slope](double x, double t) { return base(x, 0.0) + slope(x, 0.0) * t; },
                        [slope](double x, double) { return slope(x, 0.0); }, "linear_t");
    } else if (preset == "relaxation") {
        const auto lim = scalar_or_expr(b.require("limit"), b.path("limit"));
        const auto amp = scalar_or_expr(b.require("amplitude"), b.path("amplitude"));
        const double rate = b.positive("rate", 1.0);
        p = TimeProfile(
            [lim, amp, rate](double x, double t) { return lim(x, 0.0) + amp(x, 0.0) * std::exp(-rate * t); },
            [amp, rate](double x, double t) { return -rate * amp(x, 0.0) * std::exp(-rate * t); }, "relaxation");
    } else if (preset == "tabulated") {
        const std::vector<double> xs = b.numbers(b.require("x"), "x");
        const std::vector<double> ts = b.numbers(b.require("t"), "t");
        const json& vals = b.require("values");
        if (!vals.is_array() || vals.size() != ts.size()) fail(b.path("values"), "expected one row per time knot");
        std::vector<std::vector<double>> rows;
        for (const auto& r : vals) {
            rows.push_back(b.numbers(r, "values"));
            if (rows.back().size() != xs.size()) fail(b.path("values"), "every row needs one value per x knot");
        }
        if (!std::is_sorted(xs.begin(), xs.end()) || !std::is_sorted(ts.begin(), ts.end()))
            fail(where, "knots must be increasing");
        p = TimeProfile(
            [xs, ts, rows](double x, double t) {
                std::vector<double> at_x(ts.size());
                for (std::size_t k = 0; k < ts.size(); ++k) at_x[k] = interp1(xs, rows[k], x);
                return interp1(ts, at_x, t);
            },
            {}, "tabulated");
    } else if (preset == "expression") {
        const Expression e = parse_expr(b.text("expr"), b.path("expr"));
        std::optional<Expression> dt;
        if (const json* d = b.find("dt")) {
            if (!d->is_string()) fail(b.path("dt"), "expected an expression string");
            dt = parse_expr(d->get<std::string>(), b.path("dt"));
        }
        p = TimeProfile::from_expression(e, dt);
    } else if (preset == "ramp") {
        const double rate = b.number("rate");
        p = TimeProfile([rate](double x, double t) { return rate * t * x; },
                        [rate](double x, double) { return rate * x; }, "ramp");
    } else if (preset == "sinusoidal") {
        const double rate = b.number("rate");
        const double k = static_cast<double>(b.count("frequency", 1));
        p = TimeProfile([rate, k](double x, double t) { return rate * t * std::sin(k * M_PI * x); },
                        [rate, k](double x, double) { return rate * std::sin(k * M_PI * x); }, "sinusoidal");
    } else {
        fail(b.path("preset"), "unknown profile preset '" + preset + "'");
    }
    b.finish();
    return p;
}

Nonlinearity parse_nonlinearity(const json& j, const std::string& where) {
    Block b(j, where);
    const std::string preset = b.text("preset");
    Nonlinearity nl;
    if (preset == "zero") {
        nl = Nonlinearity::zero();
    } else if (preset == "linear") {
        nl = Nonlinearity::linear(b.number("slope"));
    } else if (preset == "sine") {
        nl = Nonlinearity::sine(b.number("amplitude"));
    } else if (preset == "expression") {
        const Expression e = parse_expr(b.text("expr"), b.path("expr"));
        const json* L = b.find("L");
        double Lv = -1.0;
        if (L) {
            if (!L->is_number() || L->get<double>() < 0.0) fail(b.path("L"), "expected a number >= 0");
            Lv = L->get<double>();
        }
        nl = Nonlinearity::from_expression(e, Lv, b.positive("C1", 1.0), b.positive("range", 10.0));
    } else if (preset == "at") {
        ATParams p;
        p.eps = b.positive("eps");
        p.delta_eps = b.positive("delta_eps");
        nl = at_nonlinearity(p, b.positive("L_range", 10.0));
    } else {
        fail(b.path("preset"), "unknown gamma preset '" + preset + "'");
    }
    b.finish();
    return nl;
}

ProblemData RunConfig::problem() const {
    if (!problem_block) throw ConfigError("problem: block is missing");
    return build_problem(*problem_block, std::nullopt, *nl);
}

ProblemData RunConfig::problem(std::size_t n) const {
    if (!problem_block) throw ConfigError("problem: block is missing");
    return build_problem(*problem_block, n, *nl);
}

ProblemFactory RunConfig::factory() const {
    if (!problem_block) throw ConfigError("problem: block is missing");
    return [block = *problem_block, nl = *nl](std::size_t n) { return build_problem(block, n, nl); };
}

Field RunConfig::fracture_z0(const Grid& grid) const {
    if (!fracture) throw ConfigError("fracture: block is missing");
    if (!fracture->z0) return fracture_equilibrium(grid, fracture->params.eps);
    const double lambda = 1.0 / (fracture->params.eps * fracture->params.eps);
    ProblemData d{grid, lambda, TimeProfile::constant(0.0), TimeProfile::constant(lambda), {}, 1.0, std::nullopt};
    return parse_z0(*fracture->z0, "fracture.z0", grid, d, Nonlinearity::zero());
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    c.raw = j;
    Block top(j, "");
    if (const json* p = top.find("problem")) {
        Block b(*p, "problem");
        c.nl = b.find("gamma") ? parse_nonlinearity(b.require("gamma"), "problem.gamma") : Nonlinearity::zero();
        c.m = b.count("m", 100);
        c.evolution.quad_pts = b.count("quad_pts", 8);
        c.problem_block = *p;
        // Full parse here so that every error surfaces before any computation.
        build_problem(*p, std::nullopt, *c.nl);
    }
    if (const json* s = top.find("solver")) c.evolution.solver = parse_solver(*s, "solver");
    if (const json* v = top.find("validation")) c.evolution.validation = parse_validation(*v, "validation");
    if (const json* o = top.find("output")) {
        Block b(*o, "output");
        c.output.directory = b.text("directory", "out");
        c.output.stride = b.count("stride", 1);
        if (const json* f = b.find("formats")) {
            if (!f->is_array()) fail("output.formats", "expected an array");
            c.output.csv = c.output.json = false;
            for (const auto& e : *f) {
                if (e == "csv") c.output.csv = true;
                else if (e == "json") c.output.json = true;
                else fail("output.formats", "entries must be \"csv\" or \"json\"");
            }
        }
        b.finish();
    }
    if (const json* d = top.find("diagnostics")) {
        Block b(*d, "diagnostics");
        auto& g = c.diagnostics;
        g.seed = b.count("seed", g.seed, 0);
        g.minimality_samples = b.count("minimality_samples", g.minimality_samples);
        g.minimality_stamps = b.count("minimality_stamps", g.minimality_stamps);
        g.minimality_tol = b.positive("minimality_tol", g.minimality_tol);
        g.ls_tol = b.positive("ls_tol", g.ls_tol);
        g.irreversibility_tol = b.positive("irreversibility_tol", g.irreversibility_tol);
        g.no_evolution_tol = b.positive("no_evolution_tol", g.no_evolution_tol);
        b.finish();
    }
    if (const json* r = top.find("refine")) {
        Block b(*r, "refine");
        RefineConfig rc;
        rc.m_list = b.counts("m_list", rc.m_list);
        rc.n_list = b.counts("n_list", rc.n_list);
        b.finish();
        c.refine = rc;
    }
    if (const json* l = top.find("longtime")) {
        Block b(*l, "longtime");
        LongTimeConfig lc;
        lc.horizon = b.positive("horizon", lc.horizon);
        lc.m_per_unit = b.count("m_per_unit", lc.m_per_unit);
        lc.final_tol = b.positive("final_tol", lc.final_tol);
        lc.f_inf = parse_profile(b.require("f_inf"), "longtime.f_inf");
        b.finish();
        c.longtime = lc;
    }
    if (const json* f = top.find("fracture")) {
        Block b(*f, "fracture");
        FractureConfig fc;
        fc.params.eps = b.positive("eps");
        fc.params.delta_eps = b.positive("delta_eps");
        if (const json* ld = b.find("load")) fc.params.load = parse_profile(*ld, "fracture.load");
        fc.n = b.count("n", fc.n);
        fc.T = b.positive("T", fc.T);
        fc.m = b.count("m", fc.m);
        fc.L_range = b.positive("L_range", fc.L_range);
        if (const json* z = b.find("z0")) fc.z0 = *z;
        b.finish();
        c.fracture = fc;
        c.fracture_z0(fracture_grid(fc.n));
    }
    if (const json* s = top.find("stationary")) {
        Block b(*s, "stationary");
        StationaryConfig sc;
        sc.f_inf = parse_profile(b.require("f_inf"), "stationary.f_inf");
        if (const json* sg = b.find("sigma")) sc.sigma = parse_profile(*sg, "stationary.sigma");
        b.finish();
        c.stationary = sc;
    }
    top.finish();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << path.string() << ":" << line << ":" << col << ": JSON syntax error";
        throw ConfigError(os.str());
    }
    return parse_config(j);
}

}  // namespace irrev

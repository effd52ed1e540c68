#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <variant>

#include "irrev/config.hpp"
#include "irrev/diagnostics.hpp"
#include "irrev/error.hpp"
#include "irrev/evolution.hpp"
#include "irrev/expression.hpp"
#include "irrev/fracture.hpp"
#include "irrev/functional.hpp"
#include "irrev/stationary.hpp"

namespace py = pybind11;
using namespace irrev;

namespace {

using ProfileArg = std::variant<double, std::string>;

TimeProfile to_profile(const ProfileArg& p) {
    if (const double* c = std::get_if<double>(&p)) return TimeProfile::constant(*c);
    return TimeProfile::from_expression(Expression::parse(std::get<std::string>(p)));
}

Method to_method(const std::string& s) {
    if (s == "active_set") return Method::ActiveSet;
    if (s == "projected_gradient") return Method::ProjectedGradient;
    throw ConfigError("method: expected \"active_set\" or \"projected_gradient\"");
}

// StepProblem only views its fields; these overloads keep them alive for the call.
ObstacleResult step(const Grid& g, const Field& obstacle, const Field& load, const Field& sigma, double lambda,
                    const Nonlinearity& nl, const std::string& method) {
    SolverOptions o;
    o.method = to_method(method);
    return solve_step({g, obstacle, load, sigma, lambda, nl}, o);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Completely irreversible evolution by minimizing movements";

    static py::exception<Error> base(m, "IrrevError", PyExc_RuntimeError);
    static py::exception<ConfigError> config_error(m, "ConfigError", base.ptr());
    static py::exception<ValidationFailed> validation_error(m, "ValidationFailed", base.ptr());
    static py::exception<SolverError> solver_error(m, "SolverError", base.ptr());
    static py::exception<EvolutionError> evolution_error(m, "EvolutionError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const ValidationFailed& e) {
            py::set_error(validation_error, e.what());
        } catch (const SolverError& e) {
            py::set_error(solver_error, e.what());
        } catch (const EvolutionError& e) {
            py::set_error(evolution_error, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::enum_<Boundary>(m, "Boundary")
        .value("Dirichlet", Boundary::Dirichlet)
        .value("Neumann", Boundary::Neumann);

    py::class_<Grid>(m, "Grid")
        .def(py::init<double, double, std::size_t, Boundary, Boundary>(), py::arg("a"), py::arg("b"), py::arg("n"),
             py::arg("left") = Boundary::Dirichlet, py::arg("right") = Boundary::Dirichlet)
        .def_property_readonly("a", &Grid::a)
        .def_property_readonly("b", &Grid::b)
        .def_property_readonly("n", &Grid::n)
        .def_property_readonly("h", &Grid::h)
        .def_property_readonly("left", &Grid::left)
        .def_property_readonly("right", &Grid::right)
        .def("nodes", &Grid::nodes)
        .def("__repr__", [](const Grid& g) {
            return "Grid(" + std::to_string(g.a()) + ", " + std::to_string(g.b()) + ", n=" + std::to_string(g.n()) + ")";
        });

    m.def("norm_v", [](const Grid& g, const Field& u) { return norm_v(g, u); });

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def_static("zero", &Nonlinearity::zero)
        .def_static("linear", &Nonlinearity::linear, py::arg("slope"))
        .def_static("sine", &Nonlinearity::sine, py::arg("amplitude"))
        .def_static(
            "from_expression",
            [](const std::string& expr, double L, double C1) {
                return Nonlinearity::from_expression(Expression::parse(expr), L, C1);
            },
            py::arg("expr"), py::arg("L") = -1.0, py::arg("C1") = 1.0)
        .def_readonly("name", &Nonlinearity::name)
        .def_readonly("L", &Nonlinearity::L)
        .def_readonly("C1", &Nonlinearity::C1)
        .def_readonly("certified", &Nonlinearity::certified)
        .def("gamma", [](const Nonlinearity& nl, double s) { return nl.gamma(s); })
        .def("gamma_hat", [](const Nonlinearity& nl, double s) { return nl.gamma_hat(s); });

    py::class_<ProblemData>(m, "Problem")
        .def(py::init([](const Grid& g, double lambda, const ProfileArg& f, const ProfileArg& sigma,
                         std::optional<Field> z0, double T, std::optional<Nonlinearity> nl) {
                 ProblemData d{g, lambda, to_profile(sigma), to_profile(f), {}, T, std::nullopt};
                 if (z0) {
                     d.z0 = *z0;
                 } else {
                     d.z0 = solve_unconstrained(g, d.f.sample(g, 0.0), d.sigma.sample(g, 0.0), lambda,
                                                nl ? *nl : Nonlinearity::zero());
                 }
                 return d;
             }),
             py::arg("grid"), py::arg("lam"), py::arg("f"), py::arg("sigma") = ProfileArg{0.0},
             py::arg("z0") = std::nullopt, py::arg("T") = 1.0, py::arg("nl") = std::nullopt,
             "f and sigma are numbers or expressions in x and t; z0 defaults to the equilibrium at t = 0.")
        .def_readonly("grid", &ProblemData::grid)
        .def_readonly("lam", &ProblemData::lambda)
        .def_readonly("z0", &ProblemData::z0)
        .def_readonly("T", &ProblemData::T)
        .def("f", [](const ProblemData& d, double t) { return d.f.sample(d.grid, t); })
        .def("sigma", [](const ProblemData& d, double t) { return d.sigma.sample(d.grid, t); })
        .def("energy", [](const ProblemData& d, const Nonlinearity& nl, const Field& z, double t) {
            return energy(d.grid, d, nl, z, t);
        });

    py::class_<CheckItem>(m, "CheckItem")
        .def_readonly("name", &CheckItem::name)
        .def_readonly("hypothesis", &CheckItem::hypothesis)
        .def_readonly("value", &CheckItem::value)
        .def_readonly("tolerance", &CheckItem::tolerance)
        .def_readonly("passed", &CheckItem::pass)
        .def_readonly("detail", &CheckItem::detail);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("lambda0", &ValidationReport::lambda0)
        .def_readonly("sigma_sup", &ValidationReport::sigma_sup)
        .def_readonly("admissibility_residual", &ValidationReport::admissibility_residual)
        .def_readonly("items", &ValidationReport::items)
        .def("all_pass", &ValidationReport::all_pass);

    m.def("validate", [](const ProblemData& d, const Nonlinearity& nl) { return validate(d, nl); });

    py::class_<ObstacleResult>(m, "StepResult")
        .def_readonly("z", &ObstacleResult::z)
        .def_readonly("eta", &ObstacleResult::eta)
        .def_readonly("active", &ObstacleResult::active)
        .def_readonly("iters", &ObstacleResult::iters)
        .def_readonly("kkt_residual", &ObstacleResult::kkt_residual);

    m.def("solve_step", &step, py::arg("grid"), py::arg("obstacle"), py::arg("load"), py::arg("sigma"),
          py::arg("lam"), py::arg("nl"), py::arg("method") = "active_set",
          "Minimizes the step functional over {u <= obstacle}.");
    m.def(
        "oracle_enumerate",
        [](const Grid& g, const Field& obstacle, const Field& load, const Field& sigma, double lambda,
           const Nonlinearity& nl) { return oracle_enumerate({g, obstacle, load, sigma, lambda, nl}); },
        py::arg("grid"), py::arg("obstacle"), py::arg("load"), py::arg("sigma"), py::arg("lam"), py::arg("nl"));
    m.def(
        "solve_stationary",
        [](const Grid& g, const Field& z0, const Field& f_inf, const Field& sigma, double lambda,
           const Nonlinearity& nl) { return solve_stationary({g, z0, f_inf, sigma, lambda, nl}); },
        py::arg("grid"), py::arg("z0"), py::arg("f_inf"), py::arg("sigma"), py::arg("lam"), py::arg("nl"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("grid", &Trajectory::grid)
        .def_readonly("tau", &Trajectory::tau)
        .def_readonly("times", &Trajectory::times)
        .def_readonly("z", &Trajectory::z)
        .def_readonly("eta", &Trajectory::eta)
        .def_readonly("energy", &Trajectory::energy)
        .def("steps", &Trajectory::steps)
        .def("at", &interp_linear, py::arg("t"));

    m.def(
        "run_evolution",
        [](const ProblemData& d, const Nonlinearity& nl, std::size_t steps, const std::string& method) {
            EvolutionOptions o;
            o.solver.method = to_method(method);
            return run_evolution(d, nl, steps, o);
        },
        py::arg("problem"), py::arg("nl"), py::arg("m"), py::arg("method") = "active_set");

    py::class_<CheckVerdict>(m, "CheckVerdict")
        .def_readonly("name", &CheckVerdict::name)
        .def_readonly("max_violation", &CheckVerdict::max_violation)
        .def_readonly("tolerance", &CheckVerdict::tolerance)
        .def_readonly("passed", &CheckVerdict::pass)
        .def_readonly("applicable", &CheckVerdict::applicable)
        .def_readonly("worst_step", &CheckVerdict::worst_step)
        .def_readonly("worst_node", &CheckVerdict::worst_node)
        .def_readonly("detail", &CheckVerdict::detail)
        .def("__bool__", [](const CheckVerdict& v) { return v.pass; });

    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("energy", &EnergyReport::energy)
        .def_readonly("residual", &EnergyReport::residual)
        .def_readonly("max_abs_residual", &EnergyReport::max_abs_residual)
        .def_readonly("sum_abs_residual", &EnergyReport::sum_abs_residual);

    m.def("check_irreversibility", &check_irreversibility, py::arg("traj"), py::arg("tol") = 1e-12);
    m.def("check_no_evolution", &check_no_evolution, py::arg("traj"), py::arg("tol") = 1e-10);
    m.def("compare_trajectories", &compare_trajectories, py::arg("a"), py::arg("b"), py::arg("tol") = 1e-10);
    m.def(
        "check_lewy_stampacchia",
        [](const Trajectory& t, const ProblemData& d, const Nonlinearity& nl, double tol) {
            return check_lewy_stampacchia(t, discretize_time(d, t.steps()), d.lambda, nl, tol);
        },
        py::arg("traj"), py::arg("problem"), py::arg("nl"), py::arg("tol") = 1e-8);
    m.def(
        "check_unilateral_minimality",
        [](const Trajectory& t, const ProblemData& d, const Nonlinearity& nl, double time, std::size_t samples,
           std::uint64_t seed) {
            const DiscretizedData disc = discretize_time(d, t.steps());
            MinimalityOptions o;
            o.n_samples = samples;
            o.seed = seed;
            o.frozen = &disc;
            return check_unilateral_minimality(t, d, nl, time, o);
        },
        py::arg("traj"), py::arg("problem"), py::arg("nl"), py::arg("t"), py::arg("samples") = 1000,
        py::arg("seed") = 1);
    m.def(
        "balance_residual",
        [](const Trajectory& t, const ProblemData& d, const Nonlinearity& nl) { return balance_residual(t, d, nl); },
        py::arg("traj"), py::arg("problem"), py::arg("nl"));
    m.def("time_refinement_gap", &time_refinement_gap, py::arg("coarse"), py::arg("fine"));

    py::class_<LongTimeResult>(m, "LongTimeResult")
        .def_readonly("trajectory", &LongTimeResult::trajectory)
        .def_readonly("z_inf", &LongTimeResult::z_inf)
        .def_readonly("gap", &LongTimeResult::gap)
        .def_readonly("final_gap", &LongTimeResult::final_gap)
        .def_readonly("monotone", &LongTimeResult::monotone)
        .def_readonly("sandwich_violation", &LongTimeResult::sandwich_violation);
    m.def(
        "run_longtime",
        [](const ProblemData& d, const Field& f_inf, const Nonlinearity& nl, double horizon, std::size_t m_per_unit) {
            LongTimeOptions o;
            o.horizon = horizon;
            o.m_per_unit = m_per_unit;
            return run_longtime(d, f_inf, nl, o);
        },
        py::arg("problem"), py::arg("f_inf"), py::arg("nl"), py::arg("horizon") = 40.0, py::arg("m_per_unit") = 16);

    py::class_<CoupledState>(m, "CoupledState")
        .def_readonly("t", &CoupledState::t)
        .def_readonly("x", &CoupledState::x)
        .def_readonly("z", &CoupledState::z)
        .def_readonly("u", &CoupledState::u)
        .def_readonly("u_x", &CoupledState::u_x)
        .def_readonly("sigma", &CoupledState::sigma);

    py::class_<ATParams>(m, "ATParams")
        .def(py::init([](double eps, double delta_eps, const ProfileArg& load) {
                 return ATParams{eps, delta_eps, to_profile(load)};
             }),
             py::arg("eps") = 0.2, py::arg("delta_eps") = 0.05, py::arg("load") = ProfileArg{0.0})
        .def_readonly("eps", &ATParams::eps)
        .def_readonly("delta_eps", &ATParams::delta_eps);

    py::class_<FractureRun>(m, "FractureRun")
        .def_readonly("problem", &FractureRun::data)
        .def_readonly("nl", &FractureRun::nl)
        .def_readonly("trajectory", &FractureRun::trajectory)
        .def_readonly("displacement", &FractureRun::displacement)
        .def_readonly("at_energy", &FractureRun::at_energy);

    m.def("at_nonlinearity", &at_nonlinearity, py::arg("params"), py::arg("L_range") = 10.0);
    m.def("fracture_grid", &fracture_grid, py::arg("n"));
    m.def("fracture_equilibrium", &fracture_equilibrium, py::arg("grid"), py::arg("eps"));
    m.def(
        "run_fracture",
        [](const ATParams& p, std::size_t n, double T, std::size_t steps, std::optional<Field> z0) {
            return run_fracture(p, fracture_grid(n), std::move(z0), T, steps);
        },
        py::arg("params"), py::arg("n") = 101, py::arg("T") = 1.0, py::arg("m") = 50, py::arg("z0") = std::nullopt);
    m.def("check_fracture_consistency", &check_fracture_consistency, py::arg("run"), py::arg("params"),
          py::arg("tol") = 1e-10);

    py::class_<RunConfig>(m, "Config")
        .def_readonly("m", &RunConfig::m)
        .def_property_readonly("nl", [](const RunConfig& c) { return c.nl; })
        .def("problem", py::overload_cast<>(&RunConfig::problem, py::const_))
        .def("problem_with_n", py::overload_cast<std::size_t>(&RunConfig::problem, py::const_), py::arg("n"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def(
        "parse_config", [](const std::string& text) { return parse_config(nlohmann::json::parse(text)); },
        py::arg("text"));
}

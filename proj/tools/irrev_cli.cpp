#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irrev/config.hpp"
#include "irrev/diagnostics.hpp"
#include "irrev/fracture.hpp"
#include "irrev/io.hpp"
#include "irrev/stationary.hpp"

namespace fs = std::filesystem;
using namespace irrev;

namespace {

enum Exit : int { kPass = 0, kFail = 1, kSolver = 2, kConfig = 3 };

enum class Verbosity { Quiet, Normal, Debug };

Verbosity verbosity() {
    const char* v = std::getenv("IRREV_VERBOSITY");
    if (!v) return Verbosity::Normal;
    const std::string s(v);
    if (s == "0" || s == "quiet") return Verbosity::Quiet;
    if (s == "2" || s == "debug") return Verbosity::Debug;
    return Verbosity::Normal;
}

struct Invocation {
    std::string config;
    std::string output;
    std::optional<std::uint64_t> seed;
    bool force = false;
};

struct Context {
    RunConfig cfg;
    fs::path out;
    Verbosity verb;

    bool normal() const { return verb != Verbosity::Quiet; }
    bool debug() const { return verb == Verbosity::Debug; }
};

Context open(const Invocation& inv) {
    Context c{load_config(inv.config), {}, verbosity()};
    if (inv.seed) c.cfg.diagnostics.seed = *inv.seed;
    c.out = inv.output.empty() ? c.cfg.output.directory : fs::path(inv.output);
    fs::create_directories(c.out);
    fs::remove(c.out / ".partial");
    return c;
}

void print_validation(const ValidationReport& r, bool all) {
    std::printf("lambda0 = %.6g  admissibility residual = %.6g  L %s\n", r.lambda0, r.admissibility_residual,
                r.lipschitz_certified ? "certified" : "estimated (not certified)");
    for (const auto& it : r.items) {
        if (!all && it.pass) continue;
        std::printf("  %-4s %-26s %s: value %.6g (tolerance %.3g)%s%s\n", it.pass ? "ok" : "FAIL", it.name.c_str(),
                    it.hypothesis.c_str(), it.value, it.tolerance, it.detail.empty() ? "" : "; ", it.detail.c_str());
    }
}

/// Verdicts with applicable = false are listed but do not affect the exit status.
int print_verdicts(const std::vector<CheckVerdict>& vs, bool show) {
    int status = kPass;
    for (const auto& v : vs) {
        const char* tag = !v.applicable ? "n/a" : (v.pass ? "PASS" : "FAIL");
        if (v.applicable && !v.pass) status = kFail;
        if (show)
            std::printf("%-24s %-4s max violation %-12.4g tolerance %-9.3g (step %zu, node %zu)\n", v.name.c_str(), tag,
                        v.max_violation, v.tolerance, v.worst_step, v.worst_node);
    }
    return status;
}

nlohmann::json verdicts_json(const std::vector<CheckVerdict>& vs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& v : vs) a.push_back(to_json(v));
    return a;
}

void write_trajectory(const Context& c, const Trajectory& t, const nlohmann::json& extra) {
    if (c.cfg.output.csv) write_trajectory_csv(c.out / "trajectory.csv", t, c.cfg.output.stride);
    nlohmann::json m = trajectory_manifest(t, c.cfg.output.stride);
    m["config"] = c.cfg.raw;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    if (c.cfg.output.json) write_json(c.out / "manifest.json", m);
}

int partial(const Context& c, const EvolutionError& e) {
    write_trajectory(c, e.partial(), {{"failed_step", e.step()}, {"failure", to_string(e.kind())}});
    std::ofstream(c.out / ".partial") << e.what() << '\n';
    std::fprintf(stderr, "solver failure: %s\npartial outputs kept in %s\n", e.what(), c.out.string().c_str());
    return kSolver;
}

std::vector<std::size_t> probe_stamps(std::size_t m, std::size_t count) {
    std::vector<std::size_t> ks;
    if (count <= 1) return {m};
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t k = (j * m + (count - 1) / 2) / (count - 1);
        if (ks.empty() || ks.back() != k) ks.push_back(k);
    }
    return ks;
}

/// Validation gate shared by run-like commands; returns an exit status when the run must stop.
std::optional<int> gate(const ValidationReport& rep, bool force, EvolutionOptions& evo, const Context& c) {
    if (c.debug() || (!rep.all_pass() && c.normal())) print_validation(rep, c.debug());
    if (rep.all_pass()) return std::nullopt;
    if (!force) {
        std::fprintf(stderr, "data rejected; rerun with --force to proceed (coercivity is always required)\n");
        return kFail;
    }
    if (!(rep.lambda0 > 0.0)) {
        std::fprintf(stderr, "coercivity: lambda0 = lambda - L*sup(sigma) = %g must be positive, even with --force\n",
                     rep.lambda0);
        return kFail;
    }
    evo.enforce = Enforcement::CoercivityOnly;
    return std::nullopt;
}

int cmd_check(const Invocation& inv) {
    Context c = open(inv);
    ValidationReport rep;
    if (c.cfg.problem_block) {
        rep = validate(c.cfg.problem(), *c.cfg.nl, c.cfg.evolution.validation);
    } else if (c.cfg.fracture) {
        const auto& fc = *c.cfg.fracture;
        const Grid g = fracture_grid(fc.n);
        rep = validate(fracture_problem(g, fc.params, c.cfg.fracture_z0(g), fc.T), at_nonlinearity(fc.params, fc.L_range),
                       c.cfg.evolution.validation);
    } else {
        throw ConfigError("config has neither a problem nor a fracture block");
    }
    if (c.normal()) print_validation(rep, true);
    if (c.cfg.output.json) write_json(c.out / "validation.json", to_json(rep));
    return rep.all_pass() ? kPass : kFail;
}

int cmd_run(const Invocation& inv) {
    Context c = open(inv);
    const ProblemData data = c.cfg.problem();
    const Nonlinearity& nl = *c.cfg.nl;
    EvolutionOptions evo = c.cfg.evolution;
    const ValidationReport rep = validate(data, nl, evo.validation);
    if (auto stop = gate(rep, inv.force, evo, c)) return *stop;

    const DiscretizedData disc = discretize_time(data, c.cfg.m, evo.quad_pts);
    std::optional<Trajectory> res;
    try {
        res.emplace(run_evolution(data, nl, disc, evo));
    } catch (const EvolutionError& e) {
        return partial(c, e);
    }
    const Trajectory& traj = *res;
    write_trajectory(c, traj, {{"validation", to_json(rep)}});

    const auto& dg = c.cfg.diagnostics;
    const bool stationary =
        is_time_independent(data.f, data.grid, data.T) && is_time_independent(data.sigma, data.grid, data.T);
    std::vector<CheckVerdict> vs;
    vs.push_back(check_irreversibility(traj, dg.irreversibility_tol));
    vs.push_back(check_lewy_stampacchia(traj, disc, data.lambda, nl, dg.ls_tol));
    vs.push_back(check_dissipation(traj, disc, data.lambda, nl));
    vs.push_back(check_energy_identity(traj, data, nl));
    MinimalityOptions mo;
    mo.n_samples = dg.minimality_samples;
    mo.tolerance = dg.minimality_tol;
    mo.frozen = &disc;
    for (std::size_t k : probe_stamps(traj.steps(), dg.minimality_stamps)) {
        mo.seed = dg.seed + k;
        CheckVerdict v = check_unilateral_minimality(traj, data, nl, traj.times[k], mo);
        v.name += "@" + std::to_string(k);
        vs.push_back(std::move(v));
    }
    CheckVerdict still = check_no_evolution(traj, dg.no_evolution_tol);
    EnergyReport er = balance_residual(traj, data, nl, evo.quad_pts);
    CheckVerdict bal;
    bal.name = "balance_stationary";
    bal.tolerance = 1e-10;
    bal.max_violation = er.max_abs_residual;
    if (!stationary) {
        still.applicable = bal.applicable = false;
        still.detail = bal.detail = "data depend on time";
    }
    still.close();
    bal.close();
    vs.push_back(still);
    vs.push_back(bal);

    if (c.cfg.output.json) {
        write_json(c.out / "energy.json", to_json(er));
        write_json(c.out / "verdicts.json", verdicts_json(vs));
    }
    if (c.normal()) {
        std::printf("m = %zu, n = %zu, tau = %.6g, max balance residual = %.4g\n", traj.steps(), data.grid.n(),
                    traj.tau, er.max_abs_residual);
        if (stationary) std::printf("no evolution: max movement %.4g\n", still.max_violation);
    }
    return print_verdicts(vs, c.normal());
}

int cmd_refine(const Invocation& inv) {
    Context c = open(inv);
    if (!c.cfg.refine) throw ConfigError("refine: block is missing");
    const RefinementTable tab =
        refinement_study(c.cfg.factory(), *c.cfg.nl, c.cfg.refine->m_list, c.cfg.refine->n_list, c.cfg.evolution);
    write_refinement_csv(c.out / "refinement.csv", tab);
    if (c.normal()) {
        std::printf("%-5s %6s %6s %14s %14s %10s\n", "study", "m", "n", "gap_V", "balance_sum", "order");
        for (const auto& r : tab.rows)
            std::printf("%-5s %6zu %6zu %14.6g %14.6g %10.4g\n", r.study.c_str(), r.m, r.n, r.gap_v, r.balance_sum,
                        r.order_estimate);
        std::printf("tau gaps decreasing: %s\n", tab.tau_gaps_decreasing ? "yes" : "NO");
    }
    return tab.tau_gaps_decreasing ? kPass : kFail;
}

int cmd_longtime(const Invocation& inv) {
    Context c = open(inv);
    if (!c.cfg.longtime) throw ConfigError("longtime: block is missing");
    const auto& lc = *c.cfg.longtime;
    const ProblemData data = c.cfg.problem();
    LongTimeOptions o;
    o.horizon = lc.horizon;
    o.m_per_unit = lc.m_per_unit;
    o.evolution = c.cfg.evolution;
    ProblemData horizon_data = data;
    horizon_data.T = lc.horizon;
    if (auto stop = gate(validate(horizon_data, *c.cfg.nl, o.evolution.validation), inv.force, o.evolution, c))
        return *stop;

    std::optional<LongTimeResult> res;
    try {
        res.emplace(run_longtime(data, lc.f_inf.sample(data.grid, 0.0), *c.cfg.nl, o));
    } catch (const EvolutionError& e) {
        return partial(c, e);
    }
    const LongTimeResult& r = *res;
    write_gap_csv(c.out / "gap.csv", r.trajectory.times, r.gap);
    write_field_csv(c.out / "z_inf.csv", data.grid, r.z_inf);
    write_trajectory(c, r.trajectory, {{"final_gap", r.final_gap}, {"monotone", r.monotone}});

    CheckVerdict mono{"gap_monotone", r.max_gap_increase, o.jitter};
    CheckVerdict fin{"final_gap", r.final_gap, lc.final_tol};
    CheckVerdict sand{"sandwich", r.sandwich_violation, o.sandwich_tol};
    std::vector<CheckVerdict> vs{mono, fin, sand};
    if (!r.sigma_time_independent || !r.f_above_limit) {
        for (auto& v : vs) {
            v.applicable = false;
            v.detail = "preconditions: sigma time-independent and f >= f_inf";
        }
    }
    for (auto& v : vs) v.close();
    if (c.cfg.output.json) write_json(c.out / "verdicts.json", verdicts_json(vs));
    if (c.normal())
        std::printf("horizon %.6g, final gap %.4g, sigma time-independent: %s, f >= f_inf: %s\n", lc.horizon,
                    r.final_gap, r.sigma_time_independent ? "yes" : "no", r.f_above_limit ? "yes" : "no");
    return print_verdicts(vs, c.normal());
}

int cmd_fracture(const Invocation& inv) {
    Context c = open(inv);
    if (!c.cfg.fracture) throw ConfigError("fracture: block is missing");
    const auto& fc = *c.cfg.fracture;
    const Grid g = fracture_grid(fc.n);
    EvolutionOptions evo = c.cfg.evolution;
    std::optional<FractureRun> res;
    try {
        res.emplace(run_fracture(fc.params, g, c.cfg.fracture_z0(g), fc.T, fc.m, evo));
    } catch (const EvolutionError& e) {
        return partial(c, e);
    }
    const FractureRun& run = *res;
    write_trajectory(c, run.trajectory, {{"eps", fc.params.eps}, {"delta_eps", fc.params.delta_eps},
                                         {"displacement_gauge", "u(-1) = 0"}});
    write_displacement_csv(c.out / "displacement.csv", run.displacement, c.cfg.output.stride);
    write_series_csv(c.out / "at_energy.csv", run.trajectory.times, run.at_energy, "energy");

    const DiscretizedData disc = discretize_time(run.data, fc.m, evo.quad_pts);
    std::vector<CheckVerdict> vs;
    vs.push_back(check_irreversibility(run.trajectory, c.cfg.diagnostics.irreversibility_tol));
    vs.push_back(check_lewy_stampacchia(run.trajectory, disc, run.data.lambda, run.nl, c.cfg.diagnostics.ls_tol));
    vs.push_back(check_fracture_consistency(run, fc.params));
    CheckVerdict still = check_no_evolution(run.trajectory, c.cfg.diagnostics.no_evolution_tol);
    if (!is_time_independent(run.data.sigma, g, fc.T)) {
        still.applicable = false;
        still.detail = "load depends on time";
        still.close();
    }
    vs.push_back(still);
    if (c.cfg.output.json) write_json(c.out / "verdicts.json", verdicts_json(vs));
    if (c.normal()) {
        std::printf("eps = %.4g, delta_eps = %.4g, lambda = f = %.6g, L = %.6g\n", fc.params.eps, fc.params.delta_eps,
                    run.data.lambda, run.nl.L);
        if (still.applicable) std::printf("no evolution: max movement %.4g\n", still.max_violation);
    }
    return print_verdicts(vs, c.normal());
}

int cmd_stationary(const Invocation& inv) {
    Context c = open(inv);
    if (!c.cfg.stationary) throw ConfigError("stationary: block is missing");
    const ProblemData data = c.cfg.problem();
    const Grid& g = data.grid;
    const auto& sc = *c.cfg.stationary;
    const Field sigma = sc.sigma ? sc.sigma->sample(g, 0.0) : data.sigma.sample(g, 0.0);
    const StationaryProblem p{g, data.z0, sc.f_inf.sample(g, 0.0), sigma, data.lambda, *c.cfg.nl};
    const ObstacleResult r = solve_stationary(p, c.cfg.evolution.solver);
    write_field_csv(c.out / "z_inf.csv", g, r.z);

    CheckVerdict below{"below_initial_datum", 0.0, 1e-12};
    CheckVerdict upper{"subsolution", 0.0, c.cfg.diagnostics.ls_tol};
    const Field lhs = elliptic_operator(g, r.z, sigma, data.lambda, *c.cfg.nl);
    for (std::size_t i = 0; i < g.n(); ++i) {
        below.record(r.z[i] - data.z0[i], 0, i);
        upper.record(lhs[i] - p.f_inf[i], 0, i);
    }
    below.close();
    upper.close();
    const std::vector<CheckVerdict> vs{below, upper};
    if (c.cfg.output.json)
        write_json(c.out / "stationary.json", {{"kkt_residual", r.kkt_residual},
                                                {"iterations", r.iters},
                                                {"active_count", r.active.size()},
                                                {"grid", grid_to_json(g)},
                                                {"verdicts", verdicts_json(vs)}});
    if (c.normal()) std::printf("kkt residual %.3g, %zu active nodes\n", r.kkt_residual, r.active.size());
    return print_verdicts(vs, c.normal());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Irreversible evolution solver: validate data, run minimizing movements, study refinement, "
                 "long-time behaviour and 1-D phase-field fracture"};
    app.require_subcommand(1);
    Invocation inv;

    struct Command {
        const char* name;
        const char* help;
        int (*fn)(const Invocation&);
    };
    const Command commands[] = {
        {"check", "validate the problem data and report every hypothesis", cmd_check},
        {"run", "run the evolution and write trajectory, energies and verdicts", cmd_run},
        {"refine", "time and space refinement study", cmd_refine},
        {"longtime", "long-horizon run against the stationary limit", cmd_longtime},
        {"fracture", "coupled phase-field fracture run", cmd_fracture},
        {"stationary", "solve the stationary limit problem", cmd_stationary},
    };
    int (*selected)(const Invocation&) = nullptr;
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("config", inv.config, "JSON configuration file")->required();
        sub->add_option("-o,--output", inv.output, "output directory (overrides output.directory)");
        sub->add_option("--seed", inv.seed, "diagnostics seed (overrides diagnostics.seed)");
        if (std::string(cmd.name) == "run" || std::string(cmd.name) == "longtime")
            sub->add_flag("--force", inv.force, "proceed past failed hypotheses other than coercivity");
        sub->callback([&selected, fn = cmd.fn] { selected = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        return selected(inv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const GridMismatch& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const ValidationFailed& e) {
        std::fprintf(stderr, "validation failed: %s\n", e.what());
        return kFail;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolver;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kSolver;
    }
}

#include "irrev/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace irrev {

void CheckVerdict::record(double violation, std::size_t k, std::size_t i) {
    if (violation > max_violation) {
        max_violation = violation;
        worst_step = k;
        worst_node = i;
    }
}

void CheckVerdict::close() { pass = applicable && max_violation <= tolerance; }

double empirical_order(double coarse, double fine, double ratio) {
    return std::log(coarse / fine) / std::log(ratio);
}

EnergyReport balance_residual(const Trajectory& traj, const ProblemData& data, const Nonlinearity& nl,
                              std::size_t quad_pts) {
    const Grid& grid = traj.grid;
    const double h = grid.h();
    EnergyReport rep;
    rep.energy = traj.energy;
    rep.derivative_fallback = !(data.f.has_analytic_dt() && data.sigma.has_analytic_dt());
    const double q = static_cast<double>(std::max<std::size_t>(quad_pts, 1));
    for (std::size_t k = 1; k <= traj.steps(); ++k) {
        const Field& z = traj.z[k];
        Field ghat(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) ghat[i] = nl.gamma_hat(z[i]);
        const double t0 = traj.times[k - 1];
        const double w = (traj.times[k] - t0) / q;
        double power = 0.0;
        for (std::size_t j = 0; j < quad_pts; ++j) {
            const double s = t0 + (static_cast<double>(j) + 0.5) * w;
            const Field ds = data.sigma.sample_dt(grid, s);
            const Field df = data.f.sample_dt(grid, s);
            double acc = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) acc += ds[i] * ghat[i] - df[i] * z[i];
            power += w * h * acc;
        }
        const double r = (traj.energy[k] - traj.energy[k - 1]) - power;
        rep.residual.push_back(r);
        rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(r));
        rep.sum_abs_residual += std::abs(r);
    }
    return rep;
}

BalanceStudy balance_order_study(const ProblemData& data, const Nonlinearity& nl,
                                 std::span<const std::size_t> m_list, const EvolutionOptions& opts) {
    BalanceStudy st;
    for (std::size_t j = 0; j < m_list.size(); ++j) {
        const Trajectory traj = run_evolution(data, nl, m_list[j], opts);
        const EnergyReport rep = balance_residual(traj, data, nl, opts.quad_pts);
        st.m.push_back(m_list[j]);
        st.sum_abs.push_back(rep.sum_abs_residual);
        if (j == 0) {
            st.order.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            const double ord = empirical_order(st.sum_abs[j - 1], st.sum_abs[j],
                                               static_cast<double>(m_list[j]) / static_cast<double>(m_list[j - 1]));
            st.order.push_back(ord);
            st.min_order = std::isnan(st.min_order) ? ord : std::min(st.min_order, ord);
        }
    }
    return st;
}

namespace {

std::size_t stamp_index(const Trajectory& traj, double t) {
    const double slack = 1e-9 * std::max(1.0, traj.times.back());
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        if (std::abs(traj.times[k] - t) <= slack) return k;
    std::ostringstream os;
    os << "time " << t << " is not a stored stamp";
    throw OutOfRange(os.str());
}

}  // namespace

CheckVerdict check_unilateral_minimality(const Trajectory& traj, const ProblemData& data,
                                         const Nonlinearity& nl, double t, const MinimalityOptions& opts) {
    const Grid& grid = traj.grid;
    const std::size_t k = stamp_index(traj, t);
    const Field& z = traj.z[k];

    Field load, sigma;
    if (opts.frozen && k >= 1) {
        load = opts.frozen->f.at(k);
        sigma = opts.frozen->sigma.at(k);
    } else {
        load = data.f.sample(grid, traj.times[k]);
        sigma = data.sigma.sample(grid, traj.times[k]);
    }
    const double ez = frozen_energy(grid, z, load, sigma, data.lambda, nl);

    CheckVerdict v;
    v.name = "unilateral_minimality";
    v.tolerance = opts.tolerance;
    v.worst_step = k;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double ref = std::max(1.0, norm_max(z));
    const double length = grid.b() - grid.a();

    double worst_margin = std::numeric_limits<double>::infinity();
    std::size_t worst_sample = 0;
    Field bump(grid.n());
    for (std::size_t s = 0; s < opts.n_samples; ++s) {
        const double amp = ref * std::pow(10.0, -6.0 * unit(rng)) * std::abs(gauss(rng));
        Field v_field = z;
        switch (s % 3) {
            case 0: {
                const auto i = static_cast<std::size_t>(unit(rng) * static_cast<double>(grid.n())) % grid.n();
                v_field[i] -= amp;
                break;
            }
            case 1: {
                const double c = grid.a() + length * unit(rng);
                const double w = 2.0 * grid.h() + (0.25 * length - 2.0 * grid.h()) * unit(rng);
                for (std::size_t i = 0; i < grid.n(); ++i) {
                    const double r = (grid.node(i) - c) / w;
                    v_field[i] -= amp * std::exp(-r * r);
                }
                break;
            }
            default:
                for (double& x : v_field) x -= amp;
        }
        const double margin = frozen_energy(grid, v_field, load, sigma, data.lambda, nl) - ez;
        if (margin < worst_margin) {
            worst_margin = margin;
            worst_sample = s;
        }
    }
    if (opts.n_samples == 0) worst_margin = 0.0;
    v.max_violation = std::max(0.0, -worst_margin);
    std::ostringstream os;
    os << "worst margin " << worst_margin << " (sample " << worst_sample << " of " << opts.n_samples << ") at t=" << traj.times[k]
       << (opts.frozen && k >= 1 ? " (frozen step data)" : " (data at t)");
    v.detail = os.str();
    v.close();
    return v;
}

CheckVerdict check_lewy_stampacchia(const Trajectory& traj, const DiscretizedData& disc, double lambda,
                                    const Nonlinearity& nl, double tol) {
    const Grid& grid = traj.grid;
    CheckVerdict v;
    v.name = "lewy_stampacchia";
    v.tolerance = tol;
    if (disc.m != traj.steps()) {
        v.applicable = false;
        v.detail = "trajectory and step data have different step counts";
        v.close();
        return v;
    }
    for (std::size_t k = 1; k <= traj.steps(); ++k) {
        const Field& zk = traj.z[k];
        const Field& zp = traj.z[k - 1];
        const Field& sk = disc.sigma[k];
        const Field& fk = disc.f[k];
        const Field mid = elliptic_operator(grid, zk, sk, lambda, nl);
        Field prev = neg_laplacian(grid, zp);
        for (std::size_t i = 0; i < grid.n(); ++i) {
            prev[i] += lambda * zp[i] + sk[i] * nl.gamma(zk[i]);
            const double lower = std::min(fk[i], prev[i]);
            v.record(std::max(lower - mid[i], mid[i] - fk[i]), k, i);
        }
    }
    v.close();
    return v;
}

CheckVerdict check_irreversibility(const Trajectory& traj, double tol) {
    CheckVerdict v;
    v.name = "irreversibility";
    v.tolerance = tol;
    for (std::size_t k = 1; k <= traj.steps(); ++k)
        for (std::size_t i = 0; i < traj.z[k].size(); ++i) v.record(traj.z[k][i] - traj.z[k - 1][i], k, i);
    v.close();
    return v;
}

CheckVerdict check_dissipation(const Trajectory& traj, const DiscretizedData& disc, double lambda,
                               const Nonlinearity& nl, double tol) {
    CheckVerdict v;
    v.name = "dissipation_sign";
    v.tolerance = tol;
    for (std::size_t k = 1; k <= traj.steps(); ++k) {
        const double jk = step_functional(traj.grid, traj.z[k], disc.f[k], disc.sigma[k], lambda, nl);
        const double jp = step_functional(traj.grid, traj.z[k - 1], disc.f[k], disc.sigma[k], lambda, nl);
        v.record((jk - jp) / std::max(1.0, std::abs(jp)), k, 0);
    }
    v.close();
    return v;
}

CheckVerdict check_energy_identity(const Trajectory& traj, const ProblemData& data, const Nonlinearity& nl) {
    CheckVerdict v;
    v.name = "energy_identity";
    v.tolerance = 0.0;
    for (std::size_t k = 0; k < traj.z.size(); ++k) {
        const double e = energy(traj.grid, data, nl, traj.z[k], traj.times[k]);
        v.record(e == traj.energy[k] ? 0.0 : std::abs(e - traj.energy[k]) + 1e-300, k, 0);
    }
    v.close();
    return v;
}

CheckVerdict check_no_evolution(const Trajectory& traj, double tol) {
    CheckVerdict v;
    v.name = "no_evolution";
    v.tolerance = tol;
    for (std::size_t k = 1; k < traj.z.size(); ++k)
        for (std::size_t i = 0; i < traj.z[k].size(); ++i) v.record(std::abs(traj.z[k][i] - traj.z[0][i]), k, i);
    v.close();
    return v;
}

CheckVerdict compare_trajectories(const Trajectory& a, const Trajectory& b, double tol) {
    CheckVerdict v;
    v.name = "comparison";
    v.tolerance = tol;
    if (a.z.size() != b.z.size() || !(a.grid == b.grid)) {
        v.applicable = false;
        v.detail = "trajectories are not on the same grid and time stamps";
        v.close();
        return v;
    }
    for (std::size_t k = 0; k < a.z.size(); ++k)
        for (std::size_t i = 0; i < a.z[k].size(); ++i) v.record(a.z[k][i] - b.z[k][i], k, i);
    v.close();
    return v;
}

CheckVerdict check_comparison(const ProblemData& a, const ProblemData& b, const Nonlinearity& nl,
                              std::size_t m, const EvolutionOptions& opts, double tol) {
    CheckVerdict v;
    v.name = "comparison";
    v.tolerance = tol;
    auto inapplicable = [&](const std::string& why) {
        v.applicable = false;
        v.detail = why;
        v.close();
        return v;
    };
    if (!(a.grid == b.grid) || a.lambda != b.lambda || a.T != b.T)
        return inapplicable("grid, lambda or horizon differ");
    const Grid& grid = a.grid;
    for (std::size_t i = 0; i < grid.n(); ++i)
        if (a.z0[i] > b.z0[i]) return inapplicable("z0A <= z0B does not hold");
    const std::size_t ns = 64;
    for (std::size_t j = 0; j <= ns; ++j) {
        const double t = a.T * static_cast<double>(j) / static_cast<double>(ns);
        const Field fa = a.f.sample(grid, t), fb = b.f.sample(grid, t);
        const Field sa = a.sigma.sample(grid, t), sb = b.sigma.sample(grid, t);
        for (std::size_t i = 0; i < grid.n(); ++i) {
            if (fa[i] > fb[i]) return inapplicable("fA <= fB does not hold on samples");
            if (std::abs(sa[i] - sb[i]) > 1e-14 * (1.0 + std::abs(sa[i])))
                return inapplicable("sigma differs between the two problems");
        }
    }
    const Trajectory ta = run_evolution(a, nl, m, opts);
    const Trajectory tb = run_evolution(b, nl, m, opts);
    return compare_trajectories(ta, tb, tol);
}

double time_refinement_gap(const Trajectory& coarse, const Trajectory& fine) {
    double gap = 0.0;
    for (std::size_t k = 0; k < coarse.times.size(); ++k) {
        const Field zf = interp_linear(fine, coarse.times[k]);
        gap = std::max(gap, norm_v(coarse.grid, difference(coarse.z[k], zf)));
    }
    return gap;
}

namespace {

double increment_trend(const Trajectory& traj) {
    double worst = 0.0;
    for (std::size_t k = 1; k <= traj.steps(); ++k)
        worst = std::max(worst, norm_v(traj.grid, difference(traj.z[k], traj.z[k - 1])));
    return worst / std::sqrt(traj.tau);
}

double space_refinement_gap(const Trajectory& coarse, const Trajectory& fine) {
    double gap = 0.0;
    for (std::size_t k = 0; k < coarse.times.size(); ++k) {
        const Field zc = transfer(coarse.grid, coarse.z[k], fine.grid);
        gap = std::max(gap, norm_v(fine.grid, difference(fine.z[k], zc)));
    }
    return gap;
}

}  // namespace

RefinementTable refinement_study(const ProblemFactory& make, const Nonlinearity& nl,
                                 std::span<const std::size_t> m_list, std::span<const std::size_t> n_list,
                                 const EvolutionOptions& opts) {
    if (m_list.empty() || n_list.empty()) throw ConfigError("refinement study needs non-empty m and n lists");
    RefinementTable table;

    const ProblemData base = make(n_list.front());
    std::vector<Trajectory> runs;
    for (std::size_t j = 0; j < m_list.size(); ++j) {
        runs.push_back(run_evolution(base, nl, m_list[j], opts));
        RefinementRow row;
        row.study = "tau";
        row.m = m_list[j];
        row.n = n_list.front();
        row.balance_sum = balance_residual(runs.back(), base, nl, opts.quad_pts).sum_abs_residual;
        row.increment_trend = increment_trend(runs.back());
        if (j > 0) {
            row.gap_v = time_refinement_gap(runs[j - 1], runs[j]);
            const double ratio = static_cast<double>(m_list[j]) / static_cast<double>(m_list[j - 1]);
            row.order_estimate = empirical_order(table.rows.back().balance_sum, row.balance_sum, ratio);
            if (j > 1 && !(row.gap_v < table.rows.back().gap_v)) table.tau_gaps_decreasing = false;
        }
        table.rows.push_back(row);
    }

    const std::size_t m0 = m_list.front();
    Trajectory prev = runs.front();
    for (std::size_t j = 0; j < n_list.size(); ++j) {
        const ProblemData data = j == 0 ? base : make(n_list[j]);
        Trajectory traj = j == 0 ? runs.front() : run_evolution(data, nl, m0, opts);
        RefinementRow row;
        row.study = "h";
        row.m = m0;
        row.n = n_list[j];
        row.balance_sum = balance_residual(traj, data, nl, opts.quad_pts).sum_abs_residual;
        row.increment_trend = increment_trend(traj);
        if (j > 0) {
            row.gap_v = space_refinement_gap(prev, traj);
            if (j > 1) {
                const double ratio = prev.grid.h() / traj.grid.h();
                const double last_gap = table.rows.back().gap_v;
                row.order_estimate = empirical_order(last_gap, row.gap_v, ratio);
            }
        }
        table.rows.push_back(row);
        prev = std::move(traj);
    }
    return table;
}

}  // namespace irrev

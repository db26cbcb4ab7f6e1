#include "fracwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracwave {

void SolveConfig::validate() const {
    time.validate();
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw ConfigError("solve.cfl_safety must lie in (0,1]");
    if (!(picard_tol > 0.0)) throw ConfigError("solve.picard_tol must be positive");
    if (picard_max_iter < 1) throw ConfigError("solve.picard_max_iter must be >= 1");
    if (!(coefficient_floor > 0.0 && coefficient_floor < 1.0))
        throw ConfigError("solve.coefficient_floor must lie in (0,1)");
    if (!(stepper_tol > 0.0)) throw ConfigError("solve.stepper_tol must be positive");
}

namespace {

void check_series(const TimeSeriesField& f, const SolveConfig& cfg) {
    cfg.validate();
    if (!(f.time == cfg.time))
        throw ConfigError("solver: source time grid does not match the solve configuration");
    if (static_cast<int>(f.data.size()) != f.snapshots() * f.modes())
        throw ConfigError("solver: malformed time series");
    if (f.time.n_steps < 3) throw ConfigError("solver: need at least 3 time steps");
}

void check_cfl(const EigenBasis& basis, const SolveConfig& cfg, double a_min) {
    const double dt = cfg.time.dt();
    const double dt_max = cfg.cfl_safety * 2.0 * std::sqrt(a_min) / std::sqrt(basis.lambda_max());
    if (dt > dt_max) {
        std::ostringstream msg;
        msg << "CFL violation: dt = " << dt << " exceeds " << dt_max
            << "; increase time.n_steps to at least " << static_cast<int>(std::ceil(cfg.time.T / dt_max));
        throw ConfigError(msg.str());
    }
}

struct ModeCoeffs {
    std::vector<double> lam, lam_s, inv_alpha, beta, gamma;
    double dt;
    ModeCoeffs(const EigenBasis& basis, double s, double dt_) : dt(dt_) {
        const int m = basis.size();
        lam.resize(m);
        lam_s.resize(m);
        inv_alpha.resize(m);
        beta.resize(m);
        gamma.resize(m);
        const double idt2 = 1.0 / (dt * dt);
        for (int k = 0; k < m; ++k) {
            lam[k] = basis.lambda(k);
            lam_s[k] = std::pow(lam[k], s);
            inv_alpha[k] = 1.0 / (idt2 + lam_s[k] / (2.0 * dt));
            beta[k] = lam[k] - 2.0 * idt2;
            gamma[k] = idt2 - lam_s[k] / (2.0 * dt);
        }
    }
};

// leapfrog with trapezoidal damping, constant unit mass coefficient
void march_linear(const ModeCoeffs& mc, const TimeSeriesField& f, TimeSeriesField& u) {
    const int m = u.modes();
    const int N = u.time.n_steps;
    const double half_dt2 = 0.5 * mc.dt * mc.dt;
    auto f0 = f.snapshot(0);
    auto u1 = u.snapshot(1);
    for (int k = 0; k < m; ++k) u1[k] = half_dt2 * f0[k];
    for (int n = 1; n < N; ++n) {
        auto fn = f.snapshot(n);
        auto um = u.snapshot(n - 1);
        auto uc = u.snapshot(n);
        auto up = u.snapshot(n + 1);
        for (int k = 0; k < m; ++k)
            up[k] = (fn[k] - mc.beta[k] * uc[k] - mc.gamma[k] * um[k]) * mc.inv_alpha[k];
    }
}

// variable mass coefficient: each step solves
//   (a^n/dt^2) w + (-Delta)^s w /(2dt) = rhs
// by preconditioned CG in grid space (spectral-diagonal preconditioner)
void march_variable(const ModeCoeffs& mc, const EigenBasis& basis,
                    const std::vector<double>& a,  // (N+1) x nodes
                    const TimeSeriesField& f, const SolveConfig& cfg, TimeSeriesField& u) {
    const int m = u.modes();
    const int nodes = basis.domain().total_nodes();
    const int N = u.time.n_steps;
    const double dt = mc.dt;
    const double idt2 = 1.0 / (dt * dt);

    std::vector<double> ug_prev(nodes, 0.0), ug_cur(nodes), scratch_spec(m), scratch_grid(nodes);
    std::vector<double> rhs(nodes), w(nodes), r(nodes), z(nodes), p(nodes), Mp(nodes), precond(m);

    // start: u^1 = dt^2/2 * f^0 / a^0 pointwise
    basis.synthesize(f.snapshot(0), scratch_grid);
    for (int j = 0; j < nodes; ++j) scratch_grid[j] = 0.5 * dt * dt * scratch_grid[j] / a[j];
    basis.analyze(scratch_grid, u.snapshot(1));
    ug_cur = scratch_grid;

    auto apply_damping_grid = [&](const std::vector<double>& in, std::vector<double>& out) {
        basis.analyze(in, scratch_spec);
        for (int k = 0; k < m; ++k) scratch_spec[k] *= mc.lam_s[k] / (2.0 * dt);
        basis.synthesize(scratch_spec, out);
    };

    for (int n = 1; n < N; ++n) {
        const double* an = a.data() + static_cast<size_t>(n) * nodes;
        auto fn = f.snapshot(n);
        auto uc = u.snapshot(n);
        auto um = u.snapshot(n - 1);
        // rhs = synth(f^n - lam u^n + lam^s u^{n-1}/(2dt)) + a^n (2u^n - u^{n-1})/dt^2
        for (int k = 0; k < m; ++k)
            scratch_spec[k] = fn[k] - mc.lam[k] * uc[k] + mc.lam_s[k] / (2.0 * dt) * um[k];
        basis.synthesize(scratch_spec, rhs);
        for (int j = 0; j < nodes; ++j)
            rhs[j] += an[j] * idt2 * (2.0 * ug_cur[j] - ug_prev[j]);

        double alo = an[0], ahi = an[0];
        for (int j = 1; j < nodes; ++j) {
            alo = std::min(alo, an[j]);
            ahi = std::max(ahi, an[j]);
        }
        const double abar = 0.5 * (alo + ahi);
        for (int k = 0; k < m; ++k) precond[k] = 1.0 / (abar * idt2 + mc.lam_s[k] / (2.0 * dt));

        auto apply_precond = [&](const std::vector<double>& in, std::vector<double>& out) {
            basis.analyze(in, scratch_spec);
            for (int k = 0; k < m; ++k) scratch_spec[k] *= precond[k];
            basis.synthesize(scratch_spec, out);
        };
        auto apply_op = [&](const std::vector<double>& in, std::vector<double>& out) {
            apply_damping_grid(in, out);
            for (int j = 0; j < nodes; ++j) out[j] += an[j] * idt2 * in[j];
        };

        apply_precond(rhs, w);
        apply_op(w, Mp);
        double rhs_norm = 0.0;
        for (int j = 0; j < nodes; ++j) {
            r[j] = rhs[j] - Mp[j];
            rhs_norm += rhs[j] * rhs[j];
        }
        rhs_norm = std::max(std::sqrt(rhs_norm), 1e-300);
        apply_precond(r, z);
        p = z;
        double rz = 0.0;
        for (int j = 0; j < nodes; ++j) rz += r[j] * z[j];
        bool done = false;
        for (int it = 0; it < cfg.stepper_max_iter; ++it) {
            double rnorm = 0.0;
            for (int j = 0; j < nodes; ++j) rnorm += r[j] * r[j];
            if (std::sqrt(rnorm) <= cfg.stepper_tol * rhs_norm) {
                done = true;
                break;
            }
            apply_op(p, Mp);
            double pMp = 0.0;
            for (int j = 0; j < nodes; ++j) pMp += p[j] * Mp[j];
            const double step = rz / pMp;
            for (int j = 0; j < nodes; ++j) {
                w[j] += step * p[j];
                r[j] -= step * Mp[j];
            }
            apply_precond(r, z);
            double rz2 = 0.0;
            for (int j = 0; j < nodes; ++j) rz2 += r[j] * z[j];
            const double mix = rz2 / rz;
            for (int j = 0; j < nodes; ++j) p[j] = z[j] + mix * p[j];
            rz = rz2;
        }
        if (!done)
            throw NumericalError("implicit damping step failed to converge at step " +
                                 std::to_string(n));
        basis.analyze(w, u.snapshot(n + 1));
        ug_prev.swap(ug_cur);
        ug_cur = w;
    }
}

// grid values of every snapshot
std::vector<double> synthesize_series(const TimeSeriesField& u) {
    const int nodes = u.basis->domain().total_nodes();
    std::vector<double> g(static_cast<size_t>(u.snapshots()) * nodes);
    for (int n = 0; n < u.snapshots(); ++n)
        u.basis->synthesize(u.snapshot(n), {g.data() + static_cast<size_t>(n) * nodes,
                                            static_cast<size_t>(nodes)});
    return g;
}

struct CoefficientStats {
    double min = 1.0;
    int node = 0;
    int step = 0;
};

CoefficientStats mass_coefficient_stats(const std::vector<double>& kappa_vals,
                                        const std::vector<double>& v_grid, int nodes, int ns) {
    CoefficientStats st;
    st.min = 1.0 - 2.0 * kappa_vals[0] * v_grid[0];
    for (int n = 0; n < ns; ++n) {
        const size_t off = static_cast<size_t>(n) * nodes;
        for (int j = 0; j < nodes; ++j) {
            const double a = 1.0 - 2.0 * kappa_vals[off + j] * v_grid[off + j];
            if (a < st.min) {
                st.min = a;
                st.node = j;
                st.step = n;
            }
        }
    }
    return st;
}

TimeSeriesField reverse_time(const TimeSeriesField& f) {
    TimeSeriesField out{f.basis, f.time, std::vector<double>(f.data.size())};
    const int ns = f.snapshots();
    for (int n = 0; n < ns; ++n) {
        auto src = f.snapshot(ns - 1 - n);
        auto dst = out.snapshot(n);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

} // namespace

TimeSeriesField solve_linear(const TimeSeriesField& f, const FractionalOrder& s, const SolveConfig& cfg) {
    s.validate();
    check_series(f, cfg);
    check_cfl(*f.basis, cfg, 1.0);
    TimeSeriesField u = TimeSeriesField::zeros(f.basis, f.time);
    const ModeCoeffs mc(*f.basis, s.s, f.time.dt());
    march_linear(mc, f, u);
    return u;
}

TimeSeriesField solve_dual_linear(const TimeSeriesField& g, const FractionalOrder& s,
                                  const SolveConfig& cfg) {
    return reverse_time(solve_linear(reverse_time(g), s, cfg));
}

EnergyReport energy_report(const TimeSeriesField& u, const TimeSeriesField& f, const FractionalOrder& s) {
    s.validate();
    if (u.data.size() != f.data.size() || !(u.time == f.time))
        throw ConfigError("energy_report: u and f shapes differ");
    const int ns = u.snapshots();
    const int m = u.modes();
    const double dt = u.time.dt();
    EnergyReport rep;
    rep.kinetic.resize(ns);
    rep.potential.resize(ns);
    rep.damping_cumulative.resize(ns);
    rep.source_cumulative.resize(ns);
    rep.staggered_energy.resize(ns - 1);

    TimeSeriesField du = dt_series(u);
    std::vector<double> damping_rate(ns), source_rate(ns);
    for (int n = 0; n < ns; ++n) {
        auto us = u.snapshot(n);
        auto ds = du.snapshot(n);
        auto fs = f.snapshot(n);
        double kin = 0.0, pot = 0.0, dmp = 0.0, src = 0.0;
        for (int k = 0; k < m; ++k) {
            const double lam = u.basis->lambda(k);
            kin += ds[k] * ds[k];
            pot += lam * us[k] * us[k];
            dmp += std::pow(lam, s.s) * ds[k] * ds[k];
            src += fs[k] * fs[k];
        }
        rep.kinetic[n] = kin;
        rep.potential[n] = pot;
        damping_rate[n] = dmp;
        source_rate[n] = src;
    }
    for (int n = 1; n < ns; ++n) {
        rep.damping_cumulative[n] =
            rep.damping_cumulative[n - 1] + 0.5 * dt * (damping_rate[n] + damping_rate[n - 1]);
        rep.source_cumulative[n] =
            rep.source_cumulative[n - 1] + 0.5 * dt * (source_rate[n] + source_rate[n - 1]);
    }
    for (int n = 0; n + 1 < ns; ++n) {
        auto uc = u.snapshot(n);
        auto up = u.snapshot(n + 1);
        double kin = 0.0, cross = 0.0;
        for (int k = 0; k < m; ++k) {
            const double v = (up[k] - uc[k]) / dt;
            kin += v * v;
            cross += u.basis->lambda(k) * up[k] * uc[k];
        }
        rep.staggered_energy[n] = 0.5 * kin + 0.5 * cross;
    }
    const double src_total = rep.source_cumulative[ns - 1];
    rep.ratio_max = 0.0;
    for (int n = 1; n < ns; ++n) {
        if (rep.source_cumulative[n] > 1e-14 * std::max(src_total, 1e-300)) {
            const double lhs = rep.kinetic[n] + rep.potential[n] + rep.damping_cumulative[n];
            rep.ratio_max = std::max(rep.ratio_max, lhs / rep.source_cumulative[n]);
        }
    }
    return rep;
}

TimeSeriesField solve_variable_coefficient(const KappaField& kappa, const TimeSeriesField& v,
                                           const TimeSeriesField& f, const FractionalOrder& s,
                                           const SolveConfig& cfg) {
    s.validate();
    check_series(f, cfg);
    if (v.data.size() != f.data.size() || !(v.time == f.time))
        throw ConfigError("solve_variable_coefficient: v and f shapes differ");
    const EigenBasis& basis = *f.basis;
    const int nodes = basis.domain().total_nodes();
    const int ns = f.snapshots();

    const KappaField::Sample ks = kappa.sample(basis, f.time);
    const std::vector<double> vg = synthesize_series(v);
    std::vector<double> a(static_cast<size_t>(ns) * nodes);
    bool unit = true;
    for (size_t i = 0; i < a.size(); ++i) {
        a[i] = 1.0 - 2.0 * ks.value[i] * vg[i];
        unit = unit && a[i] == 1.0;
    }

    TimeSeriesField u = TimeSeriesField::zeros(f.basis, f.time);
    const ModeCoeffs mc(basis, s.s, f.time.dt());
    if (unit) {
        check_cfl(basis, cfg, 1.0);
        march_linear(mc, f, u);
        return u;
    }
    const CoefficientStats st = mass_coefficient_stats(ks.value, vg, nodes, ns);
    if (st.min < cfg.coefficient_floor) {
        std::ostringstream msg;
        msg << "mass coefficient 1 - 2*kappa*v degenerated: min = " << st.min << " at node "
            << st.node << ", time step " << st.step << " (floor " << cfg.coefficient_floor << ")";
        throw DegeneracyError(msg.str(), st.min, st.node, st.step);
    }
    check_cfl(basis, cfg, st.min);
    march_variable(mc, basis, a, f, cfg, u);
    return u;
}

NonlinearSolveResult solve_nonlinear(const KappaField& kappa, const TimeSeriesField& f,
                                     const FractionalOrder& s, const SolveConfig& cfg) {
    s.validate();
    check_series(f, cfg);
    const EigenBasis& basis = *f.basis;
    const int nodes = basis.domain().total_nodes();
    const int ns = f.snapshots();
    const double dt = f.time.dt();

    NonlinearSolveResult res;
    if (kappa.is_zero()) {
        res.u = solve_linear(f, s, cfg);
        res.outer_iterations = 1;
        res.residual_history = {0.0};
        res.coefficient_min = 1.0;
        return res;
    }

    const KappaField::Sample ks = kappa.sample(basis, f.time);
    TimeSeriesField v = TimeSeriesField::zeros(f.basis, f.time);
    std::vector<double> vg(static_cast<size_t>(ns) * nodes, 0.0);
    std::vector<double> dvg(vg.size()), extra(vg.size());
    TimeSeriesField fe = TimeSeriesField::zeros(f.basis, f.time);
    int rising = 0;

    for (int iter = 1; iter <= cfg.picard_max_iter; ++iter) {
        // a = 1 - 2 kappa v and the expanded source terms, on the grid
        dt_grid_series(vg, dvg, ns, nodes, dt);
        for (size_t i = 0; i < vg.size(); ++i)
            extra[i] = 2.0 * ks.value[i] * dvg[i] * dvg[i] + 4.0 * ks.dt[i] * vg[i] * dvg[i] +
                       ks.dtt[i] * vg[i] * vg[i];
        for (int n = 0; n < ns; ++n) {
            basis.analyze({extra.data() + static_cast<size_t>(n) * nodes, static_cast<size_t>(nodes)},
                          fe.snapshot(n));
            auto fs = f.snapshot(n);
            auto es = fe.snapshot(n);
            for (int k = 0; k < basis.size(); ++k) es[k] += fs[k];
        }
        TimeSeriesField u = solve_variable_coefficient(kappa, v, fe, s, cfg);
        const double resid = z1_norm(lincomb(1.0, u, -1.0, v));
        if (!res.residual_history.empty() && resid > res.residual_history.back()) {
            if (++rising >= 3)
                throw NumericalError(
                    "Picard iteration is not contracting (residual rose 3 times in a row); "
                    "the source amplitude is too large for the small-data regime");
        } else {
            rising = 0;
        }
        res.residual_history.push_back(resid);
        v = std::move(u);
        for (int n = 0; n < ns; ++n) {
            basis.synthesize(v.snapshot(n),
                             {vg.data() + static_cast<size_t>(n) * nodes, static_cast<size_t>(nodes)});
        }
        res.outer_iterations = iter;
        if (resid <= cfg.picard_tol) {
            res.u = std::move(v);
            const CoefficientStats st = mass_coefficient_stats(ks.value, vg, nodes, ns);
            res.coefficient_min = st.min;
            return res;
        }
    }
    throw NumericalError("Picard iteration did not converge within picard_max_iter = " +
                         std::to_string(cfg.picard_max_iter));
}

double check_mass_coefficient(const KappaField& kappa, const TimeSeriesField& v) {
    const EigenBasis& basis = *v.basis;
    const KappaField::Sample ks = kappa.sample(basis, v.time);
    const std::vector<double> vg = synthesize_series(v);
    return mass_coefficient_stats(ks.value, vg, basis.domain().total_nodes(), v.snapshots()).min;
}

} // namespace fracwave

#include "fracwave/runge.hpp"

#include <cmath>

namespace fracwave {

TimeSeriesField forward_restriction(const TimeSeriesField& f, const MeasurementWindow& window,
                                    const FractionalOrder& s, const SolveConfig& cfg) {
    return mask_to_complement(solve_linear(mask_to_window(f, window), s, cfg), window);
}

TimeSeriesField adjoint_restriction(const TimeSeriesField& g, const MeasurementWindow& window,
                                    const FractionalOrder& s, const SolveConfig& cfg) {
    return mask_to_window(solve_dual_linear(mask_to_complement(g, window), s, cfg), window);
}

RungeSolution design_source(const RungeProblem& problem, const FractionalOrder& s,
                            const SolveConfig& cfg) {
    if (!(problem.alpha > 0.0)) throw ConfigError("runge: alpha must be positive");
    if (problem.cg_max_iter < 1) throw ConfigError("runge: cg_max_iter must be >= 1");
    const MeasurementWindow& W = problem.window;
    W.validate(problem.target.basis->domain());

    // the target must live off W; tolerate only round-off mass inside
    const TimeSeriesField g = mask_to_complement(problem.target, W);
    {
        const double full = space_time_norm(problem.target);
        const double kept = space_time_norm(g);
        if (full > 0.0 && std::abs(full - kept) > 1e-10 * full)
            throw ConfigError("runge: target has significant mass on the window W");
    }

    auto A = [&](const TimeSeriesField& x) { return forward_restriction(x, W, s, cfg); };
    auto At = [&](const TimeSeriesField& x) { return adjoint_restriction(x, W, s, cfg); };

    RungeSolution sol;
    const double gnorm = space_time_norm(g);
    TimeSeriesField rhs = At(g);
    const double rhs_norm = space_time_norm(rhs);
    TimeSeriesField f = TimeSeriesField::zeros(g.basis, g.time);
    if (rhs_norm == 0.0 || gnorm == 0.0) {
        sol.f = std::move(f);
        sol.final_relative_residual = gnorm == 0.0 ? 0.0 : 1.0;
        sol.converged = true;
        return sol;
    }
    TimeSeriesField r = rhs;  // normal-equation residual
    TimeSeriesField p = r;
    double rr = space_time_inner(r, r);
    for (int it = 0; it < problem.cg_max_iter; ++it) {
        TimeSeriesField Np = lincomb(1.0, At(A(p)), problem.alpha, p);
        const double pNp = space_time_inner(p, Np);
        if (!(pNp > 0.0)) break;  // numerical stagnation
        const double step = rr / pNp;
        f = lincomb(1.0, f, step, p);
        r = lincomb(1.0, r, -step, Np);
        sol.residual_history.push_back(space_time_norm(lincomb(1.0, A(f), -1.0, g)) / gnorm);
        const double rr_next = space_time_inner(r, r);
        if (std::sqrt(rr_next) <= problem.cg_tol * rhs_norm) {
            sol.converged = true;
            rr = rr_next;
            break;
        }
        p = lincomb(1.0, r, rr_next / rr, p);
        rr = rr_next;
    }
    sol.final_relative_residual =
        sol.residual_history.empty() ? 1.0 : sol.residual_history.back();
    sol.f = mask_to_window(f, W);  // masked by construction; idempotent
    return sol;
}

std::pair<RungeSolution, RungeSolution> runge_pair_for_inversion(
    const TimeSeriesField& kappa_difference_target, const MeasurementWindow& window,
    const FractionalOrder& s, const SolveConfig& cfg, double alpha, int cg_max_iter, double cg_tol) {
    const BasisPtr basis = kappa_difference_target.basis;
    const DomainSpec& dom = basis->domain();
    // target identically one on the complement
    TimeSeriesField ones = TimeSeriesField::zeros(basis, kappa_difference_target.time);
    {
        std::vector<double> grid(dom.total_nodes(), 1.0);
        for (int n = 0; n < ones.snapshots(); ++n) basis->analyze(grid, ones.snapshot(n));
        ones = mask_to_complement(ones, window);
    }
    RungeProblem p1{ones, window, alpha, cg_max_iter, cg_tol};
    RungeProblem p2{mask_to_complement(kappa_difference_target, window), window, alpha, cg_max_iter,
                    cg_tol};
    return {design_source(p1, s, cfg), design_source(p2, s, cfg)};
}

} // namespace fracwave

#pragma once

#include <utility>
#include <vector>

#include "fracwave/sts.hpp"

namespace fracwave {

struct RungeProblem {
    TimeSeriesField target;  // prescribed on (Omega \ W) x (0,T), zero on W
    MeasurementWindow window;
    double alpha = 1e-6;
    int cg_max_iter = 200;
    double cg_tol = 1e-8;
};

struct RungeSolution {
    TimeSeriesField f;  // designed source, supported in W x (0,T)
    std::vector<double> residual_history;  // ||A f_k - g|| per CG iteration
    double final_relative_residual = 0.0;
    bool converged = false;
};

// A f = u_f restricted to the complement of W (f masked to W x (0,T) first)
TimeSeriesField forward_restriction(const TimeSeriesField& f, const MeasurementWindow& window,
                                    const FractionalOrder& s, const SolveConfig& cfg);

// A* g: zero-extend g off W, solve the dual final-value problem, restrict to
// W x (0,T); the exact discrete adjoint of forward_restriction
TimeSeriesField adjoint_restriction(const TimeSeriesField& g, const MeasurementWindow& window,
                                    const FractionalOrder& s, const SolveConfig& cfg);

// Tikhonov source design: CG on (A*A + alpha I) f = A* g
RungeSolution design_source(const RungeProblem& problem, const FractionalOrder& s,
                            const SolveConfig& cfg);

// the two designs used by the uniqueness argument: targets 1 and the given
// kappa difference on the complement
std::pair<RungeSolution, RungeSolution> runge_pair_for_inversion(
    const TimeSeriesField& kappa_difference_target, const MeasurementWindow& window,
    const FractionalOrder& s, const SolveConfig& cfg, double alpha, int cg_max_iter = 200,
    double cg_tol = 1e-8);

} // namespace fracwave

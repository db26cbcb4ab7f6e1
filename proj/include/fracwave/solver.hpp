#pragma once

#include <vector>

#include "fracwave/kappa.hpp"
#include "fracwave/spectral.hpp"

namespace fracwave {

struct SolveConfig {
    TimeGrid time;
    double cfl_safety = 0.9;
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
    double coefficient_floor = 0.25;  // minimum allowed 1 - 2*kappa*v
    // inner solve of the implicit damping step in the variable-coefficient path
    double stepper_tol = 1e-13;
    int stepper_max_iter = 400;
    void validate() const;
};

struct EnergyReport {
    std::vector<double> kinetic;             // ||d_t u(t_n)||_{L2}^2
    std::vector<double> potential;           // ||grad u(t_n)||_{L2}^2
    std::vector<double> damping_cumulative;  // int_0^t ||d_t (-Delta)^{s/2} u||^2
    std::vector<double> source_cumulative;   // int_0^t ||f||^2
    // scheme energy at half steps: 1/2 ||(u^{n+1}-u^n)/dt||^2 + 1/2 <grad u^{n+1}, grad u^n>;
    // provably non-increasing while f = 0
    std::vector<double> staggered_energy;
    double ratio_max = 0.0;  // max_t LHS/RHS of the energy estimate
};

struct NonlinearSolveResult {
    TimeSeriesField u;
    int outer_iterations = 0;
    std::vector<double> residual_history;  // Z1 norm of successive differences
    double coefficient_min = 1.0;          // min over the grid of 1 - 2*kappa*u
};

// d_t^2 u - Delta u + d_t (-Delta)^s u = f, zero initial data
TimeSeriesField solve_linear(const TimeSeriesField& f, const FractionalOrder& s, const SolveConfig& cfg);

// d_t^2 v - Delta v - d_t (-Delta)^s v = g, zero final data, via time reversal
TimeSeriesField solve_dual_linear(const TimeSeriesField& g, const FractionalOrder& s, const SolveConfig& cfg);

EnergyReport energy_report(const TimeSeriesField& u, const TimeSeriesField& f, const FractionalOrder& s);

// (1 - 2*kappa*v) d_t^2 u - Delta u + d_t (-Delta)^s u = f
TimeSeriesField solve_variable_coefficient(const KappaField& kappa, const TimeSeriesField& v,
                                           const TimeSeriesField& f, const FractionalOrder& s,
                                           const SolveConfig& cfg);

// full nonlinear problem d_t^2(u - kappa u^2) - Delta u + d_t (-Delta)^s u = f
// by Picard iteration on the expanded form
NonlinearSolveResult solve_nonlinear(const KappaField& kappa, const TimeSeriesField& f,
                                     const FractionalOrder& s, const SolveConfig& cfg);

// min over the space-time grid of 1 - 2*kappa*v
double check_mass_coefficient(const KappaField& kappa, const TimeSeriesField& v);

} // namespace fracwave

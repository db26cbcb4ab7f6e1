#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fracwave/runge.hpp"
#include "fracwave/sts.hpp"

namespace fracwave {

// coefficient basis for kappa: the first x_modes Dirichlet eigenfunctions in
// space times Legendre polynomials in t up to t_degree (coefficients stored
// mode-major: c[a * (t_degree+1) + b])
struct KappaBasisSpec {
    int x_modes = 8;
    int t_degree = 0;
    int size() const { return x_modes * (t_degree + 1); }
    void validate() const;
};

struct PairDatum {
    TimeSeriesField f1, f2;  // sources, supported in W x (0,T)
    TimeSeriesField w1, w2;  // their linear solutions
    WindowField v_measured;  // cross-linearized data on W x (0,T)
    double stencil_discrepancy = 0.0;  // plain vs symmetrized stencil, relative
    bool well_converged = true;
};

struct ReconstructionResult {
    std::vector<double> kappa_coeffs;
    KappaField kappa_est;
    std::vector<double> data_misfit;  // per pair, at the returned coefficients
    double relative_l2_error = -1.0;  // vs ground truth off W; -1 when unknown
    std::vector<double> cg_residual_history;
    double gradient_norm = 0.0;
    bool converged = false;
};

struct UniquenessReport {
    std::vector<double> map_difference_max;  // per source, max over W x (0,T)
    double window_identity_residual = 0.0;   // max_j ||d_t (-Delta)^s (u1-u2)||_{L2(W x (0,T))}
    double pairing_value = 0.0;      // <d_t^2((k1-k2) w1 w2), (t-T)^2 phi_1>
    double pairing_limit = 0.0;      // <(k1-k2) w1 w2, 2 phi_1>, the integrated-by-parts form
    double pairing_reference = 0.0;  // 2 int (k1-k2)^2 phi_1 over the complement
    double runge_residual_ones = 0.0;
    double runge_residual_diff = 0.0;
};

// v|_W for kappa expanded from coefficients: expand, form the second-order
// source 2 d_t^2(kappa w1 w2), solve the linear problem, restrict; linear in
// the coefficients
WindowField kappa_forward_map(const std::vector<double>& coeffs, const KappaBasisSpec& spec,
                              const PairDatum& pair, const FractionalOrder& s, const SolveConfig& cfg);

// symmetrized cross-linearization of the black-box source-to-solution map of
// kappa_true, plus the linear solutions w_j
std::vector<PairDatum> collect_pair_data(const KappaField& kappa_true,
                                         const std::vector<std::pair<TimeSeriesField, TimeSeriesField>>& sources,
                                         double eps, const MeasurementWindow& window,
                                         const FractionalOrder& s, const SolveConfig& cfg);

// regularized least squares over all pairs by CG on the normal equations
ReconstructionResult reconstruct_kappa(const std::vector<PairDatum>& data, const KappaBasisSpec& spec,
                                       double alpha, int cg_max_iter, double cg_tol,
                                       const FractionalOrder& s, const SolveConfig& cfg,
                                       const KappaField* kappa_true = nullptr);

// numerical replication of the uniqueness argument for two coefficients that
// agree on W
UniquenessReport uniqueness_experiment(const KappaField& kappa1, const KappaField& kappa2,
                                       const std::vector<TimeSeriesField>& sources, double eps,
                                       const MeasurementWindow& window, const FractionalOrder& s,
                                       const SolveConfig& cfg, double runge_alpha = 1e-4,
                                       int runge_max_iter = 80);

} // namespace fracwave

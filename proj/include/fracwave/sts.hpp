#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fracwave/solver.hpp"

namespace fracwave {

// Open observation subgrid W as half-open index ranges per axis over the
// interior nodes (0-based).
struct MeasurementWindow {
    std::array<int, 2> lo{0, 0};
    std::array<int, 2> hi{0, 1};  // second axis ignored in 1D

    void validate(const DomainSpec& domain) const;
    int node_count(const DomainSpec& domain) const;
    bool contains_flat(int flat_index, const DomainSpec& domain) const;
    // coordinate extent covered by the window nodes along an axis
    double first_coord(const DomainSpec& domain, int axis) const;
    double last_coord(const DomainSpec& domain, int axis) const;
};

// Smooth compactly supported space-time bump:
// amplitude * prod_d eta((x_d-c_d)/w_d) * eta((t-c_t)/w_t),
// eta(r) = exp(1 - 1/(1-r^2)) on |r|<1 and 0 outside, so the peak value is
// exactly the amplitude.
struct BumpSpec {
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> width{0.1, 0.1};
    double center_t = 0.5;
    double width_t = 0.25;
    double amplitude = 1.0;
};

double bump_profile(double r);

// Sample a bump on the space-time grid. When a window is given, the support
// must sit inside W x (0,T) with at least one grid cell of margin.
TimeSeriesField source_bump(const BumpSpec& spec, const BasisPtr& basis, const TimeGrid& time,
                            const MeasurementWindow* window = nullptr);

// A space-time field known only on the window nodes.
struct WindowField {
    MeasurementWindow window;
    TimeGrid time;
    int nodes_per_snapshot = 0;
    std::vector<double> values;  // snapshot-major

    int snapshots() const { return time.n_steps + 1; }
    std::span<double> snapshot(int n) {
        return {values.data() + static_cast<size_t>(n) * nodes_per_snapshot,
                static_cast<size_t>(nodes_per_snapshot)};
    }
    std::span<const double> snapshot(int n) const {
        return {values.data() + static_cast<size_t>(n) * nodes_per_snapshot,
                static_cast<size_t>(nodes_per_snapshot)};
    }
};

WindowField restrict_to_window(const TimeSeriesField& u, const MeasurementWindow& window);
// zero extension of window data back to a full (spectral) series
TimeSeriesField extend_from_window(const WindowField& w, const BasisPtr& basis);

double window_inner(const WindowField& a, const WindowField& b, const DomainSpec& domain);
double window_norm(const WindowField& a, const DomainSpec& domain);

// grid-space masks realizing the open-set conventions of the discrete
// adjoint pair: sources live in W x (0,T) (zero first and last snapshot),
// data lives off W on [0,T) (zero last snapshot)
TimeSeriesField mask_to_window(const TimeSeriesField& u, const MeasurementWindow& window);
TimeSeriesField mask_to_complement(const TimeSeriesField& u, const MeasurementWindow& window);

struct LinearizationResult {
    TimeSeriesField field;
    std::vector<double> epsilons;
    double richardson_error = 0.0;
    bool converged = true;
};

// L_{kappa,W}: f -> u|_{W x (0,T)} through the nonlinear solver
WindowField source_to_solution(const KappaField& kappa, const TimeSeriesField& f,
                               const MeasurementWindow& window, const FractionalOrder& s,
                               const SolveConfig& cfg);

// central difference d/d eps of the nonlinear solution family at eps = 0,
// Richardson-extrapolated over eps_list (sorted descending internally)
LinearizationResult first_linearization(const KappaField& kappa, const TimeSeriesField& f,
                                        std::vector<double> eps_list, const FractionalOrder& s,
                                        const SolveConfig& cfg);

enum class CrossScheme { Plain, Symmetrized, Both };

// mixed second derivative d^2/d eps1 d eps2 of the solution of
// eps1 f1 + eps2 f2 at zero; Plain is the one-sided 4-point stencil,
// Symmetrized the 2x2 central one
LinearizationResult cross_linearization(const KappaField& kappa, const TimeSeriesField& f1,
                                        const TimeSeriesField& f2, double eps1, double eps2,
                                        const FractionalOrder& s, const SolveConfig& cfg,
                                        CrossScheme scheme = CrossScheme::Symmetrized);

// 2 d_t^2 (kappa w1 w2), the source of the second-linearization equation
TimeSeriesField second_order_source(const KappaField& kappa, const TimeSeriesField& w1,
                                    const TimeSeriesField& w2);

struct VEquationCheck {
    double residual = 0.0;            // discrete residual norm of the v-equation
    double distance_to_direct = 0.0;  // distance to solve_linear(second_order_source)
};

VEquationCheck verify_v_equation(const TimeSeriesField& v, const KappaField& kappa,
                                 const TimeSeriesField& w1, const TimeSeriesField& w2,
                                 const FractionalOrder& s, const SolveConfig& cfg);

} // namespace fracwave

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "fracwave/errors.hpp"

namespace fracwave {

// Axis-aligned box (0,L1) or (0,L1)x(0,L2) with homogeneous Dirichlet
// boundary and a uniform interior grid of n_interior nodes per axis.
struct DomainSpec {
    int dim = 1;
    std::array<double, 2> lengths{3.141592653589793, 3.141592653589793};
    std::array<int, 2> n_interior{64, 1};

    void validate() const;
    int total_nodes() const { return dim == 1 ? n_interior[0] : n_interior[0] * n_interior[1]; }
    double spacing(int axis) const { return lengths[axis] / (n_interior[axis] + 1); }
    // product of grid spacings, the weight of the discrete L2 inner product
    double cell_measure() const;
    bool operator==(const DomainSpec&) const = default;
};

struct FractionalOrder {
    double s = 0.5;
    void validate() const;
};

struct TimeGrid {
    double T = 1.0;
    int n_steps = 0;
    double dt() const { return T / n_steps; }
    void validate() const;
    bool operator==(const TimeGrid&) const = default;
};

struct QuadratureConfig {
    int panel_nodes = 12;  // Gauss-Legendre nodes per dyadic panel
    int max_panels = 120;
    double check_tol = 1e-9;  // self-check threshold (refined vs base rule)
    void validate() const;
};

// Dirichlet eigenpairs of the box. Modes are stored flattened and sorted by
// nondecreasing eigenvalue; the sampled eigenfunctions are orthonormal in
// the discrete L2 inner product exactly (uniform-grid sine orthogonality).
class EigenBasis {
public:
    explicit EigenBasis(const DomainSpec& domain);

    const DomainSpec& domain() const { return domain_; }
    int size() const { return static_cast<int>(lambda_.size()); }
    double lambda(int mode) const { return lambda_[mode]; }
    const std::vector<double>& eigenvalues() const { return lambda_; }
    double lambda_max() const { return lambda_.back(); }
    // multi-index of a sorted mode (1-based per axis; second entry 0 in 1D)
    std::array<int, 2> mode_index(int mode) const;

    // nodal coordinates along an axis
    double node_coord(int axis, int j) const { return domain_.spacing(axis) * (j + 1); }

    // dense synthesis/analysis kernels used by the transforms
    void synthesize(std::span<const double> coeffs, std::span<double> grid) const;
    void analyze(std::span<const double> grid, std::span<double> coeffs) const;

private:
    DomainSpec domain_;
    std::vector<double> lambda_;       // sorted ascending
    std::vector<int> perm_;            // sorted mode -> tensor index k1*n2+k2
    std::vector<int> inv_perm_;        // tensor index -> sorted mode
    std::array<std::vector<double>, 2> sine_;   // per axis, row-major [node][mode]
    std::array<std::vector<double>, 2> sine_t_; // transposed copies [mode][node]
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

struct GridField {
    DomainSpec domain;
    std::vector<double> values;  // row-major over interior nodes
};

struct SpectralField {
    BasisPtr basis;
    std::vector<double> coeffs;  // <u, phi_k>, sorted mode order
};

// Space-time field: n_steps+1 spectral snapshots on one shared basis,
// stored contiguously snapshot-major.
struct TimeSeriesField {
    BasisPtr basis;
    TimeGrid time;
    std::vector<double> data;

    static TimeSeriesField zeros(BasisPtr basis, const TimeGrid& time);
    int modes() const { return basis->size(); }
    int snapshots() const { return time.n_steps + 1; }
    std::span<double> snapshot(int n) { return {data.data() + static_cast<size_t>(n) * modes(), static_cast<size_t>(modes())}; }
    std::span<const double> snapshot(int n) const { return {data.data() + static_cast<size_t>(n) * modes(), static_cast<size_t>(modes())}; }
};

BasisPtr build_basis(const DomainSpec& domain);

SpectralField to_spectral(const GridField& g, const BasisPtr& basis);
GridField to_grid(const SpectralField& c);

SpectralField apply_fractional_laplacian(const SpectralField& c, const FractionalOrder& s);

// (1/Gamma(-s)) int_0^inf (e^{-t lambda} - 1) t^{-1-s} dt for one eigenvalue,
// by composite quadrature; equals lambda^s analytically.
double fractional_power_quadrature(double lambda, const FractionalOrder& s, const QuadratureConfig& quad);

SpectralField semigroup_fractional_laplacian_oracle(const SpectralField& c, const FractionalOrder& s,
                                                    const QuadratureConfig& quad);

// (sum_k lambda_k^r |c_k|^2)^{1/2}, r in [-2, 2]
double sobolev_norm(const SpectralField& c, double r);

// discrete Z^m norm: sum_{k=0}^m int_0^T ||d_t^{m-k} u||_{H^k}^2 dt,
// central time differences, trapezoid in t
double zm_norm(const TimeSeriesField& u, int m);

// ---- series utilities shared by the solver and linearization modules ----

// second-order time differentiation along the snapshot axis
// (central interior, one-sided at the ends), and its exact transpose
TimeSeriesField dt_series(const TimeSeriesField& u);
TimeSeriesField dtt_series(const TimeSeriesField& u);
void dtt_transpose_in_place(std::vector<double>& series, int n_snapshots, int stride, double dt);

// same first-derivative stencil on a raw snapshot-major array
void dt_grid_series(const std::vector<double>& in, std::vector<double>& out, int n_snapshots,
                    int stride, double dt);

// discrete L2(Omega) inner product of two snapshots (Parseval: plain dot)
double snapshot_inner(std::span<const double> a, std::span<const double> b);

// space-time L2 inner product, trapezoid in time
double space_time_inner(const TimeSeriesField& a, const TimeSeriesField& b);
double space_time_norm(const TimeSeriesField& a);

// discrete Z^1 norm of a series (the solver's stopping norm)
double z1_norm(const TimeSeriesField& u);

// elementwise linear combination out = alpha*a + beta*b
TimeSeriesField lincomb(double alpha, const TimeSeriesField& a, double beta, const TimeSeriesField& b);

} // namespace fracwave

#include "fracwave/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fracwave {

void DomainSpec::validate() const {
    if (dim != 1 && dim != 2)
        throw ConfigError("domain.dim must be 1 or 2, got " + std::to_string(dim));
    for (int d = 0; d < dim; ++d) {
        if (!(lengths[d] > 0.0))
            throw ConfigError("domain length along axis " + std::to_string(d) + " must be positive");
        if (n_interior[d] < 3)
            throw ConfigError("domain.n_interior must be >= 3 per axis, got " +
                              std::to_string(n_interior[d]));
    }
}

double DomainSpec::cell_measure() const {
    double m = spacing(0);
    if (dim == 2) m *= spacing(1);
    return m;
}

void FractionalOrder::validate() const {
    if (!(s > 0.0 && s < 1.0))
        throw ConfigError("fractional order s must lie in (0,1), got " + std::to_string(s));
}

void TimeGrid::validate() const {
    if (!(T > 0.0)) throw ConfigError("time.T must be positive");
    if (n_steps < 1) throw ConfigError("time.n_steps must be >= 1");
}

void QuadratureConfig::validate() const {
    if (panel_nodes < 2) throw ConfigError("quadrature panel_nodes must be >= 2");
    if (max_panels < 4) throw ConfigError("quadrature max_panels must be >= 4");
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// one axis of the sine basis: S[j][k] = sqrt(2/L) sin((k+1) pi x_j / L)
void fill_sine(int n, double L, std::vector<double>& S, std::vector<double>& St) {
    S.assign(static_cast<size_t>(n) * n, 0.0);
    St.assign(static_cast<size_t>(n) * n, 0.0);
    const double scale = std::sqrt(2.0 / L);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const double v = scale * std::sin((j + 1) * (k + 1) * kPi / (n + 1));
            S[static_cast<size_t>(j) * n + k] = v;
            St[static_cast<size_t>(k) * n + j] = v;
        }
    }
}

} // namespace

EigenBasis::EigenBasis(const DomainSpec& domain) : domain_(domain) {
    domain_.validate();
    const int n1 = domain_.n_interior[0];
    const int n2 = domain_.dim == 2 ? domain_.n_interior[1] : 1;
    fill_sine(n1, domain_.lengths[0], sine_[0], sine_t_[0]);
    if (domain_.dim == 2) fill_sine(n2, domain_.lengths[1], sine_[1], sine_t_[1]);

    std::vector<double> lam_tensor(static_cast<size_t>(n1) * n2);
    for (int k1 = 0; k1 < n1; ++k1) {
        const double l1 = std::pow((k1 + 1) * kPi / domain_.lengths[0], 2);
        for (int k2 = 0; k2 < n2; ++k2) {
            double l = l1;
            if (domain_.dim == 2) l += std::pow((k2 + 1) * kPi / domain_.lengths[1], 2);
            lam_tensor[static_cast<size_t>(k1) * n2 + k2] = l;
        }
    }
    perm_.resize(lam_tensor.size());
    std::iota(perm_.begin(), perm_.end(), 0);
    std::stable_sort(perm_.begin(), perm_.end(),
                     [&](int a, int b) { return lam_tensor[a] < lam_tensor[b]; });
    lambda_.resize(lam_tensor.size());
    inv_perm_.resize(lam_tensor.size());
    for (size_t i = 0; i < perm_.size(); ++i) {
        lambda_[i] = lam_tensor[perm_[i]];
        inv_perm_[perm_[i]] = static_cast<int>(i);
    }
}

std::array<int, 2> EigenBasis::mode_index(int mode) const {
    const int n2 = domain_.dim == 2 ? domain_.n_interior[1] : 1;
    const int t = perm_[mode];
    if (domain_.dim == 1) return {t + 1, 0};
    return {t / n2 + 1, t % n2 + 1};
}

void EigenBasis::synthesize(std::span<const double> coeffs, std::span<double> grid) const {
    const int n1 = domain_.n_interior[0];
    if (domain_.dim == 1) {
        for (int j = 0; j < n1; ++j) {
            const double* row = sine_[0].data() + static_cast<size_t>(j) * n1;
            double acc = 0.0;
            for (int k = 0; k < n1; ++k) acc += row[k] * coeffs[inv_perm_[k]];
            grid[j] = acc;
        }
        return;
    }
    const int n2 = domain_.n_interior[1];
    // unsort into tensor layout, then G = S1 * C * S2^T
    std::vector<double> C(static_cast<size_t>(n1) * n2);
    for (int m = 0; m < size(); ++m) C[perm_[m]] = coeffs[m];
    std::vector<double> tmp(static_cast<size_t>(n1) * n2, 0.0);  // tmp = S1 * C
    for (int j = 0; j < n1; ++j) {
        const double* row = sine_[0].data() + static_cast<size_t>(j) * n1;
        double* out = tmp.data() + static_cast<size_t>(j) * n2;
        for (int k1 = 0; k1 < n1; ++k1) {
            const double w = row[k1];
            const double* crow = C.data() + static_cast<size_t>(k1) * n2;
            for (int k2 = 0; k2 < n2; ++k2) out[k2] += w * crow[k2];
        }
    }
    for (int j1 = 0; j1 < n1; ++j1) {
        for (int j2 = 0; j2 < n2; ++j2) {
            const double* trow = tmp.data() + static_cast<size_t>(j1) * n2;
            const double* srow = sine_[1].data() + static_cast<size_t>(j2) * n2;
            double acc = 0.0;
            for (int k2 = 0; k2 < n2; ++k2) acc += trow[k2] * srow[k2];
            grid[static_cast<size_t>(j1) * n2 + j2] = acc;
        }
    }
}

void EigenBasis::analyze(std::span<const double> grid, std::span<double> coeffs) const {
    const int n1 = domain_.n_interior[0];
    const double meas = domain_.cell_measure();
    if (domain_.dim == 1) {
        for (int k = 0; k < n1; ++k) {
            const double* row = sine_t_[0].data() + static_cast<size_t>(k) * n1;
            double acc = 0.0;
            for (int j = 0; j < n1; ++j) acc += row[j] * grid[j];
            coeffs[inv_perm_[k]] = meas * acc;
        }
        return;
    }
    const int n2 = domain_.n_interior[1];
    std::vector<double> tmp(static_cast<size_t>(n1) * n2, 0.0);  // tmp = S1^T * G
    for (int k1 = 0; k1 < n1; ++k1) {
        const double* row = sine_t_[0].data() + static_cast<size_t>(k1) * n1;
        double* out = tmp.data() + static_cast<size_t>(k1) * n2;
        for (int j1 = 0; j1 < n1; ++j1) {
            const double w = row[j1];
            const double* grow = grid.data() + static_cast<size_t>(j1) * n2;
            for (int j2 = 0; j2 < n2; ++j2) out[j2] += w * grow[j2];
        }
    }
    for (int k1 = 0; k1 < n1; ++k1) {
        for (int k2 = 0; k2 < n2; ++k2) {
            const double* trow = tmp.data() + static_cast<size_t>(k1) * n2;
            const double* srow = sine_t_[1].data() + static_cast<size_t>(k2) * n2;
            double acc = 0.0;
            for (int j2 = 0; j2 < n2; ++j2) acc += trow[j2] * srow[j2];
            coeffs[inv_perm_[static_cast<size_t>(k1) * n2 + k2]] = meas * acc;
        }
    }
}

BasisPtr build_basis(const DomainSpec& domain) { return std::make_shared<EigenBasis>(domain); }

TimeSeriesField TimeSeriesField::zeros(BasisPtr basis, const TimeGrid& time) {
    time.validate();
    TimeSeriesField f;
    f.basis = std::move(basis);
    f.time = time;
    f.data.assign(static_cast<size_t>(time.n_steps + 1) * f.basis->size(), 0.0);
    return f;
}

SpectralField to_spectral(const GridField& g, const BasisPtr& basis) {
    if (!(g.domain == basis->domain()))
        throw ConfigError("to_spectral: grid field domain does not match basis domain");
    if (static_cast<int>(g.values.size()) != basis->domain().total_nodes())
        throw ConfigError("to_spectral: grid field has wrong node count");
    SpectralField c{basis, std::vector<double>(basis->size())};
    basis->analyze(g.values, c.coeffs);
    return c;
}

GridField to_grid(const SpectralField& c) {
    if (static_cast<int>(c.coeffs.size()) != c.basis->size())
        throw ConfigError("to_grid: coefficient count does not match basis size");
    GridField g{c.basis->domain(), std::vector<double>(c.basis->domain().total_nodes())};
    c.basis->synthesize(c.coeffs, g.values);
    return g;
}

SpectralField apply_fractional_laplacian(const SpectralField& c, const FractionalOrder& s) {
    s.validate();
    SpectralField out{c.basis, c.coeffs};
    for (int k = 0; k < c.basis->size(); ++k) out.coeffs[k] *= std::pow(c.basis->lambda(k), s.s);
    return out;
}

namespace {

// nodes/weights of the n-point Gauss-Legendre rule on (-1,1), Newton on P_n
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

struct PanelRule {
    std::vector<double> x, w;  // mapped to (0,1)
    explicit PanelRule(int n) {
        gauss_legendre(n, x, w);
        for (int i = 0; i < n; ++i) {
            x[i] = 0.5 * (x[i] + 1.0);
            w[i] *= 0.5;
        }
    }
};

// int_0^1 expm1(-lambda t) t^{-1-s} dt: leading series on (0,a0), then
// dyadic Gauss panels from a0 to 1
double core_integral(double lambda, double s, const PanelRule& rule, int max_panels) {
    const int levels = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(lambda, 1.0)) + 10.0)));
    if (levels + 1 > max_panels)
        throw NumericalError("semigroup quadrature: panel budget exceeded for lambda = " +
                             std::to_string(lambda));
    const double a0 = std::ldexp(1.0, -levels);
    double total = 0.0;
    double fac = 1.0;  // (-lambda)^k / k!
    for (int k = 1; k <= 4; ++k) {
        fac *= -lambda / k;
        total += fac * std::pow(a0, k - s) / (k - s);
    }
    double lo = a0;
    while (lo < 1.0 - 1e-14) {
        const double hi = std::min(2.0 * lo, 1.0);
        const double len = hi - lo;
        double acc = 0.0;
        for (size_t i = 0; i < rule.x.size(); ++i) {
            const double t = lo + len * rule.x[i];
            acc += rule.w[i] * std::expm1(-lambda * t) * std::pow(t, -1.0 - s);
        }
        total += len * acc;
        lo = hi;
    }
    return total;
}

// int_1^inf expm1(-lambda t) t^{-1-s} dt = -1/s + int_0^1 e^{-lambda/tau} tau^{s-1} dtau,
// the remaining integral on dyadic panels shrinking toward tau = 0
double tail_integral(double lambda, double s, const PanelRule& rule, int max_panels) {
    double total = -1.0 / s;
    double hi = 1.0;
    for (int j = 0; j < max_panels; ++j) {
        const double lo = 0.5 * hi;
        const double len = hi - lo;
        double acc = 0.0;
        for (size_t i = 0; i < rule.x.size(); ++i) {
            const double tau = lo + len * rule.x[i];
            acc += rule.w[i] * std::exp(-lambda / tau) * std::pow(tau, s - 1.0);
        }
        acc *= len;
        total += acc;
        if (std::abs(acc) < 1e-18 * std::abs(total)) break;
        hi = lo;
    }
    return total;
}

double quad_once(double lambda, double s, int nodes, int max_panels) {
    const PanelRule rule(nodes);
    const double gamma_ms = std::tgamma(2.0 - s) / (s * (s - 1.0));  // Gamma(-s), argument kept in (1,2)
    return (core_integral(lambda, s, rule, max_panels) + tail_integral(lambda, s, rule, max_panels)) /
           gamma_ms;
}

} // namespace

double fractional_power_quadrature(double lambda, const FractionalOrder& s, const QuadratureConfig& quad) {
    s.validate();
    quad.validate();
    if (!(lambda > 0.0)) throw ConfigError("fractional_power_quadrature: lambda must be positive");
    const double base = quad_once(lambda, s.s, quad.panel_nodes, quad.max_panels);
    const double refined = quad_once(lambda, s.s, quad.panel_nodes + 6, quad.max_panels);
    const double achieved = std::abs(refined - base) / std::max(std::abs(refined), 1e-300);
    if (achieved > quad.check_tol) {
        std::ostringstream msg;
        msg << "semigroup quadrature self-check failed at lambda = " << lambda << ", s = " << s.s
            << ": achieved relative tolerance " << achieved << " exceeds " << quad.check_tol;
        throw NumericalError(msg.str());
    }
    return refined;
}

SpectralField semigroup_fractional_laplacian_oracle(const SpectralField& c, const FractionalOrder& s,
                                                    const QuadratureConfig& quad) {
    SpectralField out{c.basis, c.coeffs};
    for (int k = 0; k < c.basis->size(); ++k)
        out.coeffs[k] *= fractional_power_quadrature(c.basis->lambda(k), s, quad);
    return out;
}

double sobolev_norm(const SpectralField& c, double r) {
    if (r < -2.0 || r > 2.0)
        throw ConfigError("sobolev_norm: order r outside supported range [-2, 2]");
    double acc = 0.0;
    for (int k = 0; k < c.basis->size(); ++k)
        acc += std::pow(c.basis->lambda(k), r) * c.coeffs[k] * c.coeffs[k];
    return std::sqrt(acc);
}

namespace {

// one time-derivative pass over snapshot-major data
void dt_pass(const std::vector<double>& in, std::vector<double>& out, int n_snap, int stride, double dt) {
    out.resize(in.size());
    const double c2 = 1.0 / (2.0 * dt);
    for (int k = 0; k < stride; ++k) {
        out[k] = (-3.0 * in[k] + 4.0 * in[stride + k] - in[2 * static_cast<size_t>(stride) + k]) * c2;
        const size_t last = static_cast<size_t>(n_snap - 1) * stride + k;
        out[last] = (3.0 * in[last] - 4.0 * in[last - stride] + in[last - 2 * static_cast<size_t>(stride)]) * c2;
    }
    for (int n = 1; n < n_snap - 1; ++n) {
        const size_t off = static_cast<size_t>(n) * stride;
        for (int k = 0; k < stride; ++k)
            out[off + k] = (in[off + stride + k] - in[off - stride + k]) * c2;
    }
}

} // namespace

TimeSeriesField dt_series(const TimeSeriesField& u) {
    if (u.snapshots() < 3) throw ConfigError("dt_series: need at least 3 time levels");
    TimeSeriesField out{u.basis, u.time, {}};
    dt_pass(u.data, out.data, u.snapshots(), u.modes(), u.time.dt());
    return out;
}

void dt_grid_series(const std::vector<double>& in, std::vector<double>& out, int n_snapshots,
                    int stride, double dt) {
    if (n_snapshots < 3) throw ConfigError("dt_grid_series: need at least 3 time levels");
    dt_pass(in, out, n_snapshots, stride, dt);
}

TimeSeriesField dtt_series(const TimeSeriesField& u) {
    if (u.snapshots() < 4) throw ConfigError("dtt_series: need at least 4 time levels");
    TimeSeriesField out{u.basis, u.time, std::vector<double>(u.data.size())};
    const int ns = u.snapshots();
    const int m = u.modes();
    const double idt2 = 1.0 / (u.time.dt() * u.time.dt());
    const auto& in = u.data;
    auto& o = out.data;
    for (int k = 0; k < m; ++k) {
        o[k] = (2.0 * in[k] - 5.0 * in[m + k] + 4.0 * in[2 * static_cast<size_t>(m) + k] -
                in[3 * static_cast<size_t>(m) + k]) * idt2;
        const size_t last = static_cast<size_t>(ns - 1) * m + k;
        o[last] = (2.0 * in[last] - 5.0 * in[last - m] + 4.0 * in[last - 2 * static_cast<size_t>(m)] -
                   in[last - 3 * static_cast<size_t>(m)]) * idt2;
    }
    for (int n = 1; n < ns - 1; ++n) {
        const size_t off = static_cast<size_t>(n) * m;
        for (int k = 0; k < m; ++k)
            o[off + k] = (in[off + m + k] - 2.0 * in[off + k] + in[off - m + k]) * idt2;
    }
    return out;
}

void dtt_transpose_in_place(std::vector<double>& series, int n_snapshots, int stride, double dt) {
    // exact transpose of the dtt_series stencil matrix along the time axis
    const double idt2 = 1.0 / (dt * dt);
    std::vector<double> acc(series.size(), 0.0);
    const int ns = n_snapshots;
    const double c[4] = {2.0 * idt2, -5.0 * idt2, 4.0 * idt2, -1.0 * idt2};
    for (int k = 0; k < stride; ++k) {
        for (int j = 0; j < 4; ++j) {
            acc[static_cast<size_t>(j) * stride + k] += c[j] * series[k];
            acc[static_cast<size_t>(ns - 1 - j) * stride + k] +=
                c[j] * series[static_cast<size_t>(ns - 1) * stride + k];
        }
    }
    for (int n = 1; n < ns - 1; ++n) {
        const size_t off = static_cast<size_t>(n) * stride;
        for (int k = 0; k < stride; ++k) {
            const double v = series[off + k] * idt2;
            acc[off - stride + k] += v;
            acc[off + k] += -2.0 * v;
            acc[off + stride + k] += v;
        }
    }
    series.swap(acc);
}

double snapshot_inner(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double space_time_inner(const TimeSeriesField& a, const TimeSeriesField& b) {
    if (a.data.size() != b.data.size())
        throw ConfigError("space_time_inner: time series have different shapes");
    const int ns = a.snapshots();
    const double dt = a.time.dt();
    double acc = 0.0;
    for (int n = 0; n < ns; ++n) {
        const double w = (n == 0 || n == ns - 1) ? 0.5 * dt : dt;
        acc += w * snapshot_inner(a.snapshot(n), b.snapshot(n));
    }
    return acc;
}

double space_time_norm(const TimeSeriesField& a) { return std::sqrt(space_time_inner(a, a)); }

double zm_norm(const TimeSeriesField& u, int m) {
    if (m < 0) throw ConfigError("zm_norm: m must be nonnegative");
    if (u.time.n_steps <= m)
        throw ConfigError("zm_norm: need n_steps > m, got n_steps = " + std::to_string(u.time.n_steps));
    const int ns = u.snapshots();
    const double dt = u.time.dt();
    double total = 0.0;
    TimeSeriesField deriv = u;  // d_t^{m-k} u, built by repeated differentiation
    for (int k = m; k >= 0; --k) {
        // at this point deriv = d_t^{m-k} u
        double term = 0.0;
        for (int n = 0; n < ns; ++n) {
            const double w = (n == 0 || n == ns - 1) ? 0.5 * dt : dt;
            double hk = 0.0;
            auto snap = deriv.snapshot(n);
            for (int j = 0; j < u.modes(); ++j)
                hk += std::pow(u.basis->lambda(j), static_cast<double>(k)) * snap[j] * snap[j];
            term += w * hk;
        }
        total += term;
        if (k > 0) deriv = dt_series(deriv);
    }
    return std::sqrt(total);
}

double z1_norm(const TimeSeriesField& u) {
    // sum of int ||d_t u||^2 + int ||u||_{H^1}^2 with H^1 = L2 + gradient part
    TimeSeriesField du = dt_series(u);
    const int ns = u.snapshots();
    const double dt = u.time.dt();
    double acc = 0.0;
    for (int n = 0; n < ns; ++n) {
        const double w = (n == 0 || n == ns - 1) ? 0.5 * dt : dt;
        auto us = u.snapshot(n);
        auto ds = du.snapshot(n);
        double v = 0.0;
        for (int j = 0; j < u.modes(); ++j)
            v += ds[j] * ds[j] + (1.0 + u.basis->lambda(j)) * us[j] * us[j];
        acc += w * v;
    }
    return std::sqrt(acc);
}

TimeSeriesField lincomb(double alpha, const TimeSeriesField& a, double beta, const TimeSeriesField& b) {
    if (a.data.size() != b.data.size())
        throw ConfigError("lincomb: time series have different shapes");
    TimeSeriesField out{a.basis, a.time, std::vector<double>(a.data.size())};
    for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = alpha * a.data[i] + beta * b.data[i];
    return out;
}

} // namespace fracwave

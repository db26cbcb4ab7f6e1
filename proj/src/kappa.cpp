#include "fracwave/kappa.hpp"

#include <cmath>

namespace fracwave {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

KappaField KappaField::constant(double value) {
    KappaField k;
    if (value == 0.0) return k;
    k.kind_ = Kind::ClosedForm;
    k.f_ = [value](const DomainSpec&, double, double, double) { return value; };
    k.ft_ = [](const DomainSpec&, double, double, double) { return 0.0; };
    k.ftt_ = [](const DomainSpec&, double, double, double) { return 0.0; };
    return k;
}

KappaField KappaField::sine_space(double amplitude, int mode) {
    KappaField k;
    if (amplitude == 0.0) return k;
    k.kind_ = Kind::ClosedForm;
    k.f_ = [amplitude, mode](const DomainSpec& dom, double x, double y, double) {
        double v = amplitude * std::sin(mode * kPi * x / dom.lengths[0]);
        if (dom.dim == 2) v *= std::sin(kPi * y / dom.lengths[1]);
        return v;
    };
    k.ft_ = [](const DomainSpec&, double, double, double) { return 0.0; };
    k.ftt_ = [](const DomainSpec&, double, double, double) { return 0.0; };
    return k;
}

KappaField KappaField::gaussian_space(double amplitude, double center, double width) {
    KappaField k;
    if (amplitude == 0.0) return k;
    k.kind_ = Kind::ClosedForm;
    k.f_ = [amplitude, center, width](const DomainSpec&, double x, double, double) {
        const double r = (x - center) / width;
        return amplitude * std::exp(-0.5 * r * r);
    };
    k.ft_ = [](const DomainSpec&, double, double, double) { return 0.0; };
    k.ftt_ = [](const DomainSpec&, double, double, double) { return 0.0; };
    return k;
}

KappaField KappaField::separable(const KappaField& spatial, double modulation, double omega) {
    if (spatial.kind_ != Kind::ClosedForm)
        throw ConfigError("KappaField::separable requires a closed-form spatial factor");
    KappaField k;
    k.kind_ = Kind::ClosedForm;
    auto f = spatial.f_;
    k.f_ = [f, modulation, omega](const DomainSpec& d, double x, double y, double t) {
        return f(d, x, y, t) * (1.0 + modulation * std::sin(omega * t));
    };
    k.ft_ = [f, modulation, omega](const DomainSpec& d, double x, double y, double t) {
        return f(d, x, y, t) * modulation * omega * std::cos(omega * t);
    };
    k.ftt_ = [f, modulation, omega](const DomainSpec& d, double x, double y, double t) {
        return -f(d, x, y, t) * modulation * omega * omega * std::sin(omega * t);
    };
    k.bound_ = spatial.bound_;
    return k;
}

KappaField KappaField::from_grid(const DomainSpec& domain, const TimeGrid& time,
                                 std::vector<double> values) {
    domain.validate();
    time.validate();
    if (static_cast<int>(values.size()) != (time.n_steps + 1) * domain.total_nodes())
        throw ConfigError("KappaField::from_grid: value array has wrong shape");
    KappaField k;
    k.kind_ = Kind::Grid;
    k.grid_domain_ = domain;
    k.grid_time_ = time;
    k.grid_values_ = std::move(values);
    return k;
}

KappaField KappaField::from_coefficients(int x_modes, int t_degree, std::vector<double> coeffs) {
    if (x_modes < 1) throw ConfigError("KappaField: x_modes must be >= 1");
    if (t_degree < 0) throw ConfigError("KappaField: t_degree must be >= 0");
    if (static_cast<int>(coeffs.size()) != x_modes * (t_degree + 1))
        throw ConfigError("KappaField: coefficient vector has wrong length");
    KappaField k;
    k.kind_ = Kind::Coefficients;
    k.x_modes_ = x_modes;
    k.t_degree_ = t_degree;
    k.coeffs_ = std::move(coeffs);
    return k;
}

bool KappaField::is_zero() const {
    switch (kind_) {
        case Kind::Zero: return true;
        case Kind::Grid: {
            for (double v : grid_values_)
                if (v != 0.0) return false;
            return true;
        }
        case Kind::Coefficients: {
            for (double v : coeffs_)
                if (v != 0.0) return false;
            return true;
        }
        default: return false;
    }
}

void legendre_eval(int degree, double z, double& p, double& dp, double& ddp) {
    // values of P_n with first and second derivative by the standard recurrences
    double p0 = 1.0, d0 = 0.0, s0 = 0.0;
    if (degree == 0) {
        p = p0; dp = d0; ddp = s0;
        return;
    }
    double p1 = z, d1 = 1.0, s1 = 0.0;
    for (int n = 1; n < degree; ++n) {
        const double a = (2.0 * n + 1.0) / (n + 1.0);
        const double b = static_cast<double>(n) / (n + 1.0);
        const double p2 = a * z * p1 - b * p0;
        const double d2 = a * (p1 + z * d1) - b * d0;
        const double s2 = a * (2.0 * d1 + z * s1) - b * s0;
        p0 = p1; d0 = d1; s0 = s1;
        p1 = p2; d1 = d2; s1 = s2;
    }
    p = p1; dp = d1; ddp = s1;
}

KappaField::Sample KappaField::sample(const EigenBasis& basis, const TimeGrid& time) const {
    const DomainSpec& dom = basis.domain();
    const int nodes = dom.total_nodes();
    const int ns = time.n_steps + 1;
    Sample out;
    out.value.assign(static_cast<size_t>(ns) * nodes, 0.0);
    out.dt.assign(out.value.size(), 0.0);
    out.dtt.assign(out.value.size(), 0.0);
    if (kind_ == Kind::Zero) return out;

    if (kind_ == Kind::ClosedForm) {
        const int n2 = dom.dim == 2 ? dom.n_interior[1] : 1;
        for (int n = 0; n < ns; ++n) {
            const double t = n * time.dt();
            for (int j = 0; j < nodes; ++j) {
                const double x = basis.node_coord(0, j / n2);
                const double y = dom.dim == 2 ? basis.node_coord(1, j % n2) : 0.0;
                const size_t idx = static_cast<size_t>(n) * nodes + j;
                out.value[idx] = f_(dom, x, y, t);
                out.dt[idx] = ft_(dom, x, y, t);
                out.dtt[idx] = ftt_(dom, x, y, t);
            }
        }
    } else if (kind_ == Kind::Grid) {
        if (!(grid_domain_ == dom) || !(grid_time_ == time))
            throw ConfigError("KappaField grid representation does not match the requested grids");
        out.value = grid_values_;
        // second-order differences in time
        const double dt = time.dt();
        const double c2 = 1.0 / (2.0 * dt);
        const double idt2 = 1.0 / (dt * dt);
        if (ns >= 4) {
            for (int j = 0; j < nodes; ++j) {
                auto v = [&](int n) { return grid_values_[static_cast<size_t>(n) * nodes + j]; };
                out.dt[j] = (-3.0 * v(0) + 4.0 * v(1) - v(2)) * c2;
                out.dt[static_cast<size_t>(ns - 1) * nodes + j] =
                    (3.0 * v(ns - 1) - 4.0 * v(ns - 2) + v(ns - 3)) * c2;
                out.dtt[j] = (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) * idt2;
                out.dtt[static_cast<size_t>(ns - 1) * nodes + j] =
                    (2.0 * v(ns - 1) - 5.0 * v(ns - 2) + 4.0 * v(ns - 3) - v(ns - 4)) * idt2;
                for (int n = 1; n < ns - 1; ++n) {
                    out.dt[static_cast<size_t>(n) * nodes + j] = (v(n + 1) - v(n - 1)) * c2;
                    out.dtt[static_cast<size_t>(n) * nodes + j] =
                        (v(n + 1) - 2.0 * v(n) + v(n - 1)) * idt2;
                }
            }
        }
    } else {  // Coefficients
        if (x_modes_ > basis.size())
            throw ConfigError("KappaField: coefficient basis has more modes than the eigenbasis");
        // spatial profiles of the first x_modes_ sorted eigenfunctions
        std::vector<double> profile(static_cast<size_t>(x_modes_) * nodes);
        std::vector<double> unit(basis.size(), 0.0);
        std::vector<double> grid(nodes);
        for (int a = 0; a < x_modes_; ++a) {
            unit[a] = 1.0;
            basis.synthesize(unit, grid);
            unit[a] = 0.0;
            for (int j = 0; j < nodes; ++j) profile[static_cast<size_t>(a) * nodes + j] = grid[j];
        }
        for (int n = 0; n < ns; ++n) {
            const double z = time.T > 0.0 ? 2.0 * (n * time.dt()) / time.T - 1.0 : 0.0;
            const double zs = 2.0 / time.T;
            for (int b = 0; b <= t_degree_; ++b) {
                double p, dp, ddp;
                legendre_eval(b, z, p, dp, ddp);
                for (int a = 0; a < x_modes_; ++a) {
                    const double c = coeffs_[static_cast<size_t>(a) * (t_degree_ + 1) + b];
                    if (c == 0.0) continue;
                    const double* prof = profile.data() + static_cast<size_t>(a) * nodes;
                    double* v = out.value.data() + static_cast<size_t>(n) * nodes;
                    double* vt = out.dt.data() + static_cast<size_t>(n) * nodes;
                    double* vtt = out.dtt.data() + static_cast<size_t>(n) * nodes;
                    for (int j = 0; j < nodes; ++j) {
                        v[j] += c * p * prof[j];
                        vt[j] += c * dp * zs * prof[j];
                        vtt[j] += c * ddp * zs * zs * prof[j];
                    }
                }
            }
        }
    }
    for (double v : out.value) out.max_abs = std::max(out.max_abs, std::abs(v));
    if (out.max_abs > bound_)
        throw ConfigError("kappa bound violated: max|kappa| = " + std::to_string(out.max_abs) +
                          " exceeds " + std::to_string(bound_));
    return out;
}

} // namespace fracwave

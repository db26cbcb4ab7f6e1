#include "fracwave/inversion.hpp"

#include <algorithm>
#include <cmath>

namespace fracwave {

void KappaBasisSpec::validate() const {
    if (x_modes < 1) throw ConfigError("kappa basis: x_modes must be >= 1");
    if (t_degree < 0) throw ConfigError("kappa basis: t_degree must be >= 0");
}

namespace {

// dense per-pair forward/adjoint machinery around one product field w1*w2
class PairOperator {
public:
    PairOperator(const KappaBasisSpec& spec, const PairDatum& pair, const FractionalOrder& s,
                 const SolveConfig& cfg)
        : spec_(spec), s_(s), cfg_(cfg), basis_(pair.w1.basis), time_(pair.w1.time),
          window_(pair.v_measured.window) {
        spec_.validate();
        const EigenBasis& b = *basis_;
        if (spec_.x_modes > b.size())
            throw ConfigError("kappa basis has more spatial modes than the eigenbasis");
        nodes_ = b.domain().total_nodes();
        ns_ = time_.n_steps + 1;
        // product of the linear solutions on the grid
        product_.resize(static_cast<size_t>(ns_) * nodes_);
        std::vector<double> g1(nodes_), g2(nodes_);
        for (int n = 0; n < ns_; ++n) {
            b.synthesize(pair.w1.snapshot(n), g1);
            b.synthesize(pair.w2.snapshot(n), g2);
            for (int j = 0; j < nodes_; ++j)
                product_[static_cast<size_t>(n) * nodes_ + j] = g1[j] * g2[j];
        }
        // spatial profiles of the coefficient basis
        profiles_.resize(static_cast<size_t>(spec_.x_modes) * nodes_);
        std::vector<double> unit(b.size(), 0.0), grid(nodes_);
        for (int a = 0; a < spec_.x_modes; ++a) {
            unit[a] = 1.0;
            b.synthesize(unit, grid);
            unit[a] = 0.0;
            std::copy(grid.begin(), grid.end(), profiles_.begin() + static_cast<size_t>(a) * nodes_);
        }
        // Legendre factors per time level
        const int nd = spec_.t_degree + 1;
        legendre_.resize(static_cast<size_t>(nd) * ns_);
        for (int n = 0; n < ns_; ++n) {
            const double z = 2.0 * (n * time_.dt()) / time_.T - 1.0;
            for (int b_ = 0; b_ < nd; ++b_) {
                double p, dp, ddp;
                legendre_eval(b_, z, p, dp, ddp);
                legendre_[static_cast<size_t>(b_) * ns_ + n] = p;
            }
        }
    }

    int data_size() const { return ns_ * window_.node_count(basis_->domain()); }

    // expand coefficients, multiply by the product field
    void expand_and_multiply(const std::vector<double>& coeffs, std::vector<double>& m) const {
        m.assign(static_cast<size_t>(ns_) * nodes_, 0.0);
        const int nd = spec_.t_degree + 1;
        for (int a = 0; a < spec_.x_modes; ++a) {
            const double* prof = profiles_.data() + static_cast<size_t>(a) * nodes_;
            for (int b_ = 0; b_ < nd; ++b_) {
                const double c = coeffs[static_cast<size_t>(a) * nd + b_];
                if (c == 0.0) continue;
                const double* leg = legendre_.data() + static_cast<size_t>(b_) * ns_;
                for (int n = 0; n < ns_; ++n) {
                    double* row = m.data() + static_cast<size_t>(n) * nodes_;
                    const double w = c * leg[n];
                    for (int j = 0; j < nodes_; ++j) row[j] += w * prof[j];
                }
            }
        }
        for (size_t i = 0; i < m.size(); ++i) m[i] *= product_[i];
    }

    WindowField forward(const std::vector<double>& coeffs) const {
        std::vector<double> m;
        expand_and_multiply(coeffs, m);
        // q = 2 d_t^2 m with first/last snapshot dropped (the true source
        // vanishes at t = 0 and the final snapshot never enters the march)
        std::vector<double> q(m.size());
        grid_dtt(m, q);
        TimeSeriesField qs = TimeSeriesField::zeros(basis_, time_);
        std::vector<double> row(nodes_);
        for (int n = 1; n < ns_ - 1; ++n) {
            const double* src = q.data() + static_cast<size_t>(n) * nodes_;
            for (int j = 0; j < nodes_; ++j) row[j] = 2.0 * src[j];
            basis_->analyze(row, qs.snapshot(n));
        }
        TimeSeriesField u = solve_linear(qs, s_, cfg_);
        WindowField y = restrict_to_window(u, window_);
        auto last = y.snapshot(y.snapshots() - 1);
        std::fill(last.begin(), last.end(), 0.0);
        return y;
    }

    // exact transpose of forward() in plain sums; the caller applies the
    // cell-measure * dt weight of the data inner product
    void adjoint(const WindowField& y, std::vector<double>& grad) const {
        TimeSeriesField yext = TimeSeriesField::zeros(basis_, time_);
        const DomainSpec& dom = basis_->domain();
        std::vector<double> grid(nodes_, 0.0);
        for (int n = 0; n < ns_ - 1; ++n) {  // final snapshot excluded
            auto src = y.snapshot(n);
            int c = 0;
            for (int j = 0; j < nodes_; ++j)
                grid[j] = window_.contains_flat(j, dom) ? src[c++] : 0.0;
            basis_->analyze(grid, yext.snapshot(n));
        }
        TimeSeriesField v = solve_dual_linear(yext, s_, cfg_);
        std::vector<double> vg(static_cast<size_t>(ns_) * nodes_);
        for (int n = 0; n < ns_; ++n)
            basis_->synthesize(v.snapshot(n), {vg.data() + static_cast<size_t>(n) * nodes_,
                                               static_cast<size_t>(nodes_)});
        // transpose of (drop first/last, scale by 2, d_t^2)
        std::fill(vg.begin(), vg.begin() + nodes_, 0.0);
        std::fill(vg.end() - nodes_, vg.end(), 0.0);
        for (double& x : vg) x *= 2.0;
        dtt_transpose_in_place(vg, ns_, nodes_, time_.dt());
        for (size_t i = 0; i < vg.size(); ++i) vg[i] *= product_[i];
        // project onto the coefficient basis
        const int nd = spec_.t_degree + 1;
        grad.assign(spec_.size(), 0.0);
        for (int a = 0; a < spec_.x_modes; ++a) {
            const double* prof = profiles_.data() + static_cast<size_t>(a) * nodes_;
            for (int b_ = 0; b_ < nd; ++b_) {
                const double* leg = legendre_.data() + static_cast<size_t>(b_) * ns_;
                double acc = 0.0;
                for (int n = 0; n < ns_; ++n) {
                    const double* row = vg.data() + static_cast<size_t>(n) * nodes_;
                    double sum = 0.0;
                    for (int j = 0; j < nodes_; ++j) sum += row[j] * prof[j];
                    acc += leg[n] * sum;
                }
                grad[static_cast<size_t>(a) * nd + b_] = acc;
            }
        }
    }

private:
    void grid_dtt(const std::vector<double>& in, std::vector<double>& out) const {
        const double idt2 = 1.0 / (time_.dt() * time_.dt());
        for (int j = 0; j < nodes_; ++j) {
            out[j] = (2.0 * in[j] - 5.0 * in[nodes_ + j] + 4.0 * in[2 * static_cast<size_t>(nodes_) + j] -
                      in[3 * static_cast<size_t>(nodes_) + j]) * idt2;
            const size_t last = static_cast<size_t>(ns_ - 1) * nodes_ + j;
            out[last] = (2.0 * in[last] - 5.0 * in[last - nodes_] +
                         4.0 * in[last - 2 * static_cast<size_t>(nodes_)] -
                         in[last - 3 * static_cast<size_t>(nodes_)]) * idt2;
        }
        for (int n = 1; n < ns_ - 1; ++n) {
            const size_t off = static_cast<size_t>(n) * nodes_;
            for (int j = 0; j < nodes_; ++j)
                out[off + j] = (in[off + nodes_ + j] - 2.0 * in[off + j] + in[off - nodes_ + j]) * idt2;
        }
    }

    KappaBasisSpec spec_;
    FractionalOrder s_;
    SolveConfig cfg_;
    BasisPtr basis_;
    TimeGrid time_;
    MeasurementWindow window_;
    int nodes_ = 0, ns_ = 0;
    std::vector<double> product_;
    std::vector<double> profiles_;
    std::vector<double> legendre_;
};

} // namespace

WindowField kappa_forward_map(const std::vector<double>& coeffs, const KappaBasisSpec& spec,
                              const PairDatum& pair, const FractionalOrder& s, const SolveConfig& cfg) {
    if (static_cast<int>(coeffs.size()) != spec.size())
        throw ConfigError("kappa_forward_map: coefficient vector has wrong length");
    return PairOperator(spec, pair, s, cfg).forward(coeffs);
}

std::vector<PairDatum> collect_pair_data(
    const KappaField& kappa_true,
    const std::vector<std::pair<TimeSeriesField, TimeSeriesField>>& sources, double eps,
    const MeasurementWindow& window, const FractionalOrder& s, const SolveConfig& cfg) {
    if (sources.empty()) throw ConfigError("collect_pair_data: need at least one source pair");
    if (!(eps > 0.0)) throw ConfigError("collect_pair_data: eps must be positive");
    std::vector<PairDatum> data;
    data.reserve(sources.size());
    for (const auto& [f1, f2] : sources) {
        PairDatum d;
        d.f1 = f1;
        d.f2 = f2;
        d.w1 = solve_linear(f1, s, cfg);
        d.w2 = solve_linear(f2, s, cfg);
        auto L = [&](double a, double b) {
            return source_to_solution(kappa_true, lincomb(a, f1, b, f2), window, s, cfg);
        };
        WindowField upp = L(eps, eps);
        WindowField upm = L(eps, -eps);
        WindowField ump = L(-eps, eps);
        WindowField umm = L(-eps, -eps);
        WindowField v = upp;
        const double sc = 1.0 / (4.0 * eps * eps);
        for (size_t i = 0; i < v.values.size(); ++i)
            v.values[i] = sc * (upp.values[i] - upm.values[i] - ump.values[i] + umm.values[i]);
        auto last = v.snapshot(v.snapshots() - 1);
        std::fill(last.begin(), last.end(), 0.0);
        // asymptotic-regime diagnostic: plain one-sided stencil vs the
        // symmetrized one (their gap is the leading truncation scale)
        WindowField up0 = L(eps, 0.0);
        WindowField u0p = L(0.0, eps);
        double gap2 = 0.0, ref2 = 0.0;
        const double scp = 1.0 / (eps * eps);
        for (size_t i = 0; i < v.values.size(); ++i) {
            const double plain = scp * (upp.values[i] - up0.values[i] - u0p.values[i]);
            const double dvi = plain - v.values[i];
            gap2 += dvi * dvi;
            ref2 += v.values[i] * v.values[i];
        }
        d.stencil_discrepancy = ref2 > 0.0 ? std::sqrt(gap2 / ref2) : 0.0;
        d.well_converged = d.stencil_discrepancy < 0.1;
        d.v_measured = std::move(v);
        data.push_back(std::move(d));
    }
    return data;
}

ReconstructionResult reconstruct_kappa(const std::vector<PairDatum>& data, const KappaBasisSpec& spec,
                                       double alpha, int cg_max_iter, double cg_tol,
                                       const FractionalOrder& s, const SolveConfig& cfg,
                                       const KappaField* kappa_true) {
    spec.validate();
    if (data.empty()) throw ConfigError("reconstruct_kappa: need at least one data pair");
    if (!(alpha > 0.0)) throw ConfigError("reconstruct_kappa: alpha must be positive");
    const int K = spec.size();
    const int total_data = [&] {
        long long t = 0;
        for (const auto& d : data) t += static_cast<long long>(d.v_measured.values.size());
        return static_cast<int>(std::min<long long>(t, 1 << 30));
    }();
    if (K > total_data)
        throw ConfigError("reconstruct_kappa: kappa basis dimension exceeds the data size");

    const DomainSpec& dom = data.front().w1.basis->domain();
    const double weight = dom.cell_measure() * data.front().w1.time.dt();

    std::vector<PairOperator> ops;
    ops.reserve(data.size());
    for (const auto& d : data) ops.emplace_back(spec, d, s, cfg);

    auto apply_normal = [&](const std::vector<double>& c, std::vector<double>& out) {
        out.assign(K, 0.0);
        std::vector<double> g;
        for (size_t p = 0; p < ops.size(); ++p) {
            WindowField y = ops[p].forward(c);
            ops[p].adjoint(y, g);
            for (int i = 0; i < K; ++i) out[i] += weight * g[i];
        }
        for (int i = 0; i < K; ++i) out[i] += alpha * c[i];
    };

    std::vector<double> rhs(K, 0.0), g;
    for (size_t p = 0; p < ops.size(); ++p) {
        ops[p].adjoint(data[p].v_measured, g);
        for (int i = 0; i < K; ++i) rhs[i] += weight * g[i];
    }

    ReconstructionResult res;
    std::vector<double> c(K, 0.0), r = rhs, pdir = rhs, Np(K);
    auto dot = [K](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (int i = 0; i < K; ++i) acc += a[i] * b[i];
        return acc;
    };
    const double rhs_norm = std::sqrt(dot(rhs, rhs));
    double rr = dot(r, r);
    for (int it = 0; it < cg_max_iter && rhs_norm > 0.0; ++it) {
        if (std::sqrt(rr) <= cg_tol * rhs_norm) {
            res.converged = true;
            break;
        }
        apply_normal(pdir, Np);
        const double pNp = dot(pdir, Np);
        if (!(pNp > 0.0)) break;  // stagnation; return the best iterate so far
        const double step = rr / pNp;
        for (int i = 0; i < K; ++i) {
            c[i] += step * pdir[i];
            r[i] -= step * Np[i];
        }
        const double rr2 = dot(r, r);
        res.cg_residual_history.push_back(std::sqrt(rr2));
        const double mix = rr2 / rr;
        for (int i = 0; i < K; ++i) pdir[i] = r[i] + mix * pdir[i];
        rr = rr2;
    }
    if (rhs_norm == 0.0) res.converged = true;
    res.gradient_norm = std::sqrt(rr);
    res.kappa_coeffs = c;
    res.kappa_est = KappaField::from_coefficients(spec.x_modes, spec.t_degree, c);

    for (size_t p = 0; p < ops.size(); ++p) {
        WindowField y = ops[p].forward(c);
        double m2 = 0.0;
        for (size_t i = 0; i < y.values.size(); ++i) {
            const double dres = y.values[i] - data[p].v_measured.values[i];
            m2 += dres * dres;
        }
        res.data_misfit.push_back(std::sqrt(weight * m2));
    }

    if (kappa_true != nullptr) {
        const BasisPtr basis = data.front().w1.basis;
        const TimeGrid& time = data.front().w1.time;
        const KappaField::Sample st = kappa_true->sample(*basis, time);
        const KappaField::Sample se = res.kappa_est.sample(*basis, time);
        const MeasurementWindow& W = data.front().v_measured.window;
        const int nodes = dom.total_nodes();
        double num = 0.0, den = 0.0;
        for (int n = 0; n < time.n_steps + 1; ++n) {
            const double w = (n == 0 || n == time.n_steps) ? 0.5 : 1.0;
            for (int j = 0; j < nodes; ++j) {
                if (W.contains_flat(j, dom)) continue;
                const size_t idx = static_cast<size_t>(n) * nodes + j;
                const double dkap = se.value[idx] - st.value[idx];
                num += w * dkap * dkap;
                den += w * st.value[idx] * st.value[idx];
            }
        }
        res.relative_l2_error = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    }
    return res;
}

UniquenessReport uniqueness_experiment(const KappaField& kappa1, const KappaField& kappa2,
                                       const std::vector<TimeSeriesField>& sources, double eps,
                                       const MeasurementWindow& window, const FractionalOrder& s,
                                       const SolveConfig& cfg, double runge_alpha, int runge_max_iter) {
    if (sources.empty()) throw ConfigError("uniqueness_experiment: need at least one source");
    const BasisPtr basis = sources.front().basis;
    const EigenBasis& b = *basis;
    const DomainSpec& dom = b.domain();
    const TimeGrid& time = sources.front().time;
    window.validate(dom);

    const KappaField::Sample k1 = kappa1.sample(b, time);
    const KappaField::Sample k2 = kappa2.sample(b, time);
    const int nodes = dom.total_nodes();
    const int ns = time.n_steps + 1;
    double max_on_window = 0.0;
    for (int n = 0; n < ns; ++n)
        for (int j = 0; j < nodes; ++j)
            if (window.contains_flat(j, dom))
                max_on_window = std::max(max_on_window,
                                         std::abs(k1.value[static_cast<size_t>(n) * nodes + j] -
                                                  k2.value[static_cast<size_t>(n) * nodes + j]));
    if (max_on_window > 1e-12)
        throw ConfigError("uniqueness_experiment: kappa1 and kappa2 differ on W by " +
                          std::to_string(max_on_window));

    UniquenessReport rep;
    for (const TimeSeriesField& f : sources) {
        const TimeSeriesField fe = lincomb(eps, f, 0.0, f);
        TimeSeriesField u1 = solve_nonlinear(kappa1, fe, s, cfg).u;
        TimeSeriesField u2 = solve_nonlinear(kappa2, fe, s, cfg).u;
        TimeSeriesField d = lincomb(1.0, u1, -1.0, u2);
        WindowField dw = restrict_to_window(d, window);
        double dmax = 0.0;
        for (double v : dw.values) dmax = std::max(dmax, std::abs(v));
        rep.map_difference_max.push_back(dmax);
        // the pivotal window identity: d_t (-Delta)^s of the difference on W
        TimeSeriesField dd = dt_series(d);
        for (int n = 0; n < ns; ++n) {
            auto snap = dd.snapshot(n);
            for (int k = 0; k < b.size(); ++k) snap[k] *= std::pow(b.lambda(k), s.s);
        }
        rep.window_identity_residual =
            std::max(rep.window_identity_residual, window_norm(restrict_to_window(dd, window), dom));
    }

    // designed limit sources: w1 -> 1, w2 -> kappa1 - kappa2 off W
    TimeSeriesField diff_target = TimeSeriesField::zeros(basis, time);
    {
        std::vector<double> grid(nodes);
        for (int n = 0; n < ns; ++n) {
            for (int j = 0; j < nodes; ++j)
                grid[j] = k1.value[static_cast<size_t>(n) * nodes + j] -
                          k2.value[static_cast<size_t>(n) * nodes + j];
            b.analyze(grid, diff_target.snapshot(n));
        }
    }
    auto [des1, des2] =
        runge_pair_for_inversion(diff_target, window, s, cfg, runge_alpha, runge_max_iter);
    rep.runge_residual_ones = des1.final_relative_residual;
    rep.runge_residual_diff = des2.final_relative_residual;
    TimeSeriesField w1 = solve_linear(des1.f, s, cfg);
    TimeSeriesField w2 = solve_linear(des2.f, s, cfg);

    // discrete pairing of (4.6) against (t-T)^2 phi_1 and its limit form
    std::vector<double> g1(nodes), g2(nodes), phi(nodes);
    {
        std::vector<double> unit(b.size(), 0.0);
        unit[0] = 1.0;
        b.synthesize(unit, phi);
    }
    std::vector<double> prod(static_cast<size_t>(ns) * nodes);
    for (int n = 0; n < ns; ++n) {
        b.synthesize(w1.snapshot(n), g1);
        b.synthesize(w2.snapshot(n), g2);
        const size_t off = static_cast<size_t>(n) * nodes;
        for (int j = 0; j < nodes; ++j) {
            const double kd = k1.value[off + j] - k2.value[off + j];
            prod[off + j] = kd * g1[j] * g2[j];
        }
    }
    std::vector<double> ptt(prod.size());
    {
        const double idt2 = 1.0 / (time.dt() * time.dt());
        for (int j = 0; j < nodes; ++j) {
            ptt[j] = (2.0 * prod[j] - 5.0 * prod[nodes + j] +
                      4.0 * prod[2 * static_cast<size_t>(nodes) + j] -
                      prod[3 * static_cast<size_t>(nodes) + j]) * idt2;
            const size_t last = static_cast<size_t>(ns - 1) * nodes + j;
            ptt[last] = (2.0 * prod[last] - 5.0 * prod[last - nodes] +
                         4.0 * prod[last - 2 * static_cast<size_t>(nodes)] -
                         prod[last - 3 * static_cast<size_t>(nodes)]) * idt2;
        }
        for (int n = 1; n < ns - 1; ++n) {
            const size_t off = static_cast<size_t>(n) * nodes;
            for (int j = 0; j < nodes; ++j)
                ptt[off + j] = (prod[off + nodes + j] - 2.0 * prod[off + j] + prod[off - nodes + j]) * idt2;
        }
    }
    const double meas = dom.cell_measure();
    const double dt = time.dt();
    double pairing = 0.0, limit = 0.0, reference = 0.0;
    for (int n = 0; n < ns; ++n) {
        const double tw = (n == 0 || n == ns - 1) ? 0.5 * dt : dt;
        const double t = n * dt;
        const double phit = (t - time.T) * (t - time.T);
        const size_t off = static_cast<size_t>(n) * nodes;
        for (int j = 0; j < nodes; ++j) {
            pairing += tw * meas * ptt[off + j] * phit * phi[j];
            limit += tw * meas * prod[off + j] * 2.0 * phi[j];
            if (!window.contains_flat(j, dom)) {
                const double kd = k1.value[off + j] - k2.value[off + j];
                reference += tw * meas * 2.0 * kd * kd * phi[j];
            }
        }
    }
    rep.pairing_value = pairing;
    rep.pairing_limit = limit;
    rep.pairing_reference = reference;
    return rep;
}

} // namespace fracwave

#include "fracwave/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace fracwave {

double uniform01(std::uint64_t raw) {
    return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

std::vector<std::pair<TimeSeriesField, TimeSeriesField>> make_bump_pairs(
    const BasisPtr& basis, const TimeGrid& time, const MeasurementWindow& window, int count,
    double amplitude, std::uint64_t seed) {
    if (count < 1) throw ConfigError("bump pair generator: count must be >= 1");
    const DomainSpec& dom = basis->domain();
    window.validate(dom);
    std::mt19937_64 rng(seed);
    auto u01 = [&rng] { return uniform01(rng()); };
    const double dt = time.dt();

    auto make_bump = [&] {
        BumpSpec spec;
        spec.amplitude = amplitude;
        for (int d = 0; d < dom.dim; ++d) {
            const double xlo = window.first_coord(dom, d);
            const double xhi = window.last_coord(dom, d);
            const double extent = xhi - xlo;
            const double margin = 0.02 * extent;
            const double w = (0.15 + 0.20 * u01()) * extent;
            const double clo = xlo + w + margin;
            const double chi = xhi - w - margin;
            spec.width[d] = w;
            spec.center[d] = chi > clo ? clo + (chi - clo) * u01() : 0.5 * (xlo + xhi);
        }
        const double wt = (0.05 + 0.075 * u01()) * time.T;
        const double tlo = wt + 2.0 * dt;
        const double span = 0.6 * std::max(0.0, time.T - 2.0 * tlo);
        spec.width_t = wt;
        spec.center_t = tlo + span * u01();
        return source_bump(spec, basis, time, &window);
    };

    std::vector<std::pair<TimeSeriesField, TimeSeriesField>> pairs;
    pairs.reserve(count);
    for (int i = 0; i < count; ++i) {
        TimeSeriesField a = make_bump();
        TimeSeriesField b = make_bump();
        pairs.emplace_back(std::move(a), std::move(b));
    }
    return pairs;
}

std::vector<PairDatum> collect_pair_data_parallel(
    const KappaField& kappa_true,
    const std::vector<std::pair<TimeSeriesField, TimeSeriesField>>& sources, double eps,
    const MeasurementWindow& window, const FractionalOrder& s, const SolveConfig& cfg, int threads) {
    const int n = static_cast<int>(sources.size());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) return collect_pair_data(kappa_true, sources, eps, window, s, cfg);

    std::vector<PairDatum> out(n);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (int i = t; i < n; i += threads) {
                    std::vector<std::pair<TimeSeriesField, TimeSeriesField>> one{sources[i]};
                    out[i] = collect_pair_data(kappa_true, one, eps, window, s, cfg).front();
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

KappaField kappa_from_config(const KeyValueConfig& cfg, const std::string& prefix,
                             const BasisPtr& basis, const TimeGrid& time) {
    const std::string preset = cfg.get_string(prefix + "preset", "zero");
    KappaField k;
    if (preset == "zero") {
        k = KappaField();
    } else if (preset == "file") {
        // a stored spectral series, sampled onto the experiment grids
        TimeSeriesField series = read_time_series(cfg.get_string(prefix + "path"), basis);
        if (!(series.time == time))
            throw ConfigError(prefix + "path: kappa file time grid does not match the experiment");
        const int nodes = basis->domain().total_nodes();
        std::vector<double> values(static_cast<size_t>(series.snapshots()) * nodes);
        for (int n = 0; n < series.snapshots(); ++n)
            basis->synthesize(series.snapshot(n),
                              {values.data() + static_cast<size_t>(n) * nodes,
                               static_cast<size_t>(nodes)});
        k = KappaField::from_grid(basis->domain(), time, std::move(values));
    } else if (preset == "constant") {
        k = KappaField::constant(cfg.get_double(prefix + "value"));
    } else if (preset == "sin") {
        k = KappaField::sine_space(cfg.get_double(prefix + "amplitude"),
                                   cfg.get_int(prefix + "mode", 1));
    } else if (preset == "gaussian") {
        k = KappaField::gaussian_space(cfg.get_double(prefix + "amplitude"),
                                       cfg.get_double(prefix + "center"),
                                       cfg.get_double(prefix + "width"));
    } else if (preset == "separable") {
        KappaField spatial = KappaField::sine_space(cfg.get_double(prefix + "amplitude"),
                                                    cfg.get_int(prefix + "mode", 1));
        k = KappaField::separable(spatial, cfg.get_double(prefix + "modulation", 0.5),
                                  cfg.get_double(prefix + "omega", 1.0));
    } else {
        throw ConfigError("unknown kappa preset `" + preset +
                          "` (expected zero|constant|sin|gaussian|separable|file)");
    }
    if (cfg.has(prefix + "bound")) k.set_bound(cfg.get_double(prefix + "bound"));
    return k;
}

namespace {

DomainSpec domain_from_config(const KeyValueConfig& cfg) {
    DomainSpec dom;
    dom.dim = cfg.get_int("domain.dim", 1);
    dom.lengths[0] = cfg.get_double("domain.length", 3.141592653589793);
    dom.n_interior[0] = cfg.get_int("domain.n_interior", 64);
    if (dom.dim == 2) {
        dom.lengths[1] = cfg.get_double("domain.length2", dom.lengths[0]);
        dom.n_interior[1] = cfg.get_int("domain.n_interior2", dom.n_interior[0]);
    }
    dom.validate();
    return dom;
}

SolveConfig solve_from_config(const KeyValueConfig& cfg) {
    SolveConfig sc;
    sc.time.T = cfg.get_double("time.T", 1.0);
    sc.time.n_steps = cfg.get_int("time.n_steps", 256);
    sc.cfl_safety = cfg.get_double("solve.cfl_safety", 0.9);
    sc.picard_tol = cfg.get_double("solve.picard_tol", 1e-10);
    sc.picard_max_iter = cfg.get_int("solve.picard_max_iter", 50);
    sc.coefficient_floor = cfg.get_double("solve.coefficient_floor", 0.25);
    sc.stepper_tol = cfg.get_double("solve.stepper_tol", 1e-13);
    sc.stepper_max_iter = cfg.get_int("solve.stepper_max_iter", 400);
    sc.validate();
    return sc;
}

MeasurementWindow window_from_config(const KeyValueConfig& cfg, const DomainSpec& dom) {
    MeasurementWindow w;
    w.lo[0] = cfg.get_int("window.lo", 0);
    w.hi[0] = cfg.get_int("window.hi", std::max(1, dom.n_interior[0] / 6));
    if (dom.dim == 2) {
        w.lo[1] = cfg.get_int("window.lo2", 0);
        w.hi[1] = cfg.get_int("window.hi2", std::max(1, dom.n_interior[1] / 6));
    } else {
        w.lo[1] = 0;
        w.hi[1] = 1;
    }
    w.validate(dom);
    return w;
}

std::vector<BumpSpec> bumps_from_config(const KeyValueConfig& cfg, const DomainSpec& dom) {
    std::vector<BumpSpec> specs;
    for (int i = 1;; ++i) {
        const std::string p = "source." + std::to_string(i) + ".";
        if (cfg.keys_with_prefix(p).empty()) break;
        BumpSpec b;
        b.center[0] = cfg.get_double(p + "center_x");
        b.width[0] = cfg.get_double(p + "width_x");
        if (dom.dim == 2) {
            b.center[1] = cfg.get_double(p + "center_y");
            b.width[1] = cfg.get_double(p + "width_y");
        }
        b.center_t = cfg.get_double(p + "center_t");
        b.width_t = cfg.get_double(p + "width_t");
        b.amplitude = cfg.get_double(p + "amplitude", 1.0);
        specs.push_back(b);
    }
    return specs;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::vector<double>> energy_rows(const EnergyReport& rep, double dt) {
    std::vector<std::vector<double>> rows;
    for (size_t n = 0; n < rep.kinetic.size(); ++n)
        rows.push_back({static_cast<double>(n) * dt, rep.kinetic[n], rep.potential[n],
                        rep.damping_cumulative[n]});
    return rows;
}

void write_snapshot_series(const std::filesystem::path& dir, const TimeSeriesField& u, int index,
                           const std::string& name) {
    const EigenBasis& b = *u.basis;
    const int nodes = b.domain().total_nodes();
    std::vector<double> grid(nodes);
    b.synthesize(u.snapshot(index), grid);
    std::vector<std::vector<double>> rows;
    if (b.domain().dim == 1) {
        for (int j = 0; j < nodes; ++j) rows.push_back({b.node_coord(0, j), grid[j]});
        write_table(dir / name, {"x", "u"}, rows);
    } else {
        const int n2 = b.domain().n_interior[1];
        for (int j = 0; j < nodes; ++j)
            rows.push_back({b.node_coord(0, j / n2), b.node_coord(1, j % n2), grid[j]});
        write_table(dir / name, {"x", "y", "u"}, rows);
    }
}

} // namespace

RunManifest run_experiment(const KeyValueConfig& cfg, const std::filesystem::path& outdir,
                           int threads, bool validate_only) {
    const auto t_start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.config_text = cfg.canonical_text();

    const std::string kind = cfg.get_string("experiment.kind");
    const DomainSpec dom = domain_from_config(cfg);
    const SolveConfig sc = solve_from_config(cfg);
    const FractionalOrder s{cfg.get_double("fractional.s", 0.5)};
    s.validate();
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    const BasisPtr basis = build_basis(dom);

    if (!validate_only) std::filesystem::create_directories(outdir);
    manifest.add_diagnostic("experiment.kind", kind);
    manifest.add_diagnostic("threads", static_cast<double>(threads));

    auto finish = [&]() -> RunManifest& {
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        if (!validate_only) manifest.write(outdir / "manifest.txt");
        return manifest;
    };

    if (kind == "oracle-check") {
        QuadratureConfig quad;
        quad.panel_nodes = cfg.get_int("quadrature.panel_nodes", 12);
        quad.check_tol = cfg.get_double("quadrature.check_tol", 1e-9);
        if (validate_only) return finish();
        double max_rel = 0.0;
        std::vector<std::vector<double>> rows;
        for (int k = 0; k < basis->size(); ++k) {
            const double lam = basis->lambda(k);
            const double exact = std::pow(lam, s.s);
            const double quadval = fractional_power_quadrature(lam, s, quad);
            const double rel = std::abs(quadval - exact) / exact;
            max_rel = std::max(max_rel, rel);
            rows.push_back({lam, quadval, exact, rel});
        }
        write_table(outdir / "series_oracle.csv", {"lambda", "quadrature", "exact", "rel_error"}, rows);
        manifest.add_artifact(outdir, "series_oracle.csv");
        manifest.add_diagnostic("max_rel_error", max_rel);
        return finish();
    }

    if (kind == "solve-linear" || kind == "solve-nonlinear") {
        const auto bump_specs = bumps_from_config(cfg, dom);
        TimeSeriesField f = TimeSeriesField::zeros(basis, sc.time);
        for (const BumpSpec& b : bump_specs) f = lincomb(1.0, f, 1.0, source_bump(b, basis, sc.time));
        if (validate_only) return finish();
        write_time_series(outdir / "f.field", f);
        manifest.add_artifact(outdir, "f.field");
        if (kind == "solve-linear") {
            TimeSeriesField u = solve_linear(f, s, sc);
            EnergyReport rep = energy_report(u, f, s);
            write_time_series(outdir / "u.field", u);
            write_table(outdir / "series_energy.csv", {"t", "kinetic", "potential", "damping_integral"},
                        energy_rows(rep, sc.time.dt()));
            write_snapshot_series(outdir, u, u.snapshots() - 1, "series_snapshot.csv");
            manifest.add_artifact(outdir, "u.field");
            manifest.add_artifact(outdir, "series_energy.csv");
            manifest.add_artifact(outdir, "series_snapshot.csv");
            manifest.add_diagnostic("energy_ratio_max", rep.ratio_max);
        } else {
            const KappaField kappa = kappa_from_config(cfg, "kappa.", basis, sc.time);
            NonlinearSolveResult res = solve_nonlinear(kappa, f, s, sc);
            write_time_series(outdir / "u.field", res.u);
            std::vector<std::vector<double>> rows;
            for (size_t i = 0; i < res.residual_history.size(); ++i)
                rows.push_back({static_cast<double>(i + 1), res.residual_history[i]});
            write_table(outdir / "series_residuals.csv", {"iter", "residual"}, rows);
            write_snapshot_series(outdir, res.u, res.u.snapshots() - 1, "series_snapshot.csv");
            manifest.add_artifact(outdir, "u.field");
            manifest.add_artifact(outdir, "series_residuals.csv");
            manifest.add_artifact(outdir, "series_snapshot.csv");
            manifest.add_diagnostic("picard_iterations", static_cast<double>(res.outer_iterations));
            manifest.add_diagnostic("coefficient_min", res.coefficient_min);
        }
        return finish();
    }

    if (kind == "sts-map") {
        const MeasurementWindow W = window_from_config(cfg, dom);
        const KappaField kappa = kappa_from_config(cfg, "kappa.", basis, sc.time);
        const auto bump_specs = bumps_from_config(cfg, dom);
        if (bump_specs.empty()) throw ConfigError("sts-map: need at least one source.<i> block");
        TimeSeriesField f = TimeSeriesField::zeros(basis, sc.time);
        for (const BumpSpec& b : bump_specs) f = lincomb(1.0, f, 1.0, source_bump(b, basis, sc.time, &W));
        if (validate_only) return finish();
        WindowField v = source_to_solution(kappa, f, W, s, sc);
        write_window_field(outdir / "measurement.window", v, dom);
        manifest.add_artifact(outdir, "measurement.window");
        manifest.add_diagnostic("window_nodes", static_cast<double>(v.nodes_per_snapshot));
        return finish();
    }

    if (kind == "linearize") {
        const KappaField kappa = kappa_from_config(cfg, "kappa.", basis, sc.time);
        const auto bump_specs = bumps_from_config(cfg, dom);
        if (bump_specs.empty()) throw ConfigError("linearize: need source.<i> blocks");
        const std::string mode = cfg.get_string("linearize.mode", "first");
        if (validate_only) return finish();
        if (mode == "first") {
            const std::vector<double> eps =
                parse_list(cfg.get_string("linearize.eps", "1e-2,5e-3,2.5e-3"));
            TimeSeriesField f = source_bump(bump_specs.at(0), basis, sc.time);
            LinearizationResult lin = first_linearization(kappa, f, eps, s, sc);
            write_time_series(outdir / "w.field", lin.field);
            manifest.add_artifact(outdir, "w.field");
            manifest.add_diagnostic("richardson_error", lin.richardson_error);
            manifest.add_diagnostic("converged", lin.converged ? 1.0 : 0.0);
        } else if (mode == "cross") {
            if (bump_specs.size() < 2) throw ConfigError("linearize: cross mode needs two sources");
            const double e1 = cfg.get_double("linearize.eps1", 5e-3);
            const double e2 = cfg.get_double("linearize.eps2", 5e-3);
            TimeSeriesField f1 = source_bump(bump_specs.at(0), basis, sc.time);
            TimeSeriesField f2 = source_bump(bump_specs.at(1), basis, sc.time);
            LinearizationResult lin =
                cross_linearization(kappa, f1, f2, e1, e2, s, sc, CrossScheme::Both);
            write_time_series(outdir / "v.field", lin.field);
            manifest.add_artifact(outdir, "v.field");
            manifest.add_diagnostic("stencil_gap", lin.richardson_error);
        } else {
            throw ConfigError("linearize.mode must be first or cross");
        }
        return finish();
    }

    if (kind == "runge-design") {
        const MeasurementWindow W = window_from_config(cfg, dom);
        const std::string preset = cfg.get_string("target.preset", "ones");
        RungeProblem problem;
        problem.window = W;
        problem.alpha = cfg.get_double("runge.alpha", 1e-4);
        problem.cg_max_iter = cfg.get_int("runge.cg_max_iter", 200);
        problem.cg_tol = cfg.get_double("runge.cg_tol", 1e-8);
        TimeSeriesField target = TimeSeriesField::zeros(basis, sc.time);
        if (preset == "ones") {
            std::vector<double> grid(dom.total_nodes(), 1.0);
            for (int n = 0; n < target.snapshots(); ++n) basis->analyze(grid, target.snapshot(n));
        } else if (preset == "kappa") {
            const KappaField kappa = kappa_from_config(cfg, "kappa.", basis, sc.time);
            const KappaField::Sample ks = kappa.sample(*basis, sc.time);
            const int nodes = dom.total_nodes();
            for (int n = 0; n < target.snapshots(); ++n)
                basis->analyze({ks.value.data() + static_cast<size_t>(n) * nodes,
                                static_cast<size_t>(nodes)},
                               target.snapshot(n));
        } else {
            throw ConfigError("target.preset must be ones or kappa");
        }
        problem.target = mask_to_complement(target, W);
        if (validate_only) return finish();
        RungeSolution sol = design_source(problem, s, sc);
        write_time_series(outdir / "f.field", sol.f);
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < sol.residual_history.size(); ++i)
            rows.push_back({static_cast<double>(i + 1), sol.residual_history[i]});
        write_table(outdir / "series_residuals.csv", {"iter", "residual"}, rows);
        manifest.add_artifact(outdir, "f.field");
        manifest.add_artifact(outdir, "series_residuals.csv");
        manifest.add_diagnostic("final_relative_residual", sol.final_relative_residual);
        manifest.add_diagnostic("converged", sol.converged ? 1.0 : 0.0);
        return finish();
    }

    if (kind == "invert") {
        const MeasurementWindow W = window_from_config(cfg, dom);
        const KappaField kappa_true = kappa_from_config(cfg, "kappa.", basis, sc.time);
        const int npairs = cfg.get_int("pairs.count", 10);
        const double amplitude = cfg.get_double("pairs.amplitude", 10.0);
        const double eps = cfg.get_double("invert.eps", 5e-3);
        const double alpha = cfg.get_double("invert.alpha", 1e-12);
        KappaBasisSpec spec;
        spec.x_modes = cfg.get_int("kappa_basis.x_modes", 8);
        spec.t_degree = cfg.get_int("kappa_basis.t_degree", 0);
        spec.validate();
        if (validate_only) return finish();
        const auto pairs = make_bump_pairs(basis, sc.time, W, npairs, amplitude, seed);
        const auto data = collect_pair_data_parallel(kappa_true, pairs, eps, W, s, sc, threads);
        ReconstructionResult res =
            reconstruct_kappa(data, spec, alpha, cfg.get_int("invert.cg_max_iter", 200),
                              cfg.get_double("invert.cg_tol", 1e-10), s, sc, &kappa_true);
        // kappa profile at t = 0 against the truth
        const KappaField::Sample est = res.kappa_est.sample(*basis, sc.time);
        const KappaField::Sample tru = kappa_true.sample(*basis, sc.time);
        std::vector<std::vector<double>> rows;
        for (int j = 0; j < dom.total_nodes(); ++j)
            rows.push_back({basis->node_coord(0, j), est.value[j], tru.value[j]});
        write_table(outdir / "series_kappa.csv", {"x", "kappa_est", "kappa_true"}, rows);
        std::vector<std::vector<double>> crows;
        for (size_t i = 0; i < res.cg_residual_history.size(); ++i)
            crows.push_back({static_cast<double>(i + 1), res.cg_residual_history[i]});
        write_table(outdir / "series_residuals.csv", {"iter", "residual"}, crows);
        manifest.add_artifact(outdir, "series_kappa.csv");
        manifest.add_artifact(outdir, "series_residuals.csv");
        manifest.add_diagnostic("relative_l2_error_off_window", res.relative_l2_error);
        manifest.add_diagnostic("gradient_norm", res.gradient_norm);
        manifest.add_diagnostic("converged", res.converged ? 1.0 : 0.0);
        for (size_t p = 0; p < res.data_misfit.size(); ++p)
            manifest.add_diagnostic("misfit_pair_" + std::to_string(p + 1), res.data_misfit[p]);
        return finish();
    }

    if (kind == "uniqueness") {
        const MeasurementWindow W = window_from_config(cfg, dom);
        const KappaField kappa1 = kappa_from_config(cfg, "kappa1.", basis, sc.time);
        const KappaField kappa2 = kappa_from_config(cfg, "kappa2.", basis, sc.time);
        const auto bump_specs = bumps_from_config(cfg, dom);
        if (bump_specs.empty()) throw ConfigError("uniqueness: need source.<i> blocks");
        std::vector<TimeSeriesField> sources;
        for (const BumpSpec& b : bump_specs) sources.push_back(source_bump(b, basis, sc.time, &W));
        const double eps = cfg.get_double("uniqueness.eps", 1.0);
        if (validate_only) return finish();
        UniquenessReport rep =
            uniqueness_experiment(kappa1, kappa2, sources, eps, W, s, sc,
                                  cfg.get_double("runge.alpha", 1e-4), cfg.get_int("runge.cg_max_iter", 80));
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < rep.map_difference_max.size(); ++i)
            rows.push_back({static_cast<double>(i + 1), rep.map_difference_max[i]});
        write_table(outdir / "series_mapdiff.csv", {"source", "map_difference_max"}, rows);
        manifest.add_artifact(outdir, "series_mapdiff.csv");
        manifest.add_diagnostic("window_identity_residual", rep.window_identity_residual);
        manifest.add_diagnostic("pairing_value", rep.pairing_value);
        manifest.add_diagnostic("pairing_limit", rep.pairing_limit);
        manifest.add_diagnostic("pairing_reference", rep.pairing_reference);
        manifest.add_diagnostic("runge_residual_ones", rep.runge_residual_ones);
        manifest.add_diagnostic("runge_residual_diff", rep.runge_residual_diff);
        return finish();
    }

    throw ConfigError("unknown experiment.kind `" + kind +
                      "` (expected oracle-check|solve-linear|solve-nonlinear|sts-map|linearize|"
                      "runge-design|invert|uniqueness)");
}

std::filesystem::path emit_plot_series(const std::filesystem::path& artifact_dir,
                                       const std::string& series) {
    const std::filesystem::path direct = artifact_dir / ("series_" + series + ".csv");
    if (std::filesystem::exists(direct)) return direct;
    // snapshot:<n> is synthesized on demand from the stored solution field
    if (series.rfind("snapshot:", 0) == 0) {
        const int index = std::stoi(series.substr(9));
        const std::filesystem::path manifest = artifact_dir / "manifest.txt";
        const std::filesystem::path ufile = artifact_dir / "u.field";
        if (!std::filesystem::exists(manifest) || !std::filesystem::exists(ufile))
            throw ConfigError("plot: artifact directory lacks manifest.txt or u.field");
        // recover the domain from the config echo
        std::ifstream in(manifest);
        std::string line, config_text;
        bool in_config = false;
        while (std::getline(in, line)) {
            if (line == "[config]") { in_config = true; continue; }
            if (line == "[diagnostics]") break;
            if (in_config) config_text += line + "\n";
        }
        const KeyValueConfig cfg = KeyValueConfig::parse_string(config_text, manifest.string());
        DomainSpec dom;
        dom.dim = cfg.get_int("domain.dim", 1);
        dom.lengths[0] = cfg.get_double("domain.length", 3.141592653589793);
        dom.n_interior[0] = cfg.get_int("domain.n_interior", 64);
        if (dom.dim == 2) {
            dom.lengths[1] = cfg.get_double("domain.length2", dom.lengths[0]);
            dom.n_interior[1] = cfg.get_int("domain.n_interior2", dom.n_interior[0]);
        }
        const BasisPtr basis = build_basis(dom);
        TimeSeriesField u = read_time_series(ufile, basis);
        if (index < 0 || index >= u.snapshots())
            throw ConfigError("plot: snapshot index out of range");
        write_snapshot_series(artifact_dir, u, index, "series_" + series + ".csv");
        return artifact_dir / ("series_" + series + ".csv");
    }
    throw ConfigError("plot: missing series `" + series + "` in " + artifact_dir.string());
}

} // namespace fracwave

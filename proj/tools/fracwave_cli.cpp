// Command-line runner: `fracwave run <config>`, `fracwave plot <dir> <series>`,
// `fracwave validate <config>`. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "fracwave/experiments.hpp"

namespace {

int env_threads() {
    const char* v = std::getenv("FRACWAVE_THREADS");
    if (!v) return 1;
    const int n = std::atoi(v);
    if (n < 1) throw fracwave::ConfigError("FRACWAVE_THREADS must be a positive integer");
    return n;
}

std::filesystem::path resolve_outdir(const fracwave::KeyValueConfig& cfg) {
    if (const char* v = std::getenv("FRACWAVE_OUTPUT_DIR"); v && *v) return v;
    return cfg.get_string("output.dir", "out");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracwave: damped nonlinear wave simulation and kappa inversion"};
    app.require_subcommand(1);

    std::string config_path, artifact_dir, series;
    CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file")->required();
    CLI::App* plot = app.add_subcommand("plot", "emit a plot series from an artifact directory");
    plot->add_option("dir", artifact_dir, "artifact directory")->required();
    plot->add_option("series", series, "series name (e.g. energy, residuals, snapshot:12)")->required();
    CLI::App* validate = app.add_subcommand("validate", "parse a config and check preconditions");
    validate->add_option("config", config_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed() || validate->parsed()) {
            const auto cfg = fracwave::KeyValueConfig::parse_file(config_path);
            const auto outdir = resolve_outdir(cfg);
            const bool only_validate = validate->parsed();
            const auto manifest = fracwave::run_experiment(cfg, outdir, env_threads(), only_validate);
            if (only_validate) {
                std::cout << "config ok: " << config_path << "\n";
            } else {
                std::cout << "wrote " << (outdir / "manifest.txt").string() << " ("
                          << manifest.artifacts.size() << " artifacts, "
                          << manifest.wall_seconds << " s)\n";
                for (const auto& [k, v] : manifest.diagnostics)
                    std::cout << "  " << k << " = " << v << "\n";
            }
        } else if (plot->parsed()) {
            const auto path = fracwave::emit_plot_series(artifact_dir, series);
            std::cout << path.string() << "\n";
        }
    } catch (const fracwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fracwave::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

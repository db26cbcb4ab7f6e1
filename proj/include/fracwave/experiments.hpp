#pragma once

#include <filesystem>

#include "fracwave/inversion.hpp"
#include "fracwave/io.hpp"

namespace fracwave {

// deterministic uniform double in [0,1) from a standard mt19937_64 draw
double uniform01(std::uint64_t raw);

// reproducible bump-pair generator shared by the CLI and the experiment suite
std::vector<std::pair<TimeSeriesField, TimeSeriesField>> make_bump_pairs(
    const BasisPtr& basis, const TimeGrid& time, const MeasurementWindow& window, int count,
    double amplitude, std::uint64_t seed);

// run pair-data collection with a fixed-order aggregation, optionally
// splitting the pairs over worker threads
std::vector<PairDatum> collect_pair_data_parallel(
    const KappaField& kappa_true,
    const std::vector<std::pair<TimeSeriesField, TimeSeriesField>>& sources, double eps,
    const MeasurementWindow& window, const FractionalOrder& s, const SolveConfig& cfg, int threads);

// parse `kappa.` (or another prefix) into a KappaField; file-backed kappas
// are sampled on the given basis and time grid
KappaField kappa_from_config(const KeyValueConfig& cfg, const std::string& prefix,
                             const BasisPtr& basis, const TimeGrid& time);

// execute the experiment described by the config; writes artifacts and the
// manifest into outdir unless validate_only is set
RunManifest run_experiment(const KeyValueConfig& cfg, const std::filesystem::path& outdir,
                           int threads, bool validate_only = false);

// emit a plot series from an artifact directory; returns the written path
std::filesystem::path emit_plot_series(const std::filesystem::path& artifact_dir,
                                       const std::string& series);

} // namespace fracwave

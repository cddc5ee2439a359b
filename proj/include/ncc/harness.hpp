#pragma once

// Experiment runner: policy-vs-environment loops, regret bookkeeping,
// parameter sweeps and plot-ready output.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ncc/config.hpp"
#include "ncc/dataio.hpp"
#include "ncc/metrics.hpp"

namespace ncc {

using RowPool = std::shared_ptr<const std::vector<NurseryRecord>>;

/// Loads the dataset named by a dataset preset and selects its split;
/// returns nullptr for synthetic presets.
RowPool load_pool(const EnvironmentSpec& spec);

struct ExperimentOutput {
  RunResult result;
  /// Draw-stream hash per repetition; every policy of a repetition consumes this stream.
  std::vector<std::uint64_t> stream_hashes;
};

/// Runs every policy on every repetition. Repetitions run on up to
/// cfg.run.threads workers; the output does not depend on the thread count.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, RowPool pool);
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

ManifestInfo manifest_for(const ExperimentConfig& cfg, const RunResult& result);

/// regret_curve.csv, totals.csv, action_histogram.csv and accuracy.csv.
void emit_plot_data(const RunResult& result, const std::filesystem::path& dir);

struct GridAxis {
  std::string policy;
  std::string param;
  std::vector<double> values;
};

/// Lines of the form `label.param = v1, v2, ...`; an optional [grid] header
/// and '#' comments are accepted.
std::vector<GridAxis> parse_grid(std::istream& in);
std::vector<GridAxis> load_grid(const std::filesystem::path& path);

struct SweepRow {
  std::vector<std::pair<std::string, double>> assignment;  // "label.param" -> value
  std::string policy;
  double mean_total_gain = 0.0;
  double mean_final_regret = 0.0;
  std::vector<double> final_regret_per_run;
  bool best = false;
};

/// One row per (grid point, swept policy). Only policies named in the grid
/// are run. The best row has the highest mean total gain.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const std::vector<GridAxis>& grid, RowPool pool);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace ncc

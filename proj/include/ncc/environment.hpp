#pragma once

// Piece-wise stationary environments: a tabular synthetic source and a
// dataset-backed source with cyclic label shifting. Observation costs are
// truncated Normal draws around per-segment means.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ncc/dataio.hpp"
#include "ncc/feature_space.hpp"
#include "ncc/oracle.hpp"

namespace ncc {

/// Fully resolved environment for one repetition.
struct EnvironmentConfig {
  FeatureSpace space;
  std::size_t action_count = 0;
  std::uint64_t horizon = 0;

  std::vector<std::uint64_t> reward_starts{1};
  // Synthetic source: p(phi) and one [action * state_count + state] table per reward segment.
  std::vector<double> state_probabilities;
  std::vector<std::vector<double>> reward_tables;
  // Dataset source: row pool and one label shift per reward segment.
  std::shared_ptr<const std::vector<NurseryRecord>> rows;
  std::vector<std::size_t> label_shifts;

  std::vector<std::uint64_t> cost_starts{1};
  std::vector<std::vector<double>> cost_means;
  double cost_sigma = 0.001;

  bool is_dataset() const { return rows != nullptr; }
  /// Throws std::invalid_argument listing the first broken invariant.
  void validate() const;
};

/// Everything the environment draws for round t. Shared by every policy of
/// a repetition so that they face identical randomness.
struct RoundDraw {
  std::uint64_t t = 0;
  std::size_t state_index = 0;
  std::vector<double> costs;
  double reward_uniform = 0.0;
  std::size_t row = 0;  // dataset source only
};

std::size_t cycle_labels(std::size_t label, std::size_t shift, std::size_t action_count);

/// Normal(mean, sigma) conditioned on [0,1] by rejection; sigma == 0 returns mean.
double truncated_normal(double mean, double sigma, std::mt19937_64& rng);

class Environment {
 public:
  /// Pre-generates all `horizon` rounds from streams keyed by (seed, run).
  /// Throws std::out_of_range when a dataset pool has fewer rows than the horizon.
  Environment(std::shared_ptr<const EnvironmentConfig> cfg, std::uint64_t seed, std::uint64_t run);

  const EnvironmentConfig& config() const { return *cfg_; }
  /// 1 <= t <= horizon.
  const RoundDraw& sample_round(std::uint64_t t) const;
  StateVector state_vector(const RoundDraw& draw) const { return cfg_->space.state_at(draw.state_index); }
  double realize_reward(const RoundDraw& draw, std::size_t action) const;
  std::size_t reward_segment(std::uint64_t t) const { return segment_at(cfg_->reward_starts, t); }
  std::size_t cost_segment(std::uint64_t t) const { return segment_at(cfg_->cost_starts, t); }

  /// Synthetic: the configured tables. Dataset: empirical frequencies over the row pool.
  TrueParameters true_parameters() const;
  /// FNV-1a over the serialized draw stream.
  std::uint64_t stream_hash() const;

 private:
  std::shared_ptr<const EnvironmentConfig> cfg_;
  std::vector<RoundDraw> draws_;
};

/// Named presets plus overrides, resolved per repetition by build_environment.
struct EnvironmentSpec {
  std::string preset = "nursery";
  std::optional<std::vector<std::uint64_t>> reward_change_points;
  std::optional<std::vector<std::uint64_t>> cost_change_points;
  double cost_min = 0.03;
  double cost_max = 0.08;
  double cost_sigma = 0.001;
  /// Per-feature means used for every cost segment instead of random draws.
  std::optional<std::vector<double>> cost_means;
  // Dataset presets.
  std::string dataset;
  std::string split;  // train | validation | all; empty: the preset's own split
  std::uint64_t split_seed = 0;
};

/// `split`, or "validation" for the validation preset and "train" otherwise.
std::string effective_split(const EnvironmentSpec& spec);

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"nursery", "validation", "synthetic-stationary",
                                              "synthetic-switching"};
  return names;
}
bool preset_uses_dataset(const std::string& preset);

/// Default change points of a preset (change point c starts a segment at round c).
std::vector<std::uint64_t> preset_reward_change_points(const std::string& preset);
std::vector<std::uint64_t> preset_cost_change_points(const std::string& preset);

/// Fixed cost means of a preset, if it has them (the synthetic presets do).
std::optional<std::vector<double>> preset_cost_means(const std::string& preset);

/// Cost means come from spec.cost_means, else the preset's fixed means, else
/// U[cost_min, cost_max] draws per cost segment from the (seed, run) stream.
/// `pool` must be set for dataset presets.
EnvironmentConfig build_environment(const EnvironmentSpec& spec, std::uint64_t horizon,
                                    std::shared_ptr<const std::vector<NurseryRecord>> pool, std::uint64_t seed,
                                    std::uint64_t run);

}  // namespace ncc

#pragma once

// Sliding-window reward/cost statistics and full-history probability counters.
//
// Window statistics cover the last `window_size` recorded rounds. History
// counters are never evicted: every recorded round increments the counters of
// all 2^|I_t| substates of the observed partial vector.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

#include "ncc/feature_space.hpp"

namespace ncc {

inline constexpr std::size_t kUnboundedWindow = std::numeric_limits<std::size_t>::max();

struct FeatureCost {
  std::size_t feature = 0;
  double cost = 0.0;
  friend bool operator==(const FeatureCost&, const FeatureCost&) = default;
};

struct RoundRecord {
  std::uint64_t time = 0;
  std::size_t action = 0;
  PartialStateVector partial;
  ObservationSet observation_set;
  double reward = 0.0;
  /// One entry per member of observation_set, ascending by feature.
  std::vector<FeatureCost> paid_costs;

  double total_cost() const;
  /// Throws std::invalid_argument when the record breaks its invariants.
  void validate(const FeatureSpace& space, std::size_t action_count) const;
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct SumCount {
  std::size_t count = 0;
  double sum = 0.0;
  friend bool operator==(const SumCount&, const SumCount&) = default;
};

class LearnerState {
 public:
  LearnerState(FeatureSpace space, std::size_t action_count, std::size_t window_size);

  const FeatureSpace& space() const { return space_; }
  std::size_t action_count() const { return action_count_; }
  std::size_t window_size() const { return window_size_; }
  const std::deque<RoundRecord>& ring() const { return ring_; }
  std::uint64_t last_time() const { return last_time_; }

  /// Throws std::invalid_argument on non-increasing time or an invalid record.
  void record_round(const RoundRecord& rec);

  double empirical_reward(std::size_t action, const PartialStateVector& psi) const;
  double empirical_cost(std::size_t feature) const;
  double estimate_probability(const PartialStateVector& psi) const;

  // Counts clamped at 1, as used in every confidence radius.
  std::size_t window_count_reward(std::size_t action, const PartialStateVector& psi) const;
  std::size_t window_count_cost(std::size_t feature) const;
  std::size_t history_count(ObservationSet obs) const;

  // Raw (unclamped) views.
  const SumCount& reward_stats(std::size_t action, std::size_t partial_index) const {
    return reward_stats_[action * space_.psi_total() + partial_index];
  }
  const SumCount& cost_stats(std::size_t feature) const { return cost_stats_[feature]; }
  std::size_t raw_history_count(ObservationSet obs) const { return history_set_[obs.mask()]; }
  std::size_t raw_history_count_partial(std::size_t partial_index) const { return history_partial_[partial_index]; }

  /// max{1, N(D(psi), psi)} / max{1, N(D(psi))} by global partial index.
  double estimate_probability_at(std::size_t partial_index, ObservationSet domain) const;

 private:
  void apply_window(const RoundRecord& rec, int sign);

  FeatureSpace space_;
  std::size_t action_count_;
  std::size_t window_size_;
  std::deque<RoundRecord> ring_;
  std::vector<SumCount> reward_stats_;
  std::vector<SumCount> cost_stats_;
  std::vector<std::size_t> history_set_;
  std::vector<std::size_t> history_partial_;
  std::uint64_t last_time_ = 0;
  bool any_recorded_ = false;
};

}  // namespace ncc

#pragma once

// Per-round outcome rows, per-run summaries and derived metrics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ncc {

struct RoundRow {
  std::size_t run = 0;
  std::uint64_t t = 0;
  std::size_t policy = 0;  // index into RunResult::policies
  std::size_t action = 0;
  std::uint32_t obs_set = 0;
  double reward = 0.0;
  double cost_paid = 0.0;
  double gain = 0.0;
  double expected_regret = 0.0;
  double realized_regret = 0.0;
  double cumulative_expected_regret = 0.0;
  friend bool operator==(const RoundRow&, const RoundRow&) = default;
};

struct SummaryRow {
  std::size_t policy = 0;
  std::size_t run = 0;
  double total_reward = 0.0;
  double total_cost = 0.0;
  double total_gain = 0.0;
  double final_cumulative_regret = 0.0;
  /// k = 0..D; absent when no round observed at most k features.
  std::vector<std::optional<double>> accuracy_at_k;
  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct RunResult {
  std::vector<std::string> policies;
  std::size_t runs = 0;
  std::uint64_t horizon = 0;
  std::size_t feature_count = 0;
  std::size_t action_count = 0;
  std::vector<std::uint64_t> reward_starts;
  std::vector<std::uint64_t> cost_starts;
  /// Ordered by run, then policy, then t.
  std::vector<RoundRow> rounds;
  /// Ordered by run, then policy.
  std::vector<SummaryRow> summaries;

  std::span<const RoundRow> series(std::size_t run, std::size_t policy) const;
  const SummaryRow& summary(std::size_t run, std::size_t policy) const;
  /// Position of a policy label; throws std::out_of_range when absent.
  std::size_t policy_index(const std::string& label) const;
  double mean_total_gain(std::size_t policy) const;
  double mean_total_reward(std::size_t policy) const;
  double mean_total_cost(std::size_t policy) const;
  double mean_final_regret(std::size_t policy) const;
};

struct ObservationOutcome {
  std::size_t observed_count = 0;
  double reward = 0.0;
};

/// Reward rate over rounds that observed at most k features; nullopt for 0/0.
std::optional<double> accuracy_by_observations(std::span<const ObservationOutcome> outcomes, std::size_t k);
std::vector<std::optional<double>> accuracy_curve(std::span<const RoundRow> rows, std::size_t feature_count);

/// Summary over one series: totals, final regrets and the accuracy curve.
SummaryRow summarize(std::span<const RoundRow> rows, std::size_t run, std::size_t policy, std::size_t feature_count);

}  // namespace ncc

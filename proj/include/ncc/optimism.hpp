#pragma once

// Confidence radii and the optimistic-gain inner problem.
//
// For a fixed observation set the learner maximizes sum_psi q(psi) r*(psi)
// over probability vectors q with ||q - p_bar||_1 <= radius. Because the
// objective is linear, the optimum moves min(radius/2, 1 - p_bar(best)) mass
// onto the highest-reward state and takes the same amount from the
// lowest-reward states, emptying each before touching the next.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ncc/estimators.hpp"

namespace ncc {

struct ConfidenceConfig {
  std::uint64_t horizon = 1;
  std::size_t action_count = 1;
  std::size_t psi_total = 1;
  std::size_t feature_count = 0;
  std::size_t obs_set_count = 1;
  std::uint64_t window = 1;
  double delta = 0.05;

  static ConfidenceConfig for_space(const FeatureSpace& space, std::size_t action_count, std::uint64_t horizon,
                                    std::uint64_t window, double delta);

  /// Throws std::invalid_argument unless every field is positive and delta in (0,1).
  void validate() const;

  /// ln(T A Psi_tot w / delta)
  double reward_log() const;
  /// ln(T D w / delta)
  double cost_log() const;
  /// ln(2 T |P(D)| / delta)
  double probability_log() const;
};

/// min{1, sqrt(numerator / max{1, n})}; the shared shape of every radius.
double capped_radius(double numerator, double n);
/// min{1, sqrt(ln(T A Psi_tot w / delta) / n)}
double reward_radius(const ConfidenceConfig& cfg, double n);
/// min{1, sqrt(2 ln(T D w / delta) / n)}
double cost_radius(const ConfidenceConfig& cfg, double n);
/// mean - cost_radius(n); not clipped at zero.
double pessimistic_cost(const ConfidenceConfig& cfg, double mean, double n);
/// min{1, sqrt(2 Psi_tot ln(2 T |P(D)| / delta) / n_I)}
double probability_radius(const ConfidenceConfig& cfg, double n_obs);

/// Empirical reward plus its radius for (action, psi); lies in [0, 2].
double optimistic_reward(const LearnerState& state, const ConfidenceConfig& cfg, std::size_t action,
                         const PartialStateVector& psi);

struct OptimisticSolution {
  double value = 0.0;
  /// q over Psi+(I), aligned with the input order.
  std::vector<double> distribution;
};

/// Greedy mass transport. `center` need not be normalized; an all-zero
/// center is treated as uniform. Ties in reward resolve toward the earlier
/// input position.
OptimisticSolution solve_optimistic_gain(std::span<const double> center, std::span<const double> optimistic_rewards,
                                         double radius, double cost_total);

/// Allocation-free variant for the per-round loop; reuses internal buffers.
class OptimisticGainSolver {
 public:
  double solve(std::span<const double> center, std::span<const double> optimistic_rewards, double radius,
               double cost_total);
  /// Distribution of the last solve, aligned with its input order.
  std::span<const double> distribution() const { return q_; }

 private:
  std::vector<double> q_;
  std::vector<std::size_t> order_;
};

}  // namespace ncc

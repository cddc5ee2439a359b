#include "ncc/optimism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ncc {

ConfidenceConfig ConfidenceConfig::for_space(const FeatureSpace& space, std::size_t action_count,
                                             std::uint64_t horizon, std::uint64_t window, double delta) {
  ConfidenceConfig cfg;
  cfg.horizon = horizon;
  cfg.action_count = action_count;
  cfg.psi_total = space.psi_total();
  cfg.feature_count = space.feature_count();
  cfg.obs_set_count = space.observation_set_count();
  cfg.window = std::min<std::uint64_t>(window, horizon);
  cfg.delta = delta;
  return cfg;
}

void ConfidenceConfig::validate() const {
  if (horizon == 0 || action_count == 0 || psi_total == 0 || obs_set_count == 0 || window == 0) {
    throw std::invalid_argument("confidence config fields must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

double ConfidenceConfig::reward_log() const {
  return std::log(static_cast<double>(horizon)) + std::log(static_cast<double>(action_count)) +
         std::log(static_cast<double>(psi_total)) + std::log(static_cast<double>(window)) - std::log(delta);
}

double ConfidenceConfig::cost_log() const {
  const double d = static_cast<double>(std::max<std::size_t>(1, feature_count));
  return std::log(static_cast<double>(horizon)) + std::log(d) + std::log(static_cast<double>(window)) -
         std::log(delta);
}

double ConfidenceConfig::probability_log() const {
  return std::log(2.0) + std::log(static_cast<double>(horizon)) + std::log(static_cast<double>(obs_set_count)) -
         std::log(delta);
}

double capped_radius(double numerator, double n) {
  if (n < 1.0) n = 1.0;
  if (numerator <= 0.0) return 0.0;
  return std::min(1.0, std::sqrt(numerator / n));
}

double reward_radius(const ConfidenceConfig& cfg, double n) { return capped_radius(cfg.reward_log(), n); }

double cost_radius(const ConfidenceConfig& cfg, double n) { return capped_radius(2.0 * cfg.cost_log(), n); }

double pessimistic_cost(const ConfidenceConfig& cfg, double mean, double n) { return mean - cost_radius(cfg, n); }

double probability_radius(const ConfidenceConfig& cfg, double n_obs) {
  return capped_radius(2.0 * static_cast<double>(cfg.psi_total) * cfg.probability_log(), n_obs);
}

double optimistic_reward(const LearnerState& state, const ConfidenceConfig& cfg, std::size_t action,
                         const PartialStateVector& psi) {
  return state.empirical_reward(action, psi) +
         reward_radius(cfg, static_cast<double>(state.window_count_reward(action, psi)));
}

double OptimisticGainSolver::solve(std::span<const double> center, std::span<const double> optimistic_rewards,
                                   double radius, double cost_total) {
  const std::size_t n = center.size();
  if (n == 0 || optimistic_rewards.size() != n) {
    throw std::invalid_argument("center and rewards must be non-empty and equally sized");
  }
  q_.assign(center.begin(), center.end());
  double total = 0.0;
  for (double& v : q_) {
    v = std::max(0.0, v);
    total += v;
  }
  if (total > 0.0) {
    for (double& v : q_) v /= total;
  } else {
    std::fill(q_.begin(), q_.end(), 1.0 / static_cast<double>(n));
  }

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return optimistic_rewards[a] > optimistic_rewards[b];
  });

  const std::size_t best = order_.front();
  double moved = std::min(std::max(0.0, radius) / 2.0, 1.0 - q_[best]);
  if (moved > 0.0) {
    q_[best] += moved;
    for (std::size_t k = n; k-- > 1 && moved > 0.0;) {
      const std::size_t j = order_[k];
      const double take = std::min(q_[j], moved);
      q_[j] -= take;
      moved -= take;
    }
  }

  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) value += q_[i] * optimistic_rewards[i];
  return value - cost_total;
}

OptimisticSolution solve_optimistic_gain(std::span<const double> center, std::span<const double> optimistic_rewards,
                                         double radius, double cost_total) {
  OptimisticGainSolver solver;
  OptimisticSolution out;
  out.value = solver.solve(center, optimistic_rewards, radius, cost_total);
  out.distribution.assign(solver.distribution().begin(), solver.distribution().end());
  return out;
}

}  // namespace ncc

#include "ncc/policies.hpp"

#include <algorithm>
#include <stdexcept>

namespace ncc {

std::size_t PolicyDecision::action_for(const FeatureSpace& space, const PartialStateVector& psi) const {
  if (domain_set(psi) != observation_set) {
    throw std::invalid_argument("partial vector " + psi.to_string() + " is not in Psi+(" +
                                observation_set.to_string() + ")");
  }
  return action_rule.at(space.local_index(psi));
}

OptimisticDecideResult optimistic_decide(const LearnerState& state, const ConfidenceConfig& cfg,
                                         const PartialCatalog& catalog, CostEstimate costs) {
  const auto& space = catalog.space();
  if (!(state.space() == space)) throw std::invalid_argument("learner state and catalog disagree on the space");
  const std::size_t psi_count = space.psi_total();
  const std::size_t actions = state.action_count();

  // r*(psi) and its argmax for every partial vector.
  const double reward_log = cfg.reward_log();
  std::vector<double> best_reward(psi_count);
  std::vector<std::size_t> best_action(psi_count);
  for (std::size_t p = 0; p < psi_count; ++p) {
    double top = -1.0;
    std::size_t arg = 0;
    for (std::size_t a = 0; a < actions; ++a) {
      const auto& s = state.reward_stats(a, p);
      const double n = static_cast<double>(std::max<std::size_t>(1, s.count));
      const double r = s.sum / n + capped_radius(reward_log, n);
      if (r > top) {
        top = r;
        arg = a;
      }
    }
    best_reward[p] = top;
    best_action[p] = arg;
  }

  std::vector<double> feature_cost(space.feature_count());
  for (std::size_t i = 0; i < feature_cost.size(); ++i) {
    const double mean = state.empirical_cost(i);
    feature_cost[i] = costs == CostEstimate::Pessimistic
                          ? pessimistic_cost(cfg, mean, static_cast<double>(state.window_count_cost(i)))
                          : mean;
  }

  OptimisticDecideResult result;
  result.values.reserve(catalog.observation_sets().size());
  OptimisticGainSolver solver;
  std::vector<double> center;
  std::vector<double> rewards;
  double best_value = 0.0;
  bool have_best = false;
  ObservationSet chosen;
  for (auto obs : catalog.observation_sets()) {
    const auto& members = catalog.members(obs);
    center.resize(members.size());
    rewards.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      center[k] = state.estimate_probability_at(members[k], obs);
      rewards[k] = best_reward[members[k]];
    }
    double cost_total = 0.0;
    for (auto i : obs.members()) cost_total += feature_cost[i];
    const double radius = probability_radius(cfg, static_cast<double>(state.history_count(obs)));
    const double value = solver.solve(center, rewards, radius, cost_total);
    result.values.push_back(value);
    if (!have_best || value > best_value) {
      best_value = value;
      chosen = obs;
      have_best = true;
    }
  }

  result.decision.observation_set = chosen;
  const auto& members = catalog.members(chosen);
  result.decision.action_rule.reserve(members.size());
  for (auto p : members) result.decision.action_rule.push_back(best_action[p]);
  return result;
}

PolicyDecision ncc_decide(const LearnerState& state, const ConfidenceConfig& cfg, const PartialCatalog& catalog) {
  return optimistic_decide(state, cfg, catalog, CostEstimate::Pessimistic).decision;
}

PolicyDecision ncc_decide(const LearnerState& state, const ConfidenceConfig& cfg) {
  const PartialCatalog catalog(state.space());
  return ncc_decide(state, cfg, catalog);
}

PolicyDecision simoos_decide(const LearnerState& state, const ConfidenceConfig& cfg, const PartialCatalog& catalog) {
  return optimistic_decide(state, cfg, catalog, CostEstimate::Plain).decision;
}

NccUcrl2Policy::NccUcrl2Policy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count,
                               std::uint64_t horizon, std::size_t window, double delta)
    : NccUcrl2Policy(std::move(catalog), action_count, horizon, window, delta, CostEstimate::Pessimistic) {}

NccUcrl2Policy::NccUcrl2Policy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count,
                               std::uint64_t horizon, std::size_t window, double delta, CostEstimate costs)
    : catalog_(std::move(catalog)),
      state_(catalog_->space(), action_count, window),
      cfg_(ConfidenceConfig::for_space(catalog_->space(), action_count, horizon,
                                       window == kUnboundedWindow ? horizon : window, delta)),
      costs_(costs) {
  cfg_.validate();
}

PolicyDecision NccUcrl2Policy::decide(std::uint64_t /*t*/) {
  return optimistic_decide(state_, cfg_, *catalog_, costs_).decision;
}

SimOosPolicy::SimOosPolicy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count,
                           std::uint64_t horizon, double delta)
    : NccUcrl2Policy(std::move(catalog), action_count, horizon, kUnboundedWindow, delta, CostEstimate::Plain) {}

}  // namespace ncc

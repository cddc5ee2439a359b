#include "ncc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ncc {

namespace {

void check_schedule(const std::vector<std::uint64_t>& starts, std::size_t segments, const char* what) {
  if (starts.empty() || starts.front() != 1) {
    throw std::invalid_argument(std::string(what) + " schedule must start at round 1");
  }
  for (std::size_t k = 1; k < starts.size(); ++k) {
    if (starts[k] <= starts[k - 1]) {
      throw std::invalid_argument(std::string(what) + " segment starts must be strictly increasing");
    }
  }
  if (segments != starts.size()) {
    throw std::invalid_argument(std::string(what) + " table count does not match the schedule");
  }
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace

std::size_t segment_at(const std::vector<std::uint64_t>& starts, std::uint64_t t) {
  if (starts.empty()) throw std::invalid_argument("empty segment schedule");
  auto it = std::upper_bound(starts.begin(), starts.end(), t);
  if (it == starts.begin()) throw std::out_of_range("round " + std::to_string(t) + " precedes the first segment");
  return static_cast<std::size_t>(it - starts.begin()) - 1;
}

void TrueParameters::validate() const {
  if (action_count == 0) throw std::invalid_argument("action_count must be positive");
  if (state_probabilities.size() != space.state_count()) {
    throw std::invalid_argument("state_probabilities must cover every state vector");
  }
  double total = 0.0;
  for (double p : state_probabilities) {
    if (!(p >= 0.0)) throw std::invalid_argument("state probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("state probabilities must sum to 1");

  check_schedule(reward_starts, mean_rewards.size(), "reward");
  for (const auto& table : mean_rewards) {
    if (table.size() != action_count * space.state_count()) {
      throw std::invalid_argument("reward table must hold action_count * state_count entries");
    }
    for (double r : table) check_unit(r, "mean reward");
  }
  check_schedule(cost_starts, mean_costs.size(), "cost");
  for (const auto& costs : mean_costs) {
    if (costs.size() != space.feature_count()) throw std::invalid_argument("cost table must hold one mean per feature");
    for (double c : costs) check_unit(c, "mean cost");
  }
}

std::size_t TrueParameters::reward_segment(std::uint64_t t) const { return segment_at(reward_starts, t); }
std::size_t TrueParameters::cost_segment(std::uint64_t t) const { return segment_at(cost_starts, t); }

double TrueParameters::mean_reward(std::uint64_t t, std::size_t action, std::size_t state_index) const {
  return mean_rewards[reward_segment(t)].at(action * space.state_count() + state_index);
}

OracleTable::OracleTable(std::shared_ptr<const TrueParameters> truth, std::shared_ptr<const PartialCatalog> catalog)
    : truth_(std::move(truth)), catalog_(std::move(catalog)) {
  truth_->validate();
  if (!(truth_->space == catalog_->space())) throw std::invalid_argument("truth and catalog disagree on the space");
  const auto& space = truth_->space;
  const std::size_t psi = space.psi_total();
  const std::size_t states = space.state_count();
  const std::size_t actions = truth_->action_count;
  const auto& sets = catalog_->observation_sets();

  segments_.resize(truth_->mean_rewards.size());
  for (std::size_t seg = 0; seg < segments_.size(); ++seg) {
    auto& m = segments_[seg];
    m.probability.assign(psi, 0.0);
    m.weighted.assign(actions * psi, 0.0);
    const auto& table = truth_->mean_rewards[seg];
    for (std::size_t s = 0; s < states; ++s) {
      const double p = truth_->state_probabilities[s];
      if (p == 0.0) continue;
      for (auto obs : sets) {
        const std::size_t g = catalog_->restrict_state(s, obs);
        m.probability[g] += p;
        for (std::size_t a = 0; a < actions; ++a) m.weighted[a * psi + g] += p * table[a * states + s];
      }
    }
  }

  // Reward part of V(I) only depends on the reward segment, costs only on the cost segment.
  const std::size_t cost_segments = truth_->mean_costs.size();
  best_.resize(segments_.size() * cost_segments);
  for (std::size_t seg = 0; seg < segments_.size(); ++seg) {
    const auto& m = segments_[seg];
    std::vector<double> reward_part;
    std::vector<std::vector<std::size_t>> rules;
    reward_part.reserve(sets.size());
    rules.reserve(sets.size());
    for (auto obs : sets) {
      double v = 0.0;
      std::vector<std::size_t> rule;
      rule.reserve(catalog_->members(obs).size());
      for (auto g : catalog_->members(obs)) {
        std::size_t arg = 0;
        double top = m.weighted[g];
        for (std::size_t a = 1; a < actions; ++a) {
          if (m.weighted[a * psi + g] > top) {
            top = m.weighted[a * psi + g];
            arg = a;
          }
        }
        v += top;
        rule.push_back(arg);
      }
      reward_part.push_back(v);
      rules.push_back(std::move(rule));
    }
    for (std::size_t cs = 0; cs < cost_segments; ++cs) {
      const auto& costs = truth_->mean_costs[cs];
      std::size_t chosen = 0;
      double best_value = 0.0;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        double v = reward_part[k];
        for (auto i : sets[k].members()) v -= costs[i];
        if (k == 0 || v > best_value) {
          best_value = v;
          chosen = k;
        }
      }
      best_[seg * cost_segments + cs] = CacheEntry{PolicyDecision{sets[chosen], rules[chosen]}, best_value};
    }
  }
}

double OracleTable::marginal_probability(std::size_t reward_segment, std::size_t partial_index) const {
  return segments_.at(reward_segment).probability.at(partial_index);
}

double OracleTable::marginal_reward(std::size_t reward_segment, std::size_t action, std::size_t partial_index) const {
  const auto& m = segments_.at(reward_segment);
  const double p = m.probability.at(partial_index);
  if (p <= 0.0) return 0.0;
  return m.weighted.at(action * truth_->space.psi_total() + partial_index) / p;
}

std::pair<PolicyDecision, double> OracleTable::decide(std::uint64_t t) const {
  const auto& e = best_[truth_->reward_segment(t) * truth_->mean_costs.size() + truth_->cost_segment(t)];
  return {e.decision, e.gain};
}

std::vector<double> OracleTable::set_values(std::uint64_t t) const {
  const auto& m = segments_[truth_->reward_segment(t)];
  const auto& costs = truth_->mean_costs[truth_->cost_segment(t)];
  const std::size_t psi = truth_->space.psi_total();
  std::vector<double> out;
  for (auto obs : catalog_->observation_sets()) {
    double v = 0.0;
    for (auto g : catalog_->members(obs)) {
      double top = m.weighted[g];
      for (std::size_t a = 1; a < truth_->action_count; ++a) top = std::max(top, m.weighted[a * psi + g]);
      v += top;
    }
    for (auto i : obs.members()) v -= costs[i];
    out.push_back(v);
  }
  return out;
}

double OracleTable::expected_gain(std::uint64_t t, const PolicyDecision& decision) const {
  const auto& members = catalog_->members(decision.observation_set);
  if (decision.action_rule.size() != members.size()) {
    throw std::invalid_argument("action rule does not cover Psi+(" + decision.observation_set.to_string() + ")");
  }
  const auto& m = segments_[truth_->reward_segment(t)];
  const auto& costs = truth_->mean_costs[truth_->cost_segment(t)];
  const std::size_t psi = truth_->space.psi_total();
  double v = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const std::size_t a = decision.action_rule[k];
    if (a >= truth_->action_count) throw std::invalid_argument("action rule names an unknown action");
    v += m.weighted[a * psi + members[k]];
  }
  for (auto i : decision.observation_set.members()) v -= costs.at(i);
  return v;
}

std::pair<PolicyDecision, double> oracle_decide(const TrueParameters& truth, std::uint64_t t) {
  auto shared = std::make_shared<const TrueParameters>(truth);
  auto catalog = std::make_shared<const PartialCatalog>(truth.space);
  return OracleTable(shared, catalog).decide(t);
}

double expected_gain_of(const TrueParameters& truth, std::uint64_t t, const PolicyDecision& decision) {
  auto shared = std::make_shared<const TrueParameters>(truth);
  auto catalog = std::make_shared<const PartialCatalog>(truth.space);
  return OracleTable(shared, catalog).expected_gain(t, decision);
}

}  // namespace ncc

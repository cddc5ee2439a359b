#include "ncc/estimators.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace ncc {

double RoundRecord::total_cost() const {
  double total = 0.0;
  for (const auto& c : paid_costs) total += c.cost;
  return total;
}

void RoundRecord::validate(const FeatureSpace& space, std::size_t action_count) const {
  if (action >= action_count) throw std::invalid_argument("action " + std::to_string(action) + " out of range");
  space.require_valid(partial);
  if (domain_set(partial) != observation_set) {
    throw std::invalid_argument("partial vector domain does not match the observation set");
  }
  if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("reward outside [0,1]");
  const auto members = observation_set.members();
  if (members.size() != paid_costs.size()) {
    throw std::invalid_argument("paid costs must cover exactly the observation set");
  }
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (paid_costs[k].feature != members[k]) {
      throw std::invalid_argument("paid costs must cover exactly the observation set");
    }
    if (!(paid_costs[k].cost >= 0.0 && paid_costs[k].cost <= 1.0)) {
      throw std::invalid_argument("cost outside [0,1]");
    }
  }
}

LearnerState::LearnerState(FeatureSpace space, std::size_t action_count, std::size_t window_size)
    : space_(std::move(space)),
      action_count_(action_count),
      window_size_(window_size),
      reward_stats_(action_count * space_.psi_total()),
      cost_stats_(space_.feature_count()),
      history_set_(space_.observation_set_count(), 0),
      history_partial_(space_.psi_total(), 0) {
  if (action_count == 0) throw std::invalid_argument("action_count must be positive");
  if (window_size == 0) throw std::invalid_argument("window_size must be positive");
}

void LearnerState::apply_window(const RoundRecord& rec, int sign) {
  auto& rs = reward_stats_[rec.action * space_.psi_total() + space_.partial_index(rec.partial)];
  if (sign > 0) {
    rs.count += 1;
    rs.sum += rec.reward;
  } else {
    rs.count -= 1;
    rs.sum = rs.count == 0 ? 0.0 : rs.sum - rec.reward;
  }
  for (const auto& c : rec.paid_costs) {
    auto& cs = cost_stats_[c.feature];
    if (sign > 0) {
      cs.count += 1;
      cs.sum += c.cost;
    } else {
      cs.count -= 1;
      cs.sum = cs.count == 0 ? 0.0 : cs.sum - c.cost;
    }
  }
}

void LearnerState::record_round(const RoundRecord& rec) {
  if (any_recorded_ && rec.time <= last_time_) {
    throw std::invalid_argument("round time " + std::to_string(rec.time) + " is not after " +
                                std::to_string(last_time_));
  }
  rec.validate(space_, action_count_);

  // History counters: every substate of psi_t, i.e. every submask of I_t.
  const std::uint32_t full = rec.observation_set.mask();
  const std::size_t base = space_.partial_index(rec.partial);
  std::uint32_t sub = full;
  while (true) {
    std::size_t index = base;
    for (std::uint32_t dropped = full & ~sub; dropped != 0; dropped &= dropped - 1) {
      const auto f = static_cast<std::size_t>(std::countr_zero(dropped));
      index -= static_cast<std::size_t>(rec.partial[f] + 1) * space_.partial_digit_weight(f);
    }
    history_partial_[index] += 1;
    history_set_[sub] += 1;
    if (sub == 0) break;
    sub = (sub - 1) & full;
  }

  if (window_size_ != kUnboundedWindow && ring_.size() == window_size_) {
    apply_window(ring_.front(), -1);
    ring_.pop_front();
  }
  ring_.push_back(rec);
  apply_window(rec, +1);

  last_time_ = rec.time;
  any_recorded_ = true;
}

double LearnerState::empirical_reward(std::size_t action, const PartialStateVector& psi) const {
  const auto& s = reward_stats(action, space_.partial_index(psi));
  return s.sum / static_cast<double>(std::max<std::size_t>(1, s.count));
}

double LearnerState::empirical_cost(std::size_t feature) const {
  const auto& s = cost_stats_.at(feature);
  return s.sum / static_cast<double>(std::max<std::size_t>(1, s.count));
}

double LearnerState::estimate_probability_at(std::size_t partial_index, ObservationSet domain) const {
  const auto num = std::max<std::size_t>(1, history_partial_[partial_index]);
  const auto den = std::max<std::size_t>(1, history_set_[domain.mask()]);
  return static_cast<double>(num) / static_cast<double>(den);
}

double LearnerState::estimate_probability(const PartialStateVector& psi) const {
  return estimate_probability_at(space_.partial_index(psi), domain_set(psi));
}

std::size_t LearnerState::window_count_reward(std::size_t action, const PartialStateVector& psi) const {
  return std::max<std::size_t>(1, reward_stats(action, space_.partial_index(psi)).count);
}

std::size_t LearnerState::window_count_cost(std::size_t feature) const {
  return std::max<std::size_t>(1, cost_stats_.at(feature).count);
}

std::size_t LearnerState::history_count(ObservationSet obs) const {
  return std::max<std::size_t>(1, history_set_.at(obs.mask()));
}

}  // namespace ncc

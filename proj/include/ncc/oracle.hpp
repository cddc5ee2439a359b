#pragma once

// Ground-truth parameters and the clairvoyant per-round optimal policy.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "ncc/feature_space.hpp"
#include "ncc/policies.hpp"

namespace ncc {

/// Piece-wise stationary truth. Reward and cost schedules change
/// independently; segment k of a schedule covers rounds [starts[k], starts[k+1]).
struct TrueParameters {
  FeatureSpace space;
  std::size_t action_count = 0;
  /// p(phi), indexed by FeatureSpace::state_index.
  std::vector<double> state_probabilities;
  std::vector<std::uint64_t> reward_starts;
  /// [segment][action * state_count + state_index]
  std::vector<std::vector<double>> mean_rewards;
  std::vector<std::uint64_t> cost_starts;
  /// [segment][feature]
  std::vector<std::vector<double>> mean_costs;

  /// Throws std::invalid_argument on any broken invariant.
  void validate() const;
  std::size_t reward_segment(std::uint64_t t) const;
  std::size_t cost_segment(std::uint64_t t) const;
  double mean_reward(std::uint64_t t, std::size_t action, std::size_t state_index) const;
};

/// Index of the last start <= t (right-continuous lookup). starts[0] must be 1.
std::size_t segment_at(const std::vector<std::uint64_t>& starts, std::uint64_t t);

/// Marginals per reward segment, cached so that per-round oracle queries are
/// linear in |Psi+(I)|.
class OracleTable {
 public:
  OracleTable(std::shared_ptr<const TrueParameters> truth, std::shared_ptr<const PartialCatalog> catalog);

  const TrueParameters& truth() const { return *truth_; }

  /// p(psi) by global partial index.
  double marginal_probability(std::size_t reward_segment, std::size_t partial_index) const;
  /// r_bar(a, psi) = E[r_bar(a, Phi) | Phi ~ psi]; zero when p(psi) = 0.
  double marginal_reward(std::size_t reward_segment, std::size_t action, std::size_t partial_index) const;

  /// Optimal decision at round t and its expected gain rho*_t.
  std::pair<PolicyDecision, double> decide(std::uint64_t t) const;
  /// V_t(I) for every observation set, in catalog order.
  std::vector<double> set_values(std::uint64_t t) const;
  /// Expected gain of an arbitrary decision at round t.
  double expected_gain(std::uint64_t t, const PolicyDecision& decision) const;

 private:
  struct SegmentMarginals {
    std::vector<double> probability;  // [partial]
    std::vector<double> weighted;     // [action * psi_total + partial] = p(psi) r_bar(a, psi)
  };
  struct CacheEntry {
    PolicyDecision decision;
    double gain = 0.0;
  };

  std::shared_ptr<const TrueParameters> truth_;
  std::shared_ptr<const PartialCatalog> catalog_;
  std::vector<SegmentMarginals> segments_;
  // best decision per (reward segment, cost segment)
  std::vector<CacheEntry> best_;
};

std::pair<PolicyDecision, double> oracle_decide(const TrueParameters& truth, std::uint64_t t);
double expected_gain_of(const TrueParameters& truth, std::uint64_t t, const PolicyDecision& decision);

/// Oracle as a policy; used to anchor regret curves.
class OraclePolicy : public Policy {
 public:
  explicit OraclePolicy(std::shared_ptr<const OracleTable> table) : table_(std::move(table)) {}
  std::string_view name() const override { return "oracle"; }
  PolicyDecision decide(std::uint64_t t) override { return table_->decide(t).first; }
  void update(const RoundRecord&) override {}

 private:
  std::shared_ptr<const OracleTable> table_;
};

}  // namespace ncc

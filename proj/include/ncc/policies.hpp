#pragma once

// Policy decisions and the optimistic observation-set policy.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ncc/estimators.hpp"
#include "ncc/feature_space.hpp"
#include "ncc/optimism.hpp"

namespace ncc {

/// An observation set plus one action per psi in Psi+(observation_set).
struct PolicyDecision {
  ObservationSet observation_set;
  /// Indexed by FeatureSpace::local_index, i.e. canonical order of Psi+(I).
  std::vector<std::size_t> action_rule;

  std::size_t action_for(const FeatureSpace& space, const PartialStateVector& psi) const;

  static PolicyDecision constant(std::size_t action) { return PolicyDecision{ObservationSet{}, {action}}; }
  friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual PolicyDecision decide(std::uint64_t t) = 0;
  virtual void update(const RoundRecord& record) = 0;
};

enum class CostEstimate {
  /// Lower confidence bound: empirical mean minus its radius.
  Pessimistic,
  /// Plain empirical mean.
  Plain,
};

struct OptimisticDecideResult {
  PolicyDecision decision;
  /// V_hat(I) for every observation set, in catalog order.
  std::vector<double> values;
};

/// Evaluates V_hat(I) for every I and picks the maximizer. Ties prefer the
/// smaller set, then canonical order; action ties prefer the lower index.
OptimisticDecideResult optimistic_decide(const LearnerState& state, const ConfidenceConfig& cfg,
                                         const PartialCatalog& catalog, CostEstimate costs);

PolicyDecision ncc_decide(const LearnerState& state, const ConfidenceConfig& cfg, const PartialCatalog& catalog);
PolicyDecision ncc_decide(const LearnerState& state, const ConfidenceConfig& cfg);

/// Same search with full-history statistics and plain cost means.
PolicyDecision simoos_decide(const LearnerState& state, const ConfidenceConfig& cfg, const PartialCatalog& catalog);

class NccUcrl2Policy : public Policy {
 public:
  NccUcrl2Policy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count, std::uint64_t horizon,
                 std::size_t window, double delta);

  std::string_view name() const override { return "ncc-ucrl2"; }
  PolicyDecision decide(std::uint64_t t) override;
  void update(const RoundRecord& record) override { state_.record_round(record); }

  const LearnerState& state() const { return state_; }
  const ConfidenceConfig& confidence() const { return cfg_; }

 protected:
  NccUcrl2Policy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count, std::uint64_t horizon,
                 std::size_t window, double delta, CostEstimate costs);

 private:
  std::shared_ptr<const PartialCatalog> catalog_;
  LearnerState state_;
  ConfidenceConfig cfg_;
  CostEstimate costs_;
};

/// The stationary, fixed-cost predecessor: no window and no cost pessimism.
class SimOosPolicy : public NccUcrl2Policy {
 public:
  SimOosPolicy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count, std::uint64_t horizon,
               double delta);
  std::string_view name() const override { return "sim-oos"; }
};

}  // namespace ncc

#pragma once

// Benchmark policies: context-agnostic UCB1, epsilon-greedy and uniform play,
// and the disjoint LinUCB family that always observes every feature.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "ncc/feature_space.hpp"
#include "ncc/policies.hpp"

namespace ncc {

/// argmax_a mean_a + alpha sqrt(2 ln t / n_a); unplayed arms first, lowest index.
std::size_t ucb1_decide(std::span<const std::size_t> counts, std::span<const double> means, std::uint64_t t,
                        double alpha);
/// With probability epsilon a uniform arm, else the greedy arm (lowest index on ties).
std::size_t eps_greedy_decide(std::span<const double> means, std::mt19937_64& rng, double epsilon);
std::size_t random_decide(std::size_t action_count, std::mt19937_64& rng);

/// One-hot encoding of a full state vector plus an intercept at position 0.
class OneHotEncoder {
 public:
  explicit OneHotEncoder(const FeatureSpace& space);
  /// sum |X_i| + 1
  std::size_t dimension() const { return dimension_; }
  /// Positions of the non-zero (all equal to 1) coordinates, ascending.
  std::vector<std::size_t> encode(const StateVector& phi) const;
  std::vector<std::size_t> encode(const PartialStateVector& full_psi) const;

 private:
  std::vector<std::size_t> offsets_;
  std::size_t dimension_ = 1;
};

/// Disjoint per-arm ridge regression with identity prior, maintained through
/// Sherman-Morrison updates of A^{-1}.
class LinUcb {
 public:
  LinUcb(std::size_t action_count, std::size_t dimension, double alpha);

  std::size_t action_count() const { return arms_.size(); }
  std::size_t dimension() const { return dimension_; }
  double alpha() const { return alpha_; }

  /// x' theta_a for a binary context given by its active coordinates.
  double predict(std::size_t action, std::span<const std::size_t> active) const;
  double score(std::size_t action, std::span<const std::size_t> active) const;
  std::size_t decide(std::span<const std::size_t> active) const;
  void update(std::size_t action, std::span<const std::size_t> active, double reward);
  void reset();

  const Eigen::MatrixXd& inverse(std::size_t action) const { return arms_.at(action).a_inv; }
  const Eigen::VectorXd& theta(std::size_t action) const { return arms_.at(action).theta; }

 private:
  struct Arm {
    Eigen::MatrixXd a_inv;
    Eigen::VectorXd b;
    Eigen::VectorXd theta;
  };
  std::size_t dimension_;
  double alpha_;
  std::vector<Arm> arms_;
};

/// LinUCB with a two-window residual change detector: when the mean absolute
/// residual of the newest omega rounds exceeds that of the previous omega
/// rounds by more than the threshold, every arm model is reset.
class PsLinUcb {
 public:
  PsLinUcb(std::size_t action_count, std::size_t dimension, double alpha, std::size_t omega, double threshold);

  const LinUcb& model() const { return model_; }
  std::size_t decide(std::span<const std::size_t> active) const { return model_.decide(active); }
  /// Returns true when this update triggered a reset.
  bool update(std::size_t action, std::span<const std::size_t> active, double reward);
  std::size_t reset_count() const { return resets_; }
  std::size_t residual_count() const { return residuals_.size(); }

 private:
  LinUcb model_;
  std::size_t omega_;
  double threshold_;
  std::deque<double> residuals_;
  std::size_t resets_ = 0;
};

// ---- Policy adapters -------------------------------------------------------

class Ucb1Policy : public Policy {
 public:
  Ucb1Policy(std::size_t action_count, double alpha);
  std::string_view name() const override { return "ucb1"; }
  PolicyDecision decide(std::uint64_t t) override;
  void update(const RoundRecord& record) override;

 private:
  std::vector<std::size_t> counts_;
  std::vector<double> means_;
  double alpha_;
};

class EpsGreedyPolicy : public Policy {
 public:
  EpsGreedyPolicy(std::size_t action_count, double epsilon, std::uint64_t seed);
  std::string_view name() const override { return "eps-greedy"; }
  PolicyDecision decide(std::uint64_t t) override;
  void update(const RoundRecord& record) override;

 private:
  std::vector<std::size_t> counts_;
  std::vector<double> means_;
  double epsilon_;
  std::mt19937_64 rng_;
};

class RandomPolicy : public Policy {
 public:
  RandomPolicy(std::size_t action_count, std::uint64_t seed);
  std::string_view name() const override { return "random"; }
  PolicyDecision decide(std::uint64_t t) override;
  void update(const RoundRecord&) override {}

 private:
  std::size_t action_count_;
  std::mt19937_64 rng_;
};

/// Observes the full state vector every round; the decision carries an action
/// for every member of Psi+(D).
class LinUcbPolicy : public Policy {
 public:
  LinUcbPolicy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count, double alpha);
  std::string_view name() const override { return "linucb"; }
  PolicyDecision decide(std::uint64_t t) override;
  void update(const RoundRecord& record) override;
  const LinUcb& model() const { return model_; }

 private:
  std::shared_ptr<const PartialCatalog> catalog_;
  OneHotEncoder encoder_;
  std::vector<std::vector<std::size_t>> contexts_;
  LinUcb model_;
};

class PsLinUcbPolicy : public Policy {
 public:
  PsLinUcbPolicy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count, double alpha,
                 std::size_t omega, double threshold);
  std::string_view name() const override { return "ps-linucb"; }
  PolicyDecision decide(std::uint64_t t) override;
  void update(const RoundRecord& record) override;
  const PsLinUcb& detector() const { return model_; }

 private:
  std::shared_ptr<const PartialCatalog> catalog_;
  OneHotEncoder encoder_;
  std::vector<std::vector<std::size_t>> contexts_;
  PsLinUcb model_;
};

}  // namespace ncc

#include "ncc/baselines.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ncc {

std::size_t ucb1_decide(std::span<const std::size_t> counts, std::span<const double> means, std::uint64_t t,
                        double alpha) {
  if (counts.empty() || counts.size() != means.size()) throw std::invalid_argument("ucb1: mismatched arm tables");
  if (t == 0) throw std::invalid_argument("ucb1: rounds start at 1");
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (counts[a] == 0) return a;
  }
  const double log_t = std::log(static_cast<double>(t));
  std::size_t arg = 0;
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < counts.size(); ++a) {
    const double index = means[a] + alpha * std::sqrt(2.0 * log_t / static_cast<double>(counts[a]));
    if (index > top) {
      top = index;
      arg = a;
    }
  }
  return arg;
}

std::size_t eps_greedy_decide(std::span<const double> means, std::mt19937_64& rng, double epsilon) {
  if (means.empty()) throw std::invalid_argument("eps-greedy: no arms");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("eps-greedy: epsilon must lie in [0,1]");
  // Always consume one uniform so the stream position does not depend on epsilon.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < epsilon) return random_decide(means.size(), rng);
  std::size_t arg = 0;
  for (std::size_t a = 1; a < means.size(); ++a) {
    if (means[a] > means[arg]) arg = a;
  }
  return arg;
}

std::size_t random_decide(std::size_t action_count, std::mt19937_64& rng) {
  if (action_count == 0) throw std::invalid_argument("random: no arms");
  return std::uniform_int_distribution<std::size_t>(0, action_count - 1)(rng);
}

OneHotEncoder::OneHotEncoder(const FeatureSpace& space) {
  offsets_.reserve(space.feature_count());
  for (std::size_t i = 0; i < space.feature_count(); ++i) {
    offsets_.push_back(dimension_);
    dimension_ += static_cast<std::size_t>(space.alphabet_size(i));
  }
}

std::vector<std::size_t> OneHotEncoder::encode(const StateVector& phi) const {
  if (phi.size() != offsets_.size()) throw std::invalid_argument("one-hot: wrong feature count");
  std::vector<std::size_t> active{0};
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    if (phi[i] < 0) throw std::invalid_argument("one-hot: state vector has a missing entry");
    active.push_back(offsets_[i] + static_cast<std::size_t>(phi[i]));
  }
  return active;
}

std::vector<std::size_t> OneHotEncoder::encode(const PartialStateVector& full_psi) const {
  return encode(StateVector{full_psi.entries});
}

LinUcb::LinUcb(std::size_t action_count, std::size_t dimension, double alpha)
    : dimension_(dimension), alpha_(alpha), arms_(action_count) {
  if (action_count == 0 || dimension == 0) throw std::invalid_argument("linucb: empty model");
  reset();
}

void LinUcb::reset() {
  for (auto& arm : arms_) {
    arm.a_inv = Eigen::MatrixXd::Identity(dimension_, dimension_);
    arm.b = Eigen::VectorXd::Zero(dimension_);
    arm.theta = Eigen::VectorXd::Zero(dimension_);
  }
}

double LinUcb::predict(std::size_t action, std::span<const std::size_t> active) const {
  const auto& theta = arms_.at(action).theta;
  double s = 0.0;
  for (auto j : active) s += theta[static_cast<Eigen::Index>(j)];
  return s;
}

double LinUcb::score(std::size_t action, std::span<const std::size_t> active) const {
  const auto& m = arms_.at(action).a_inv;
  double quad = 0.0;
  for (auto j : active) {
    for (auto k : active) quad += m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }
  return predict(action, active) + alpha_ * std::sqrt(std::max(0.0, quad));
}

std::size_t LinUcb::decide(std::span<const std::size_t> active) const {
  std::size_t arg = 0;
  double top = score(0, active);
  for (std::size_t a = 1; a < arms_.size(); ++a) {
    const double s = score(a, active);
    if (s > top) {
      top = s;
      arg = a;
    }
  }
  return arg;
}

void LinUcb::update(std::size_t action, std::span<const std::size_t> active, double reward) {
  auto& arm = arms_.at(action);
  Eigen::VectorXd ax = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension_));
  for (auto j : active) ax += arm.a_inv.col(static_cast<Eigen::Index>(j));
  double quad = 0.0;
  for (auto j : active) quad += ax[static_cast<Eigen::Index>(j)];
  arm.a_inv.noalias() -= (ax * ax.transpose()) / (1.0 + quad);
  for (auto j : active) arm.b[static_cast<Eigen::Index>(j)] += reward;
  arm.theta.noalias() = arm.a_inv * arm.b;
}

PsLinUcb::PsLinUcb(std::size_t action_count, std::size_t dimension, double alpha, std::size_t omega,
                   double threshold)
    : model_(action_count, dimension, alpha), omega_(omega), threshold_(threshold) {
  if (omega == 0) throw std::invalid_argument("ps-linucb: omega must be at least 1");
}

bool PsLinUcb::update(std::size_t action, std::span<const std::size_t> active, double reward) {
  residuals_.push_back(std::abs(reward - model_.predict(action, active)));
  if (residuals_.size() > 2 * omega_) residuals_.pop_front();
  model_.update(action, active, reward);
  if (residuals_.size() < 2 * omega_) return false;

  const auto mid = residuals_.begin() + static_cast<std::ptrdiff_t>(omega_);
  const double older = std::accumulate(residuals_.begin(), mid, 0.0) / static_cast<double>(omega_);
  const double newer = std::accumulate(mid, residuals_.end(), 0.0) / static_cast<double>(omega_);
  if (newer - older > threshold_) {
    model_.reset();
    residuals_.clear();
    ++resets_;
    return true;
  }
  return false;
}

namespace {

void running_mean(std::vector<std::size_t>& counts, std::vector<double>& means, const RoundRecord& r) {
  if (r.action >= counts.size()) throw std::invalid_argument("record names an unknown action");
  const double n = static_cast<double>(++counts[r.action]);
  means[r.action] += (r.reward - means[r.action]) / n;
}

std::vector<std::vector<std::size_t>> full_contexts(const PartialCatalog& catalog, const OneHotEncoder& enc) {
  std::vector<std::vector<std::size_t>> out;
  const auto full = catalog.space().all_features();
  for (auto g : catalog.members(full)) out.push_back(enc.encode(catalog.space().partial_at(g)));
  return out;
}

}  // namespace

Ucb1Policy::Ucb1Policy(std::size_t action_count, double alpha)
    : counts_(action_count, 0), means_(action_count, 0.0), alpha_(alpha) {
  if (action_count == 0) throw std::invalid_argument("ucb1: no arms");
}

PolicyDecision Ucb1Policy::decide(std::uint64_t t) {
  return PolicyDecision::constant(ucb1_decide(counts_, means_, t, alpha_));
}

void Ucb1Policy::update(const RoundRecord& record) { running_mean(counts_, means_, record); }

EpsGreedyPolicy::EpsGreedyPolicy(std::size_t action_count, double epsilon, std::uint64_t seed)
    : counts_(action_count, 0), means_(action_count, 0.0), epsilon_(epsilon), rng_(seed) {
  if (action_count == 0) throw std::invalid_argument("eps-greedy: no arms");
}

PolicyDecision EpsGreedyPolicy::decide(std::uint64_t) {
  return PolicyDecision::constant(eps_greedy_decide(means_, rng_, epsilon_));
}

void EpsGreedyPolicy::update(const RoundRecord& record) { running_mean(counts_, means_, record); }

RandomPolicy::RandomPolicy(std::size_t action_count, std::uint64_t seed) : action_count_(action_count), rng_(seed) {
  if (action_count == 0) throw std::invalid_argument("random: no arms");
}

PolicyDecision RandomPolicy::decide(std::uint64_t) {
  return PolicyDecision::constant(random_decide(action_count_, rng_));
}

LinUcbPolicy::LinUcbPolicy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count, double alpha)
    : catalog_(std::move(catalog)),
      encoder_(catalog_->space()),
      contexts_(full_contexts(*catalog_, encoder_)),
      model_(action_count, encoder_.dimension(), alpha) {}

PolicyDecision LinUcbPolicy::decide(std::uint64_t) {
  PolicyDecision d{catalog_->space().all_features(), {}};
  d.action_rule.reserve(contexts_.size());
  for (const auto& x : contexts_) d.action_rule.push_back(model_.decide(x));
  return d;
}

void LinUcbPolicy::update(const RoundRecord& record) {
  model_.update(record.action, encoder_.encode(record.partial), record.reward);
}

PsLinUcbPolicy::PsLinUcbPolicy(std::shared_ptr<const PartialCatalog> catalog, std::size_t action_count, double alpha,
                               std::size_t omega, double threshold)
    : catalog_(std::move(catalog)),
      encoder_(catalog_->space()),
      contexts_(full_contexts(*catalog_, encoder_)),
      model_(action_count, encoder_.dimension(), alpha, omega, threshold) {}

PolicyDecision PsLinUcbPolicy::decide(std::uint64_t) {
  PolicyDecision d{catalog_->space().all_features(), {}};
  d.action_rule.reserve(contexts_.size());
  for (const auto& x : contexts_) d.action_rule.push_back(model_.decide(x));
  return d;
}

void PsLinUcbPolicy::update(const RoundRecord& record) {
  model_.update(record.action, encoder_.encode(record.partial), record.reward);
}

}  // namespace ncc

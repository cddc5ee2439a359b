#include "ncc/metrics.hpp"

#include <bit>
#include <stdexcept>

namespace ncc {

std::span<const RoundRow> RunResult::series(std::size_t run, std::size_t policy) const {
  if (run >= runs || policy >= policies.size()) throw std::out_of_range("no such run/policy series");
  const std::size_t len = static_cast<std::size_t>(horizon);
  const std::size_t offset = (run * policies.size() + policy) * len;
  if (offset + len > rounds.size()) throw std::out_of_range("result holds fewer rounds than expected");
  return std::span<const RoundRow>(rounds).subspan(offset, len);
}

const SummaryRow& RunResult::summary(std::size_t run, std::size_t policy) const {
  if (run >= runs || policy >= policies.size()) throw std::out_of_range("no such run/policy summary");
  return summaries.at(run * policies.size() + policy);
}

std::size_t RunResult::policy_index(const std::string& label) const {
  for (std::size_t k = 0; k < policies.size(); ++k) {
    if (policies[k] == label) return k;
  }
  throw std::out_of_range("policy '" + label + "' is not part of this result");
}

namespace {

template <typename Field>
double mean_over_runs(const RunResult& r, std::size_t policy, Field field) {
  if (r.runs == 0) return 0.0;
  double total = 0.0;
  for (std::size_t run = 0; run < r.runs; ++run) total += field(r.summary(run, policy));
  return total / static_cast<double>(r.runs);
}

}  // namespace

double RunResult::mean_total_gain(std::size_t policy) const {
  return mean_over_runs(*this, policy, [](const SummaryRow& s) { return s.total_gain; });
}
double RunResult::mean_total_reward(std::size_t policy) const {
  return mean_over_runs(*this, policy, [](const SummaryRow& s) { return s.total_reward; });
}
double RunResult::mean_total_cost(std::size_t policy) const {
  return mean_over_runs(*this, policy, [](const SummaryRow& s) { return s.total_cost; });
}
double RunResult::mean_final_regret(std::size_t policy) const {
  return mean_over_runs(*this, policy, [](const SummaryRow& s) { return s.final_cumulative_regret; });
}

std::optional<double> accuracy_by_observations(std::span<const ObservationOutcome> outcomes, std::size_t k) {
  double hits = 0.0;
  std::size_t rounds = 0;
  for (const auto& o : outcomes) {
    if (o.observed_count <= k) {
      hits += o.reward;
      ++rounds;
    }
  }
  if (rounds == 0) return std::nullopt;
  return hits / static_cast<double>(rounds);
}

std::vector<std::optional<double>> accuracy_curve(std::span<const RoundRow> rows, std::size_t feature_count) {
  // Bucket once, then take prefix sums over k.
  std::vector<double> hits(feature_count + 1, 0.0);
  std::vector<std::size_t> counts(feature_count + 1, 0);
  for (const auto& r : rows) {
    const auto j = static_cast<std::size_t>(std::popcount(r.obs_set));
    if (j > feature_count) throw std::invalid_argument("observation set larger than the feature count");
    hits[j] += r.reward;
    counts[j] += 1;
  }
  std::vector<std::optional<double>> out;
  double h = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k <= feature_count; ++k) {
    h += hits[k];
    n += counts[k];
    out.push_back(n == 0 ? std::nullopt : std::optional<double>(h / static_cast<double>(n)));
  }
  return out;
}

SummaryRow summarize(std::span<const RoundRow> rows, std::size_t run, std::size_t policy, std::size_t feature_count) {
  SummaryRow s;
  s.run = run;
  s.policy = policy;
  for (const auto& r : rows) {
    s.total_reward += r.reward;
    s.total_cost += r.cost_paid;
    s.total_gain += r.gain;
  }
  s.final_cumulative_regret = rows.empty() ? 0.0 : rows.back().cumulative_expected_regret;
  s.accuracy_at_k = accuracy_curve(rows, feature_count);
  return s;
}

}  // namespace ncc

#include "brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "ncc/errors.hpp"

namespace ncc::testing {

double brute_force_optimistic_gain(std::span<const double> center, std::span<const double> rewards, double radius,
                                   double cost_total, double grid_step) {
  const std::size_t n = center.size();
  if (n == 0 || rewards.size() != n) throw std::invalid_argument("brute force needs matching, non-empty inputs");
  if (n > 4) throw CapacityError("brute force is limited to 4 states");
  if (!(grid_step > 0.0 && grid_step <= 0.1)) throw std::invalid_argument("grid_step must lie in (0, 0.1]");

  double total = 0.0;
  for (double c : center) total += c;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = total > 0.0 ? center[i] / total : 1.0 / static_cast<double>(n);
  if (n == 1) return rewards[0] - cost_total;

  // A single coordinate never moves by more than radius / 2.
  const double reach = radius / 2.0;
  std::vector<std::vector<double>> lattice(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto steps = static_cast<long>(std::floor(reach / grid_step + 1e-9));
    for (long k = -steps; k <= steps; ++k) {
      const double v = p[i] + static_cast<double>(k) * grid_step;
      if (v >= 0.0 && v <= 1.0) lattice[i].push_back(v);
    }
    if (p[i] <= reach && p[i] > 0.0) lattice[i].push_back(0.0);
  }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> q(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<std::size_t> others;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != a && k != b) others.push_back(k);
      }
      std::function<void(std::size_t)> walk = [&](std::size_t depth) {
        if (depth < others.size()) {
          for (double v : lattice[others[depth]]) {
            q[others[depth]] = v;
            walk(depth + 1);
          }
          return;
        }
        double used = 0.0, spent = 0.0, partial = 0.0;
        for (auto k : others) {
          used += q[k];
          spent += std::abs(q[k] - p[k]);
          partial += q[k] * rewards[k];
        }
        const double s = 1.0 - used;
        if (s < -1e-12) return;
        const double rest = std::max(0.0, s);
        const double budget = radius - spent;
        const double x_a = p[a], x_b = rest - p[b];
        const double g_min = std::abs(rest - p[a] - p[b]);
        if (budget < g_min - 1e-12) return;
        const double ext = std::max(0.0, budget - g_min) / 2.0;
        const double lo = std::max(0.0, std::min(x_a, x_b) - ext);
        const double hi = std::min(rest, std::max(x_a, x_b) + ext);
        if (lo > hi + 1e-12) return;
        for (double x : {lo, std::max(lo, hi)}) {
          best = std::max(best, partial + x * rewards[a] + (rest - x) * rewards[b] - cost_total);
        }
      };
      walk(0);
    }
  }
  return best;
}

std::map<std::vector<StateIndex>, BruteMarginal> brute_marginals(const TrueParameters& truth, std::uint64_t t,
                                                                 ObservationSet obs) {
  std::map<std::vector<StateIndex>, BruteMarginal> out;
  for (std::size_t s = 0; s < truth.space.state_count(); ++s) {
    const auto phi = truth.space.state_at(s);
    const double p = truth.state_probabilities[s];
    auto& m = out[make_partial(phi, obs).entries];
    m.weighted.resize(truth.action_count, 0.0);
    m.probability += p;
    for (std::size_t a = 0; a < truth.action_count; ++a) m.weighted[a] += p * truth.mean_reward(t, a, s);
  }
  return out;
}

namespace {

double set_cost(const TrueParameters& truth, std::uint64_t t, ObservationSet obs) {
  double c = 0.0;
  for (auto i : obs.members()) c += truth.mean_costs[truth.cost_segment(t)][i];
  return c;
}

}  // namespace

double brute_set_value(const TrueParameters& truth, std::uint64_t t, ObservationSet obs) {
  double v = 0.0;
  for (const auto& [psi, m] : brute_marginals(truth, t, obs)) {
    v += *std::max_element(m.weighted.begin(), m.weighted.end());
  }
  return v - set_cost(truth, t, obs);
}

double brute_rho_star(const TrueParameters& truth, std::uint64_t t) {
  double best = -std::numeric_limits<double>::infinity();
  const std::uint32_t sets = 1u << truth.space.feature_count();
  for (std::uint32_t mask = 0; mask < sets; ++mask) {
    best = std::max(best, brute_set_value(truth, t, ObservationSet::from_mask(mask)));
  }
  return best;
}

double brute_expected_gain(const TrueParameters& truth, std::uint64_t t, const PolicyDecision& decision) {
  double v = 0.0;
  for (const auto& [entries, m] : brute_marginals(truth, t, decision.observation_set)) {
    v += m.weighted[decision.action_for(truth.space, PartialStateVector{entries})];
  }
  return v - set_cost(truth, t, decision.observation_set);
}

BruteWindow brute_window(std::span<const RoundRecord> records, std::size_t feature_count) {
  BruteWindow w;
  w.costs.resize(feature_count);
  for (const auto& r : records) {
    auto& s = w.rewards[{r.action, r.partial.entries}];
    ++s.count;
    s.sum += r.reward;
    for (const auto& c : r.paid_costs) {
      ++w.costs[c.feature].count;
      w.costs[c.feature].sum += c.cost;
    }
  }
  return w;
}

BruteHistory brute_history(std::span<const RoundRecord> records) {
  BruteHistory h;
  for (const auto& r : records) {
    const std::uint32_t full = r.observation_set.mask();
    // every submask of the observed set, including the empty one
    for (std::uint32_t sub = full;; sub = (sub - 1) & full) {
      ++h.sets[sub];
      auto entries = r.partial.entries;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (((sub >> i) & 1u) == 0) entries[i] = kMissing;
      }
      ++h.partials[entries];
      if (sub == 0) break;
    }
  }
  return h;
}

FeatureSpace random_space(std::mt19937_64& rng, std::size_t max_features, int max_alphabet) {
  std::uniform_int_distribution<std::size_t> d(1, max_features);
  std::uniform_int_distribution<int> x(1, max_alphabet);
  std::vector<int> sizes(d(rng));
  for (int& s : sizes) s = x(rng);
  return FeatureSpace(sizes);
}

StateVector random_state(const FeatureSpace& space, std::mt19937_64& rng) {
  StateVector phi;
  for (std::size_t i = 0; i < space.feature_count(); ++i) {
    std::uniform_int_distribution<int> x(0, space.alphabet_size(i) - 1);
    phi.states.push_back(static_cast<StateIndex>(x(rng)));
  }
  return phi;
}

ObservationSet random_subset(std::size_t feature_count, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> m(0, (1u << feature_count) - 1);
  return ObservationSet::from_mask(m(rng));
}

RoundRecord random_record(const FeatureSpace& space, std::size_t action_count, std::uint64_t t,
                          std::mt19937_64& rng) {
  RoundRecord r;
  r.time = t;
  r.action = std::uniform_int_distribution<std::size_t>(0, action_count - 1)(rng);
  r.observation_set = random_subset(space.feature_count(), rng);
  r.partial = make_partial(random_state(space, rng), r.observation_set);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pick = u(rng);
  r.reward = pick < 0.3 ? 0.0 : pick < 0.6 ? 1.0 : u(rng);
  for (auto i : r.observation_set.members()) r.paid_costs.push_back({i, u(rng)});
  return r;
}

TrueParameters random_truth(const FeatureSpace& space, std::size_t action_count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TrueParameters truth;
  truth.space = space;
  truth.action_count = action_count;
  truth.state_probabilities.resize(space.state_count());
  double total = 0.0;
  for (double& p : truth.state_probabilities) {
    p = u(rng) < 0.2 ? 0.0 : -std::log(1.0 - u(rng));
    total += p;
  }
  if (total == 0.0) {
    truth.state_probabilities[0] = 1.0;
    total = 1.0;
  }
  for (double& p : truth.state_probabilities) p /= total;
  truth.reward_starts = {1};
  truth.cost_starts = {1};
  std::vector<double> table(action_count * space.state_count());
  for (double& r : table) {
    const double pick = u(rng);
    r = pick < 0.1 ? 0.0 : pick < 0.2 ? 1.0 : u(rng);
  }
  truth.mean_rewards = {table};
  std::vector<double> costs(space.feature_count());
  for (double& c : costs) c = 0.3 * u(rng);
  truth.mean_costs = {costs};
  return truth;
}

}  // namespace ncc::testing

#include "ncc/environment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ncc/rng.hpp"

namespace ncc {

namespace {

void check_starts(const std::vector<std::uint64_t>& starts, const char* what) {
  if (starts.empty() || starts.front() != 1) {
    throw std::invalid_argument(std::string(what) + " schedule must start at round 1");
  }
  for (std::size_t k = 1; k < starts.size(); ++k) {
    if (starts[k] <= starts[k - 1]) {
      throw std::invalid_argument(std::string(what) + " segment starts must be strictly increasing");
    }
  }
}

std::vector<std::uint64_t> starts_from(const std::vector<std::uint64_t>& change_points, std::uint64_t horizon) {
  std::vector<std::uint64_t> starts{1};
  for (auto c : change_points) {
    if (c > 1 && c <= horizon) starts.push_back(c);
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  return starts;
}

// Synthetic presets: D = 2 binary features, uniform p(phi), A = 2.
//   stationary: feature 0 is cheap and names the best action, feature 1 is
//               costly noise, so observing {0} alone is optimal.
//   switching:  the best action is x0 xor x1, inverted in every other
//               segment; both features are cheap and needed.
constexpr double kSyntheticHigh = 0.6;
constexpr double kSyntheticLow = 0.0;
constexpr double kSwitchingHigh = 0.9;
constexpr double kSwitchingLow = 0.1;
const std::vector<double> kStationaryCosts{0.05, 0.25};
const std::vector<double> kSwitchingCosts{0.03, 0.05};

std::vector<double> synthetic_table(bool switching, std::size_t segment) {
  const FeatureSpace space({2, 2});
  std::vector<double> table(2 * space.state_count());
  for (std::size_t s = 0; s < space.state_count(); ++s) {
    const auto phi = space.state_at(s);
    const auto target = switching ? static_cast<std::size_t>(phi[0] ^ phi[1] ^ (segment % 2)) : phi[0];
    for (std::size_t a = 0; a < 2; ++a) {
      const bool hit = a == target;
      table[a * space.state_count() + s] =
          switching ? (hit ? kSwitchingHigh : kSwitchingLow) : (hit ? kSyntheticHigh : kSyntheticLow);
    }
  }
  return table;
}

template <typename T>
void mix(std::uint64_t& h, const T& value) {
  const auto* p = reinterpret_cast<const unsigned char*>(&value);
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    h ^= p[k];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

void EnvironmentConfig::validate() const {
  if (space.feature_count() == 0) throw std::invalid_argument("environment needs at least one feature");
  if (action_count == 0) throw std::invalid_argument("environment needs at least one action");
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  check_starts(reward_starts, "reward");
  check_starts(cost_starts, "cost");
  if (is_dataset()) {
    if (rows->empty()) throw std::invalid_argument("dataset pool is empty");
    if (label_shifts.size() != reward_starts.size()) {
      throw std::invalid_argument("need one label shift per reward segment");
    }
    for (const auto& r : *rows) {
      space.require_valid(r.states);
      if (r.label >= action_count) throw std::invalid_argument("dataset label outside the action range");
    }
  } else {
    if (state_probabilities.size() != space.state_count()) {
      throw std::invalid_argument("state_probabilities must cover every state vector");
    }
    double total = 0.0;
    for (double p : state_probabilities) {
      if (!(p >= 0.0)) throw std::invalid_argument("state probabilities must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("state probabilities must sum to 1");
    if (reward_tables.size() != reward_starts.size()) {
      throw std::invalid_argument("need one reward table per reward segment");
    }
    for (const auto& t : reward_tables) {
      if (t.size() != action_count * space.state_count()) throw std::invalid_argument("reward table has wrong size");
      for (double r : t) {
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("mean reward outside [0,1]");
      }
    }
  }
  if (cost_means.size() != cost_starts.size()) throw std::invalid_argument("need one cost vector per cost segment");
  for (const auto& c : cost_means) {
    if (c.size() != space.feature_count()) throw std::invalid_argument("cost vector must hold one mean per feature");
    for (double v : c) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("mean cost outside [0,1]");
    }
  }
  if (!(cost_sigma >= 0.0)) throw std::invalid_argument("cost_sigma must be non-negative");
}

std::size_t cycle_labels(std::size_t label, std::size_t shift, std::size_t action_count) {
  if (action_count == 0 || label >= action_count) throw std::invalid_argument("label outside the action range");
  return (label + shift) % action_count;
}

double truncated_normal(double mean, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) return mean;
  if (!(mean >= 0.0 && mean <= 1.0) || !(sigma > 0.0)) throw std::invalid_argument("bad truncated normal parameters");
  std::normal_distribution<double> normal(mean, sigma);
  while (true) {
    const double x = normal(rng);
    if (x >= 0.0 && x <= 1.0) return x;
  }
}

Environment::Environment(std::shared_ptr<const EnvironmentConfig> cfg, std::uint64_t seed, std::uint64_t run)
    : cfg_(std::move(cfg)) {
  cfg_->validate();
  const auto& c = *cfg_;
  if (c.is_dataset() && c.rows->size() < c.horizon) {
    throw std::out_of_range("dataset exhausted: horizon " + std::to_string(c.horizon) + " exceeds " +
                            std::to_string(c.rows->size()) + " rows");
  }

  auto state_rng = make_stream(seed, run, StreamPurpose::States);
  auto cost_rng = make_stream(seed, run, StreamPurpose::Costs);
  auto reward_rng = make_stream(seed, run, StreamPurpose::Rewards);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> order;
  std::discrete_distribution<std::size_t> states;
  if (c.is_dataset()) {
    order.resize(c.rows->size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    auto shuffle_rng = make_stream(seed, run, StreamPurpose::Shuffle);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
  } else {
    states = std::discrete_distribution<std::size_t>(c.state_probabilities.begin(), c.state_probabilities.end());
  }

  draws_.resize(static_cast<std::size_t>(c.horizon));
  for (std::uint64_t t = 1; t <= c.horizon; ++t) {
    auto& d = draws_[static_cast<std::size_t>(t - 1)];
    d.t = t;
    if (c.is_dataset()) {
      d.row = order[static_cast<std::size_t>(t - 1)];
      d.state_index = c.space.state_index((*c.rows)[d.row].states);
    } else {
      d.state_index = states(state_rng);
    }
    const auto& means = c.cost_means[segment_at(c.cost_starts, t)];
    d.costs.resize(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) d.costs[i] = truncated_normal(means[i], c.cost_sigma, cost_rng);
    d.reward_uniform = unit(reward_rng);
  }
}

const RoundDraw& Environment::sample_round(std::uint64_t t) const {
  if (t == 0 || t > draws_.size()) {
    throw std::out_of_range("round " + std::to_string(t) + " outside [1, " + std::to_string(draws_.size()) + "]");
  }
  return draws_[static_cast<std::size_t>(t - 1)];
}

double Environment::realize_reward(const RoundDraw& draw, std::size_t action) const {
  const auto& c = *cfg_;
  if (action >= c.action_count) throw std::invalid_argument("action out of range");
  const std::size_t seg = reward_segment(draw.t);
  if (c.is_dataset()) {
    const auto label = cycle_labels((*c.rows)[draw.row].label, c.label_shifts[seg], c.action_count);
    return action == label ? 1.0 : 0.0;
  }
  const double mean = c.reward_tables[seg][action * c.space.state_count() + draw.state_index];
  return draw.reward_uniform < mean ? 1.0 : 0.0;
}

TrueParameters Environment::true_parameters() const {
  const auto& c = *cfg_;
  TrueParameters truth;
  truth.space = c.space;
  truth.action_count = c.action_count;
  truth.reward_starts = c.reward_starts;
  truth.cost_starts = c.cost_starts;
  truth.mean_costs = c.cost_means;
  if (!c.is_dataset()) {
    truth.state_probabilities = c.state_probabilities;
    truth.mean_rewards = c.reward_tables;
    return truth;
  }

  const std::size_t states = c.space.state_count();
  std::vector<std::size_t> count(states, 0);
  std::vector<std::size_t> label_count(states * c.action_count, 0);
  for (const auto& r : *c.rows) {
    const auto s = c.space.state_index(r.states);
    count[s] += 1;
    label_count[s * c.action_count + r.label] += 1;
  }
  truth.state_probabilities.resize(states);
  const double n = static_cast<double>(c.rows->size());
  for (std::size_t s = 0; s < states; ++s) truth.state_probabilities[s] = static_cast<double>(count[s]) / n;

  for (auto shift : c.label_shifts) {
    std::vector<double> table(c.action_count * states, 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      if (count[s] == 0) continue;
      for (std::size_t label = 0; label < c.action_count; ++label) {
        const auto a = cycle_labels(label, shift, c.action_count);
        table[a * states + s] =
            static_cast<double>(label_count[s * c.action_count + label]) / static_cast<double>(count[s]);
      }
    }
    truth.mean_rewards.push_back(std::move(table));
  }
  return truth;
}

std::uint64_t Environment::stream_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& d : draws_) {
    mix(h, d.t);
    mix(h, d.state_index);
    mix(h, d.row);
    mix(h, std::bit_cast<std::uint64_t>(d.reward_uniform));
    for (double x : d.costs) mix(h, std::bit_cast<std::uint64_t>(x));
  }
  return h;
}

bool preset_uses_dataset(const std::string& preset) { return preset == "nursery" || preset == "validation"; }

std::string effective_split(const EnvironmentSpec& spec) {
  if (!spec.split.empty()) return spec.split;
  return spec.preset == "validation" ? "validation" : "train";
}

std::vector<std::uint64_t> preset_reward_change_points(const std::string& preset) {
  if (preset == "nursery") return {1000, 2000, 5000, 8000};
  if (preset == "validation") return {1000, 2000};
  if (preset == "synthetic-switching") return {2500, 5000, 7500};
  if (preset == "synthetic-stationary") return {};
  throw std::invalid_argument("unknown preset '" + preset + "'");
}

std::vector<std::uint64_t> preset_cost_change_points(const std::string& preset) {
  if (preset == "nursery") return {3000, 5000, 7000, 9000};
  if (preset == "validation" || preset == "synthetic-switching" || preset == "synthetic-stationary") return {};
  throw std::invalid_argument("unknown preset '" + preset + "'");
}

std::optional<std::vector<double>> preset_cost_means(const std::string& preset) {
  if (preset == "synthetic-stationary") return kStationaryCosts;
  if (preset == "synthetic-switching") return kSwitchingCosts;
  return std::nullopt;
}

EnvironmentConfig build_environment(const EnvironmentSpec& spec, std::uint64_t horizon,
                                    std::shared_ptr<const std::vector<NurseryRecord>> pool, std::uint64_t seed,
                                    std::uint64_t run) {
  EnvironmentConfig c;
  c.horizon = horizon;
  c.cost_sigma = spec.cost_sigma;
  c.reward_starts =
      starts_from(spec.reward_change_points.value_or(preset_reward_change_points(spec.preset)), horizon);
  c.cost_starts = starts_from(spec.cost_change_points.value_or(preset_cost_change_points(spec.preset)), horizon);

  if (preset_uses_dataset(spec.preset)) {
    if (!pool) throw std::invalid_argument("preset '" + spec.preset + "' needs a dataset");
    c.space = nursery_space();
    c.action_count = kNurseryActions;
    c.rows = std::move(pool);
    for (std::size_t k = 0; k < c.reward_starts.size(); ++k) c.label_shifts.push_back(k % c.action_count);
  } else {
    c.space = FeatureSpace({2, 2});
    c.action_count = 2;
    c.state_probabilities.assign(c.space.state_count(), 1.0 / static_cast<double>(c.space.state_count()));
    const bool switching = spec.preset == "synthetic-switching";
    for (std::size_t k = 0; k < c.reward_starts.size(); ++k) c.reward_tables.push_back(synthetic_table(switching, k));
  }

  const auto fixed = spec.cost_means ? spec.cost_means : preset_cost_means(spec.preset);
  if (fixed) {
    if (fixed->size() != c.space.feature_count()) throw std::invalid_argument("cost_means needs one value per feature");
    c.cost_means.assign(c.cost_starts.size(), *fixed);
  } else {
    if (!(spec.cost_min >= 0.0 && spec.cost_min <= spec.cost_max && spec.cost_max <= 1.0)) {
      throw std::invalid_argument("cost range must satisfy 0 <= min <= max <= 1");
    }
    auto rng = make_stream(seed, run, StreamPurpose::CostMeans);
    std::uniform_real_distribution<double> draw(spec.cost_min, spec.cost_max);
    for (std::size_t k = 0; k < c.cost_starts.size(); ++k) {
      std::vector<double> means(c.space.feature_count());
      for (double& m : means) m = spec.cost_min == spec.cost_max ? spec.cost_min : draw(rng);
      c.cost_means.push_back(std::move(means));
    }
  }
  c.validate();
  return c;
}

}  // namespace ncc

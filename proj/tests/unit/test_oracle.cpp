#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "brute_force.hpp"
#include "ncc/oracle.hpp"

using namespace ncc;

namespace {

// D = 2 binary features, A = 2, reward 1 iff a == x0 xor x1.
TrueParameters xor_truth(std::vector<double> costs) {
  TrueParameters t;
  t.space = FeatureSpace({2, 2});
  t.action_count = 2;
  t.state_probabilities = {0.25, 0.25, 0.25, 0.25};
  t.reward_starts = {1};
  t.cost_starts = {1};
  std::vector<double> table(8);
  for (std::size_t s = 0; s < 4; ++s) {
    const auto phi = t.space.state_at(s);
    for (std::size_t a = 0; a < 2; ++a) table[a * 4 + s] = a == static_cast<std::size_t>(phi[0] ^ phi[1]) ? 1.0 : 0.0;
  }
  t.mean_rewards = {table};
  t.mean_costs = {costs};
  return t;
}

}  // namespace

TEST_CASE("segment lookup is right-continuous") {
  const std::vector<std::uint64_t> starts{1, 1000, 2000};
  CHECK(segment_at(starts, 1) == 0);
  CHECK(segment_at(starts, 999) == 0);
  CHECK(segment_at(starts, 1000) == 1);
  CHECK(segment_at(starts, 1999) == 1);
  CHECK(segment_at(starts, 2000) == 2);
  CHECK(segment_at(starts, 99999) == 2);
  CHECK_THROWS_AS(segment_at(starts, 0), std::out_of_range);
}

TEST_CASE("free features are all observed") {
  const auto truth = xor_truth({0.0, 0.0});
  const auto [d, rho] = oracle_decide(truth, 1);
  CHECK(d.observation_set == ObservationSet::of({0, 1}));
  CHECK(rho == doctest::Approx(1.0));
  CHECK(rho == doctest::Approx(testing::brute_rho_star(truth, 1)));
}

TEST_CASE("context-free rewards make every observation pure cost") {
  TrueParameters t = xor_truth({0.01, 0.02});
  std::vector<double> table(8);
  for (std::size_t s = 0; s < 4; ++s) {
    table[0 * 4 + s] = 0.3;
    table[1 * 4 + s] = 0.6;
  }
  t.mean_rewards = {table};
  const auto [d, rho] = oracle_decide(t, 1);
  CHECK(d.observation_set.empty());
  CHECK(d.action_rule == std::vector<std::size_t>{1});
  CHECK(rho == doctest::Approx(0.6));
}

TEST_CASE("one binary feature: observe iff cost is below the information value") {
  for (double p : {0.1, 0.3, 0.5, 0.8}) {
    for (double c : {0.0, 0.1, 0.25, 0.45, 0.6}) {
      TrueParameters t;
      t.space = FeatureSpace({2});
      t.action_count = 2;
      t.state_probabilities = {1.0 - p, p};
      t.reward_starts = {1};
      t.cost_starts = {1};
      t.mean_rewards = {{1.0, 0.0, 0.0, 1.0}};  // reward 1 iff a == phi
      t.mean_costs = {{c}};
      const auto [d, rho] = oracle_decide(t, 1);
      const double stay = std::max(p, 1.0 - p);
      if (c < 1.0 - stay) {
        CHECK(d.observation_set == ObservationSet::of({0}));
        CHECK(rho == doctest::Approx(1.0 - c));
      } else if (c > 1.0 - stay) {
        CHECK(d.observation_set.empty());
        CHECK(rho == doctest::Approx(stay));
      }
      CHECK(rho == doctest::Approx(testing::brute_rho_star(t, 1)));
    }
  }
}

TEST_CASE("expected gain of decisions") {
  const auto truth = xor_truth({0.1, 0.05});
  const auto [best, rho] = oracle_decide(truth, 1);
  CHECK(expected_gain_of(truth, 1, best) == doctest::Approx(rho));
  CHECK(expected_gain_of(truth, 1, PolicyDecision::constant(1)) == doctest::Approx(0.5));

  // flipping the action on a zero-probability vector changes nothing
  TrueParameters skew = truth;
  skew.state_probabilities = {0.5, 0.5, 0.0, 0.0};  // x0 == 0 always
  const auto [d, r] = oracle_decide(skew, 1);
  PolicyDecision flipped{ObservationSet::of({0, 1}), {0, 1, 0, 0}};
  PolicyDecision other = flipped;
  other.action_rule[3] = 1;
  CHECK(expected_gain_of(skew, 1, flipped) == doctest::Approx(expected_gain_of(skew, 1, other)));
  CHECK(expected_gain_of(skew, 1, d) == doctest::Approx(r));
  CHECK_THROWS_AS(expected_gain_of(truth, 1, PolicyDecision{ObservationSet::of({0}), {0}}), std::invalid_argument);
  CHECK_THROWS_AS(expected_gain_of(truth, 1, PolicyDecision::constant(2)), std::invalid_argument);
}

TEST_CASE("marginals agree with summation over full states") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto space = testing::random_space(rng, 3, 3);
    const std::size_t actions = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    auto truth = std::make_shared<TrueParameters>(testing::random_truth(space, actions, rng));
    auto catalog = std::make_shared<const PartialCatalog>(space);
    const OracleTable table(truth, catalog);
    for (auto obs : catalog->observation_sets()) {
      for (const auto& [entries, m] : testing::brute_marginals(*truth, 1, obs)) {
        const auto g = space.partial_index(PartialStateVector{entries});
        CHECK(table.marginal_probability(0, g) == doctest::Approx(m.probability));
        for (std::size_t a = 0; a < actions; ++a) {
          const double want = m.probability > 0.0 ? m.weighted[a] / m.probability : 0.0;
          CHECK(table.marginal_reward(0, a, g) == doctest::Approx(want));
        }
      }
    }
    const auto values = table.set_values(1);
    for (std::size_t k = 0; k < values.size(); ++k) {
      CHECK(values[k] == doctest::Approx(testing::brute_set_value(*truth, 1, catalog->observation_sets()[k])));
    }
    const auto [d, rho] = table.decide(1);
    CHECK(rho == doctest::Approx(testing::brute_rho_star(*truth, 1)));
    CHECK(testing::brute_expected_gain(*truth, 1, d) == doctest::Approx(rho));
  }
}

TEST_CASE("piece-wise truth switches with its schedules") {
  auto truth = std::make_shared<TrueParameters>(xor_truth({0.1, 0.1}));
  auto flipped = truth->mean_rewards[0];
  for (std::size_t s = 0; s < 4; ++s) std::swap(flipped[s], flipped[4 + s]);
  truth->reward_starts = {1, 50};
  truth->mean_rewards.push_back(flipped);
  truth->cost_starts = {1, 30};
  truth->mean_costs.push_back({0.6, 0.6});
  auto catalog = std::make_shared<const PartialCatalog>(truth->space);
  const OracleTable table(truth, catalog);

  const auto [d1, r1] = table.decide(10);
  CHECK(d1.observation_set == ObservationSet::of({0, 1}));
  CHECK(r1 == doctest::Approx(0.8));
  const auto [d2, r2] = table.decide(30);
  CHECK(d2.observation_set.empty());
  CHECK(r2 == doctest::Approx(0.5));
  const auto [d3, r3] = table.decide(60);
  CHECK(d3.observation_set.empty());
  CHECK(r3 == doctest::Approx(0.5));
  // with cheap costs the flipped table's rule is the inverse of the first
  truth->mean_costs[1] = {0.1, 0.1};
  const OracleTable cheap(truth, catalog);
  const auto [d4, r4] = cheap.decide(60);
  CHECK(d4.action_rule == std::vector<std::size_t>{1, 0, 0, 1});
  CHECK(d1.action_rule == std::vector<std::size_t>{0, 1, 1, 0});
}

TEST_CASE("truth validation") {
  auto t = xor_truth({0.1, 0.1});
  CHECK_NOTHROW(t.validate());
  t.state_probabilities[0] = 0.3;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = xor_truth({0.1, 0.1});
  t.reward_starts = {2};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = xor_truth({0.1, 1.2});
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t = xor_truth({0.1, 0.1});
  t.cost_starts = {1, 5, 5};
  t.mean_costs = {{0.1, 0.1}, {0.1, 0.1}, {0.1, 0.1}};
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("oracle policy replays the table") {
  auto truth = std::make_shared<const TrueParameters>(xor_truth({0.05, 0.05}));
  auto catalog = std::make_shared<const PartialCatalog>(truth->space);
  auto table = std::make_shared<const OracleTable>(truth, catalog);
  OraclePolicy policy(table);
  CHECK(policy.name() == "oracle");
  CHECK(policy.decide(3) == table->decide(3).first);
  CHECK(policy.decide(3).action_for(truth->space, PartialStateVector{{1, 0}}) == 1);
  CHECK(policy.decide(3).action_for(truth->space, PartialStateVector{{1, 1}}) == 0);
}

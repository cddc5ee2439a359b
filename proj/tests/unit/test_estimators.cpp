#include <doctest.h>

#include <random>
#include <vector>

#include "brute_force.hpp"
#include "ncc/estimators.hpp"

using namespace ncc;

namespace {

constexpr StateIndex M = kMissing;

RoundRecord make_record(std::uint64_t t, std::size_t a, std::vector<StateIndex> psi, double reward,
                        std::vector<FeatureCost> costs = {}) {
  RoundRecord r;
  r.time = t;
  r.action = a;
  r.partial = PartialStateVector{std::move(psi)};
  r.observation_set = domain_set(r.partial);
  r.reward = reward;
  r.paid_costs = std::move(costs);
  return r;
}

}  // namespace

TEST_CASE("history counters cover every substate") {
  LearnerState s(FeatureSpace({2, 2}), 2, 10);
  s.record_round(make_record(1, 0, {1, 0}, 1.0, {{0, 0.1}, {1, 0.2}}));
  for (std::uint32_t mask = 0; mask < 4; ++mask) CHECK(s.raw_history_count(ObservationSet::from_mask(mask)) == 1);
  const auto& space = s.space();
  CHECK(s.raw_history_count_partial(space.partial_index(PartialStateVector{{1, M}})) == 1);
  CHECK(s.raw_history_count_partial(space.partial_index(PartialStateVector{{M, 0}})) == 1);
  CHECK(s.raw_history_count_partial(space.partial_index(PartialStateVector{{0, M}})) == 0);
}

TEST_CASE("window of one keeps only the latest record") {
  LearnerState s(FeatureSpace({2}), 1, 1);
  s.record_round(make_record(1, 0, {1}, 1.0, {{0, 0.5}}));
  s.record_round(make_record(2, 0, {1}, 0.0, {{0, 0.25}}));
  const auto psi = PartialStateVector{{1}};
  CHECK(s.reward_stats(0, s.space().partial_index(psi)).count == 1);
  CHECK(s.empirical_reward(0, psi) == 0.0);
  CHECK(s.empirical_cost(0) == 0.25);
  CHECK(s.raw_history_count(ObservationSet::of({0})) == 2);
}

TEST_CASE("empty observations never touch cost statistics") {
  LearnerState s(FeatureSpace({3, 2}), 2, 5);
  for (std::uint64_t t = 1; t <= 3; ++t) s.record_round(make_record(t, 1, {M, M}, 0.5));
  CHECK(s.raw_history_count(ObservationSet{}) == 3);
  CHECK(s.cost_stats(0).count == 0);
  CHECK(s.cost_stats(1).count == 0);
  CHECK(s.empirical_cost(0) == 0.0);
}

TEST_CASE("empirical means") {
  LearnerState s(FeatureSpace({2, 2}), 2, 10);
  const PartialStateVector psi{{0, M}};
  CHECK(s.empirical_reward(0, psi) == 0.0);
  s.record_round(make_record(1, 0, {0, M}, 1.0, {{0, 0.03}}));
  s.record_round(make_record(2, 0, {0, M}, 0.0, {{0, 0.05}}));
  s.record_round(make_record(3, 0, {0, M}, 1.0, {{0, 0.08}}));
  CHECK(s.empirical_reward(0, psi) == doctest::Approx(2.0 / 3.0));
  CHECK(s.empirical_cost(0) == doctest::Approx((0.03 + 0.05 + 0.08) / 3.0));
  CHECK(s.empirical_cost(1) == 0.0);

  LearnerState one(FeatureSpace({2}), 1, 4);
  one.record_round(make_record(1, 0, {1}, 0.7, {{0, 0.08}}));
  CHECK(one.empirical_reward(0, PartialStateVector{{1}}) == doctest::Approx(0.7));
  CHECK(one.empirical_cost(0) == doctest::Approx(0.08));

  LearnerState two(FeatureSpace({2}), 1, 4);
  two.record_round(make_record(1, 0, {0}, 0.0, {{0, 0.03}}));
  two.record_round(make_record(2, 0, {1}, 0.0, {{0, 0.05}}));
  CHECK(two.empirical_cost(0) == doctest::Approx(0.04));
}

TEST_CASE("probability estimates use clamped counts") {
  LearnerState s(FeatureSpace({2, 2}), 1, 10);
  for (std::size_t g = 0; g < s.space().psi_total(); ++g) {
    CHECK(s.estimate_probability(s.space().partial_at(g)) == 1.0);
  }
  s.record_round(make_record(1, 0, {1, M}, 0.0, {{0, 0.1}}));
  CHECK(s.estimate_probability(PartialStateVector{{1, M}}) == 1.0);
  CHECK(s.estimate_probability(PartialStateVector{{0, M}}) == 1.0);

  LearnerState q(FeatureSpace({2}), 1, 10);
  q.record_round(make_record(1, 0, {1}, 0.0, {{0, 0.1}}));
  q.record_round(make_record(2, 0, {1}, 0.0, {{0, 0.1}}));
  q.record_round(make_record(3, 0, {0}, 0.0, {{0, 0.1}}));
  q.record_round(make_record(4, 0, {1}, 0.0, {{0, 0.1}}));
  CHECK(q.estimate_probability(PartialStateVector{{1}}) == doctest::Approx(0.75));
  CHECK(q.estimate_probability(PartialStateVector{{0}}) == doctest::Approx(0.25));
  CHECK(q.estimate_probability(PartialStateVector{{M}}) == 1.0);
}

TEST_CASE("count accessors clamp at one") {
  LearnerState s(FeatureSpace({2}), 1, 7);
  const PartialStateVector psi{{0}};
  CHECK(s.window_count_reward(0, psi) == 1);
  CHECK(s.window_count_cost(0) == 1);
  CHECK(s.history_count(ObservationSet::of({0})) == 1);
  for (std::uint64_t t = 1; t <= 7; ++t) s.record_round(make_record(t, 0, {0}, 1.0, {{0, 0.1}}));
  CHECK(s.window_count_reward(0, psi) == 7);
  for (std::uint64_t t = 8; t <= 12; ++t) s.record_round(make_record(t, 0, {0}, 1.0, {{0, 0.1}}));
  CHECK(s.window_count_reward(0, psi) == 7);
  CHECK(s.window_count_cost(0) == 7);
  CHECK(s.history_count(ObservationSet::of({0})) == 12);
}

TEST_CASE("record_round rejects bad input") {
  LearnerState s(FeatureSpace({2, 2}), 2, 3);
  s.record_round(make_record(5, 0, {M, M}, 0.0));
  CHECK_THROWS_AS(s.record_round(make_record(5, 0, {M, M}, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(s.record_round(make_record(4, 0, {M, M}, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(s.record_round(make_record(6, 2, {M, M}, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(s.record_round(make_record(6, 0, {M, M}, 1.5)), std::invalid_argument);
  CHECK_THROWS_AS(s.record_round(make_record(6, 0, {1, M}, 0.5)), std::invalid_argument);
  CHECK_THROWS_AS(s.record_round(make_record(6, 0, {1, M}, 0.5, {{1, 0.1}})), std::invalid_argument);
  CHECK_THROWS_AS(LearnerState(FeatureSpace({2}), 1, 0), std::invalid_argument);
}

TEST_CASE("incremental statistics match a rebuild from the window") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto space = testing::random_space(rng, 4, 3);
    const std::size_t actions = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const std::size_t w = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    LearnerState s(space, actions, w);
    std::vector<RoundRecord> all;
    std::size_t previous_history = 0;
    for (std::uint64_t t = 1; t <= 60; ++t) {
      all.push_back(testing::random_record(space, actions, t * 2, rng));
      s.record_round(all.back());
      CHECK(s.ring().size() == std::min<std::size_t>(w, all.size()));

      const auto tail = std::span(all).last(std::min<std::size_t>(w, all.size()));
      const auto brute = testing::brute_window(tail, space.feature_count());
      for (std::size_t a = 0; a < actions; ++a) {
        for (std::size_t g = 0; g < space.psi_total(); ++g) {
          const auto& got = s.reward_stats(a, g);
          auto it = brute.rewards.find({a, space.partial_at(g).entries});
          const std::size_t want = it == brute.rewards.end() ? 0 : it->second.count;
          CHECK(got.count == want);
          CHECK(got.count <= w);
          if (want > 0) CHECK(got.sum == doctest::Approx(it->second.sum).epsilon(1e-12));
        }
      }
      for (std::size_t i = 0; i < space.feature_count(); ++i) {
        CHECK(s.cost_stats(i).count == brute.costs[i].count);
        CHECK(s.cost_stats(i).sum == doctest::Approx(brute.costs[i].sum).epsilon(1e-12));
      }
      const auto h = s.raw_history_count(ObservationSet{});
      CHECK(h >= previous_history);
      previous_history = h;
    }
  }
}

// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "detpac/instances.hpp"
#include "detpac/learner.hpp"
#include "detpac/sampling.hpp"
#include "oracles.hpp"

using namespace detpac;
using namespace detpac::testing;

namespace {

Trajectory traj_of_arcs(const DeterministicMdp& mdp, std::vector<int> arcs) {
  Trajectory t;
  t.arcs = std::move(arcs);
  for (int arc : t.arcs) t.nodes.push_back(mdp.arc_node(arc));
  return t;
}

Policy policy_from_trajectory(const DeterministicMdp& mdp,
                              const std::vector<int>& arcs) {
  Policy p;
  p.actions.assign(mdp.num_nodes(), 0);
  for (int arc : arcs) p.actions[mdp.arc_node(arc)] = mdp.arc_action(arc);
  return p;
}

}  // namespace

TEST_CASE("max diameter: uniform bonuses give the lexicographically first") {
  const auto mdp = gen_random_layered(3, 2, 4, 0.8, 20);
  LearnerState state(mdp, 0.1, 0.1);
  const auto policy = max_diameter_policy(state);
  for (int node = 0; node < mdp.num_nodes(); ++node)
    CHECK(policy.actions[node] == 0);
}

TEST_CASE("max diameter: chases the under-visited arc") {
  std::vector<StageSpec> stages(2);
  stages[0].states = {StateSpec{
      "s1", {ActionSpec{"a1", 0, 0.0}, ActionSpec{"a2", 1, 0.0}}}};
  stages[1].states = {
      StateSpec{"u", {ActionSpec{"a1", -1, 0.0}, ActionSpec{"a2", -1, 0.0}}},
      StateSpec{"v", {ActionSpec{"a1", -1, 0.0}, ActionSpec{"a2", -1, 0.0}}}};
  const DeterministicMdp mdp(stages, RewardModel::bernoulli());
  LearnerState state(mdp, 0.1, 0.1);
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    state.set_statistics(arc, 5000, 0.5);
  const int fresh = mdp.arc_from_key("2/v/a2");
  state.set_statistics(fresh, 0, 0.0);
  const auto traj = rollout(mdp, max_diameter_policy(state));
  CHECK(std::count(traj.arcs.begin(), traj.arcs.end(), fresh) == 1);
}

TEST_CASE("max diameter: matches the enumeration argmax") {
  Rng rng(31);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto mdp = gen_random_layered(2, 2, 3, 0.8, 400 + seed);
    LearnerState state(mdp, 0.1, 0.1);
    for (int arc = 0; arc < mdp.num_arcs(); ++arc)
      state.set_statistics(arc, static_cast<int64_t>(rng.next_u64() % 100),
                           rng.uniform01());
    state.eliminate_arc(static_cast<int>(rng.next_u64() % mdp.num_arcs()));
    const auto traj = rollout(mdp, max_diameter_policy(state));
    double got = 0.0;
    for (int arc : traj.arcs) got += state.bonus(arc);
    const auto want = best_return_enum(mdp, state.bonuses(), state.active());
    CHECK(got == doctest::Approx(want.value()).epsilon(1e-12));
  }
}

TEST_CASE("coverage: period one demands every arc and covers it") {
  const auto mdp = gen_random_layered(3, 2, 4, 0.0, 21);
  LearnerState state(mdp, 1e-9, 0.1);
  MaxCoverageRule rule;
  rule.reset(mdp, state);
  // Drive the loop manually with zero rewards.
  int64_t t = 0;
  while (true) {
    ++t;
    const auto policy = rule.select(state, t);
    const auto traj = rollout(mdp, policy);
    state.update_statistics(traj, std::vector<double>(mdp.horizon(), 0.0));
    rule.after_episode(state, t, traj);
    const auto& logs = *rule.period_logs();
    if (logs.back().k >= 2) break;
    REQUIRE(t < 1000);
  }
  const auto& first = rule.period_logs()->front();
  CHECK(first.k == 1);
  CHECK(first.demanded == mdp.num_arcs());
  CHECK(first.cover_size == doctest::Approx(first.phi_star));
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) CHECK(state.count(arc) >= 1);
  // Duration of the closed period obeys the two-episodes-per-cover-policy
  // bound.
  CHECK(first.duration <= 2 * static_cast<int64_t>(first.phi_star));
}

TEST_CASE("coverage: eliminated crossover arc keeps the small cover") {
  const auto mdp = gen_cover_crossover(3, true);
  LearnerState state(mdp, 1e-9, 0.1);
  state.eliminate_arc(cover_crossover_arc(mdp));
  MaxCoverageRule rule;
  rule.reset(mdp, state);
  (void)rule.select(state, 1);
  const auto& log = rule.period_logs()->front();
  CHECK(log.demanded == mdp.num_arcs() - 1);
  CHECK(log.phi_star == doctest::Approx(4.0));  // m+1, not 2m
  CHECK(log.cover_size == 4);
}

TEST_CASE("adaptive: first policy of a fresh period covers H arcs") {
  const auto mdp = gen_random_layered(3, 2, 4, 0.0, 22);
  LearnerState state(mdp, 1e-9, 0.1);
  AdaptiveMaxCoverageRule rule;
  rule.reset(mdp, state);
  const auto policy = rule.select(state, 1);
  const auto traj = rollout(mdp, policy);
  state.update_statistics(traj, std::vector<double>(mdp.horizon(), 0.0));
  rule.after_episode(state, 1, traj);
  const auto& log = rule.period_logs()->front();
  REQUIRE(log.coverage_trace.size() == 1);
  CHECK(log.coverage_trace[0] == mdp.horizon());
}

TEST_CASE("adaptive: a single open triplet attracts the greedy policy") {
  const auto mdp = gen_random_layered(2, 2, 3, 0.0, 23);
  LearnerState state(mdp, 1e-9, 0.1);
  // Everything visited once except one arc: period target stays k=1.
  for (int arc = 1; arc < mdp.num_arcs(); ++arc) state.set_statistics(arc, 1, 0.0);
  AdaptiveMaxCoverageRule rule;
  rule.reset(mdp, state);
  const auto policy = rule.select(state, 1);
  const auto traj = rollout(mdp, policy);
  CHECK(std::count(traj.arcs.begin(), traj.arcs.end(), 0) == 1);
}

TEST_CASE("coverage function: empty, exhaustive, and random subsets") {
  const auto mdp = gen_random_layered(2, 2, 3, 0.0, 24);
  std::vector<uint8_t> demanded(mdp.num_arcs(), 1);
  CHECK(coverage_function(demanded, mdp, {}) == 0);

  const auto trajectories = all_trajectories(mdp);
  std::vector<Policy> all;
  for (const auto& arcs : trajectories)
    all.push_back(policy_from_trajectory(mdp, arcs));
  CHECK(coverage_function(demanded, mdp, all) == mdp.num_arcs());

  Rng rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<uint8_t> want(mdp.num_arcs());
    for (auto& w : want) w = rng.next_u64() % 2;
    std::vector<Policy> subset;
    for (const auto& arcs : trajectories)
      if (rng.next_u64() % 2) subset.push_back(policy_from_trajectory(mdp, arcs));
    // Direct double loop.
    int64_t expect = 0;
    for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
      if (!want[arc]) continue;
      bool hit = false;
      for (const auto& p : subset) {
        const auto traj = rollout(mdp, p);
        if (std::count(traj.arcs.begin(), traj.arcs.end(), arc) > 0) hit = true;
      }
      if (hit) ++expect;
    }
    CHECK(coverage_function(want, mdp, subset) == expect);
  }
}

TEST_CASE("coverage function: monotone and submodular") {
  Rng rng(26);
  const auto mdp = gen_random_layered(2, 2, 3, 0.0, 27);
  const auto trajectories = all_trajectories(mdp);
  std::vector<Policy> pool;
  for (const auto& arcs : trajectories)
    pool.push_back(policy_from_trajectory(mdp, arcs));
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<uint8_t> demanded(mdp.num_arcs());
    for (auto& w : demanded) w = rng.next_u64() % 2;
    std::vector<Policy> small, big;
    for (const auto& p : pool) {
      const auto r = rng.next_u64() % 3;
      if (r == 0) small.push_back(p);
      if (r <= 1) big.push_back(p);
    }
    for (const auto& p : small) big.push_back(p);  // ensure small <= big
    const auto& extra = pool[rng.next_u64() % pool.size()];
    auto small_plus = small;
    small_plus.push_back(extra);
    auto big_plus = big;
    big_plus.push_back(extra);
    const auto c_small = coverage_function(demanded, mdp, small);
    const auto c_big = coverage_function(demanded, mdp, big);
    CHECK(c_small <= c_big);
    CHECK(coverage_function(demanded, mdp, small_plus) - c_small >=
          coverage_function(demanded, mdp, big_plus) - c_big);
  }
}

TEST_CASE("periods: target increments once all active arcs reach it") {
  const auto mdp = gen_bandit({0.5, 0.5});
  LearnerState state(mdp, 1e-9, 0.1);
  PeriodTracker tracker;
  tracker.reset(mdp);
  CHECK(tracker.advance(state, 1));
  CHECK(tracker.current_k() == 1);
  state.update_statistics(traj_of_arcs(mdp, {0}), {0.0});
  CHECK_FALSE(tracker.advance(state, 2));
  state.update_statistics(traj_of_arcs(mdp, {1}), {0.0});
  CHECK(tracker.advance(state, 3));
  CHECK(tracker.current_k() == 2);
}

TEST_CASE("periods: eliminating the unique open arc closes the period") {
  const auto mdp = gen_bandit({0.5, 0.5, 0.5});
  LearnerState state(mdp, 1e-9, 0.1);
  state.set_statistics(0, 0, 0.0);
  state.set_statistics(1, 9, 0.0);
  state.set_statistics(2, 9, 0.0);
  PeriodTracker tracker;
  tracker.reset(mdp);
  CHECK(tracker.advance(state, 1));
  CHECK(tracker.current_k() == 1);
  CHECK(tracker.logs().back().demanded == 1);
  // The only under-sampled arc disappears: the target jumps to 10 and the
  // skipped targets appear as zero-length periods.
  state.eliminate_arc(0);
  CHECK(tracker.advance(state, 2));
  CHECK(tracker.current_k() == 10);
  const auto& logs = tracker.logs();
  REQUIRE(logs.size() == 10);
  CHECK(logs[0].duration == 1);
  for (size_t i = 1; i + 1 < logs.size(); ++i) {
    CHECK(logs[i].duration == 0);
    CHECK(logs[i].t_start == 2);
  }
  CHECK(logs.back().k == 10);
  CHECK(logs.back().demanded == 2);
}

TEST_CASE("alternation: odd episodes cover, even episodes shrink diameter") {
  const auto mdp = gen_random_layered(2, 2, 3, 0.9, 28);
  for (const char* name : {"max-coverage", "adaptive-max-coverage"}) {
    auto rule = make_sampling_rule(name);
    const auto result = run_learner(mdp, *rule, 0.3, 0.1, 77);
    const auto& branches = rule->branch_history();
    REQUIRE(static_cast<int64_t>(branches.size()) == result.tau);
    for (size_t i = 0; i < branches.size(); ++i) {
      const int64_t t = static_cast<int64_t>(i) + 1;
      if (t % 2 == 0)
        CHECK(branches[i] == 'd');
      else
        CHECK((branches[i] == 'c' || branches[i] == 'g' || branches[i] == 'f'));
    }
  }
}

TEST_CASE("period durations: within the coverage bounds on random runs") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto mdp = gen_random_layered(3, 2, 4, 0.8, 500 + seed);
    const double log_factor = std::log(static_cast<double>(mdp.horizon())) + 1.0;
    for (const char* name : {"max-coverage", "adaptive-max-coverage"}) {
      auto rule = make_sampling_rule(name);
      const auto result = run_learner(mdp, *rule, 0.3, 0.1, 600 + seed);
      const bool adaptive = std::string(name) == "adaptive-max-coverage";
      for (const auto& p : result.periods) {
        CHECK(p.min_active_visits_at_start >= p.k - 1);
        if (p.phi_star <= 0.0) {
          CHECK(p.duration == 0);
          continue;
        }
        const double cap =
            2.0 * p.phi_star * (adaptive ? log_factor : 1.0);
        CHECK(static_cast<double>(p.duration) <= cap + 1e-9);
      }
    }
  }
}

TEST_CASE("greedy trace: matches the submodular maximization guarantee") {
  // Periods that start on odd episodes alternate greedy/diameter in the
  // order the guarantee assumes.
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto mdp = gen_random_layered(2, 2, 4, 0.8, 700 + seed);
    AdaptiveMaxCoverageRule rule;
    const auto result = run_learner(mdp, rule, 0.3, 0.1, 800 + seed);
    for (const auto& p : result.periods) {
      if (p.t_start % 2 == 0 || p.demanded == 0 || p.phi_star <= 0.0) continue;
      for (size_t i = 1; i <= p.coverage_trace.size(); ++i) {
        const double bound =
            (1.0 - std::exp(-std::floor((i + 1) / 2.0) / p.phi_star)) *
            static_cast<double>(p.demanded);
        CHECK(static_cast<double>(p.coverage_trace[i - 1]) >= bound - 1e-9);
      }
    }
  }
}

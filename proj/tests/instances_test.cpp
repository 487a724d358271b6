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

#include <cmath>

#include "detpac/gaps.hpp"
#include "detpac/instances.hpp"
#include "detpac/sampling.hpp"
#include "detpac/serialize.hpp"
#include "oracles.hpp"

using namespace detpac;
using namespace detpac::testing;

TEST_CASE("hard instance: arc census of the reference shape") {
  // S=8, A=3, H=9: waiting window of 3 stages, depth-3 tree, leaves looping
  // over stages 4..9. Counted by hand from the construction.
  const auto mdp = gen_hard_worst_case(8, 3, 9);
  CHECK(mdp.num_arcs() == 95);
  CHECK(mdp.num_nodes() == 36);
  CHECK(mdp.horizon() == 9);
  // Waiting state: two actions on stages 1..2, one on stage 3.
  CHECK_NOTHROW(mdp.arc_from_key("1/s1/a2"));
  CHECK_NOTHROW(mdp.arc_from_key("2/s1/a2"));
  CHECK_THROWS(mdp.arc_from_key("3/s1/a2"));
  CHECK_THROWS(mdp.arc_from_key("4/s1/a1"));
}

TEST_CASE("hard instance: degenerate one-node tree is still valid") {
  const auto mdp = gen_hard_worst_case(2, 3, 3);
  CHECK(mdp.horizon() == 3);
  // s1 has only the entering action; the single tree state loops with A=3.
  CHECK(mdp.num_arcs() == 1 + 3 + 3);
}

TEST_CASE("hard instance: rejects bad parameters") {
  CHECK_THROWS_AS(gen_hard_worst_case(6, 2, 9), std::invalid_argument);
  CHECK_THROWS_AS(gen_hard_worst_case(8, 1, 9), std::invalid_argument);
  CHECK_THROWS_AS(gen_hard_worst_case(8, 2, 8), std::invalid_argument);
}

TEST_CASE("visits-vs-gap instance: shape and census") {
  const auto mdp = gen_visits_vs_gap(8, 3, 5, 0.25);
  // Chain: 2 + 1 + 1 + 1 + 1; internal tree arcs: 2+2+2; four childless
  // states looping with A=3 over stages 4..5.
  CHECK(mdp.num_arcs() == 6 + 6 + 24);
  const auto gaps = compute_gaps(mdp);
  CHECK(gaps.optimal_return == doctest::Approx(0.25));
  // Non-power-of-two state counts leave a one-child node.
  const auto mdp7 = gen_visits_vs_gap(7, 2, 5, 0.25);
  const auto opt7 = compute_gaps(mdp7);
  CHECK(opt7.optimal_return == doctest::Approx(0.25));
}

TEST_CASE("regret-vs-bpi instance: funnel arcs carry no return gap") {
  const auto mdp = gen_regret_vs_bpi(8, 3, 5, 0.3);
  CHECK(mdp.reward_model().is_gaussian());
  CHECK(mdp.reward_model().sigma2 == 1.0);
  const auto gaps = compute_gaps(mdp);
  CHECK(gaps.optimal_return == doctest::Approx(0.3));
  int positive = 0;
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    if (mdp.arc_stage(arc) == mdp.horizon() - 2)
      CHECK(gaps.det_return_gap[arc] == doctest::Approx(0.0));
    if (gaps.det_return_gap[arc] > kGapZeroTol) ++positive;
  }
  // Only the final state's second action is sub-optimal.
  CHECK(positive == 1);
  CHECK(gaps.det_return_gap[mdp.arc_from_key("5/t8/a2")] ==
        doctest::Approx(0.3));
  // Many disjoint optimal trajectories: the global floor collapses to zero.
  CHECK_FALSE(gaps.unique_optimal_trajectory);
  CHECK(gaps.delta_min() == 0.0);
}

TEST_CASE("random generators: seed determinism and validity") {
  const auto a = gen_random_layered(3, 2, 4, 0.6, 42);
  const auto b = gen_random_layered(3, 2, 4, 0.6, 42);
  const auto c = gen_random_layered(3, 2, 4, 0.6, 43);
  CHECK(mdp_to_json(a).dump() == mdp_to_json(b).dump());
  CHECK(mdp_to_json(a).dump() != mdp_to_json(c).dump());

  const auto t1 = gen_random_tree(3, 4, 11);
  const auto t2 = gen_random_tree(3, 4, 11);
  CHECK(mdp_to_json(t1).dump() == mdp_to_json(t2).dump());
  CHECK(is_tree_based(t1));
}

TEST_CASE("visit lower bounds: flat instance uses the accuracy floor") {
  // Equal rewards everywhere: gaps vanish, several arcs stay eps-optimal,
  // so every arc's local bound is log(1/(4 delta)) / (4 eps^2).
  std::vector<StageSpec> stages(2);
  stages[0].states = {StateSpec{
      "s1", {ActionSpec{"a1", 0, 0.5}, ActionSpec{"a2", 0, 0.5}}}};
  stages[1].states = {
      StateSpec{"u", {ActionSpec{"a1", -1, 0.5}, ActionSpec{"a2", -1, 0.5}}}};
  const DeterministicMdp mdp(stages, RewardModel::bernoulli());
  const double eps = 0.1, delta = 0.05;
  const auto report = visit_lower_bound(mdp, eps, delta);
  const double want = std::log(1.0 / (4.0 * delta)) / (4.0 * eps * eps);
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    CHECK(report.demand.lower[arc] == doctest::Approx(want));
}

TEST_CASE("visit lower bounds: separated bandit arms") {
  const auto mdp = gen_bandit({0.9, 0.1});
  const auto report = visit_lower_bound(mdp, 0.05, 0.01);
  // Both arms bind at the 0.8 gap: the sub-optimal arm through its own gap,
  // the optimal arm through the unique-eps-optimal stage floor.
  const double want = std::log(25.0) / (4.0 * 0.8 * 0.8);
  CHECK(report.demand.lower[1] == doctest::Approx(want));
  CHECK(report.demand.lower[0] == doctest::Approx(want));
  CHECK(report.phi_star == doctest::Approx(2.0 * want));
  // One-stage instance: both sandwich sides coincide with phi*.
  CHECK(report.stage_max_sum == doctest::Approx(report.phi_star));
  CHECK(report.total_sum == doctest::Approx(report.phi_star));
}

TEST_CASE("visit lower bounds: sigma2 scales the demands linearly") {
  const auto mdp = gen_bandit({0.9, 0.1});
  const auto unit = visit_lower_bound(mdp, 0.05, 0.01, 1.0);
  const auto quarter = visit_lower_bound(mdp, 0.05, 0.01, 0.25);
  CHECK(quarter.phi_star == doctest::Approx(0.25 * unit.phi_star));
}

TEST_CASE("visit lower bounds: sandwich holds on random instances") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto mdp = gen_random_layered(3, 2, 4, 0.8, 900 + seed);
    const auto report = visit_lower_bound(mdp, 0.1, 0.05);
    CHECK(report.stage_max_sum <= report.phi_star + 1e-9);
    CHECK(report.phi_star <= report.total_sum + 1e-9);
  }
}

TEST_CASE("tree bound: one-stage tree reduces to the stage sum") {
  const auto mdp = gen_bandit({0.9, 0.5, 0.1});
  const auto report = visit_lower_bound(mdp, 0.05, 0.01);
  CHECK(tree_lower_bound(mdp, 0.05, 0.01) ==
        doctest::Approx(report.stage_max_sum));
}

TEST_CASE("tree bound: hand-computed two-stage tree") {
  // s1 -> u via a1 (0.9) | -> v via a2 (0.1); u pays {0.8, 0.2}, v {0.3, 0}.
  std::vector<StageSpec> stages(2);
  stages[0].states = {StateSpec{
      "s1", {ActionSpec{"a1", 0, 0.9}, ActionSpec{"a2", 1, 0.1}}}};
  stages[1].states = {
      StateSpec{"u", {ActionSpec{"a1", -1, 0.8}, ActionSpec{"a2", -1, 0.2}}},
      StateSpec{"v", {ActionSpec{"a1", -1, 0.3}, ActionSpec{"a2", -1, 0.0}}}};
  const DeterministicMdp mdp(stages, RewardModel::bernoulli());
  REQUIRE(is_tree_based(mdp));
  const double eps = 0.05, delta = 0.01;
  const double log_term = std::log(1.0 / (4.0 * delta));
  // Gaps: V* = 1.7; through (s1,a2) best is 0.4 -> 1.3; through (u,a2) 1.1
  // -> 0.6; (v,*) gaps 1.3 and 1.6. Stage floors: unique eps-optimal arc at
  // both stages with minimum positive gaps 1.3 and 0.6.
  const double stage1 =
      2.0 * (log_term / (4.0 * 1.3 * 1.3)) +
      2.0 * (log_term / (4.0 * 1.3 * 1.3));
  const double stage2 = log_term / (4.0 * 0.6 * 0.6) +
                        log_term / (4.0 * 0.6 * 0.6) +
                        log_term / (4.0 * 1.3 * 1.3) +
                        log_term / (4.0 * 1.6 * 1.6);
  CHECK(tree_lower_bound(mdp, eps, delta) ==
        doctest::Approx(std::max(stage1, stage2)));
}

TEST_CASE("tree bound: forced chain needs no exploration") {
  std::vector<StageSpec> stages(3);
  for (int h = 0; h < 3; ++h)
    stages[h].states.push_back(
        StateSpec{"c", {ActionSpec{"a1", 0, 0.5}}});
  const DeterministicMdp mdp(stages, RewardModel::bernoulli());
  CHECK(tree_lower_bound(mdp, 0.1, 0.05) == 0.0);
  const auto report = visit_lower_bound(mdp, 0.1, 0.05);
  CHECK(report.phi_star == 0.0);
}

TEST_CASE("tree bound: rejects non-tree inputs") {
  const auto mdp = gen_hard_worst_case(8, 2, 9);
  CHECK_THROWS_AS(tree_lower_bound(mdp, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("tree bound: dominates the stage-max sandwich on random trees") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto mdp = gen_random_tree(2, 4, 40 + seed);
    const auto report = visit_lower_bound(mdp, 0.1, 0.05);
    REQUIRE(report.tree_bound.has_value());
    CHECK(*report.tree_bound >= report.stage_max_sum - 1e-9);
  }
}

TEST_CASE("elimination period bound: direct formula evaluation") {
  // H=2, N=4, all-zero gaps, eps = 0.1, delta = 0.1.
  std::vector<StageSpec> stages(2);
  stages[0].states = {StateSpec{
      "s1", {ActionSpec{"a1", 0, 0.0}, ActionSpec{"a2", 0, 0.0}}}};
  stages[1].states = {
      StateSpec{"u", {ActionSpec{"a1", -1, 0.0}, ActionSpec{"a2", -1, 0.0}}}};
  const DeterministicMdp mdp(stages, RewardModel::bernoulli());
  const double eps = 0.1, delta = 0.1;
  const auto ceiling = elimination_period_bound(mdp, eps, delta);
  const double log_n2 = std::log(std::exp(1.0) * 16.0 / delta);
  const double l_term = std::log(2.0) + 4.0 * std::log(4.0 * 2.0 / eps) +
                        std::log(std::log(std::exp(1.0) * 16.0 / delta));
  const double want = 8.0 * 4.0 / (eps * eps) * (log_n2 + l_term) + 1.0;
  for (double k : ceiling) CHECK(k == doctest::Approx(want));
}

TEST_CASE("elimination period bound: shrinks as the gap grows") {
  const auto small = elimination_period_bound(gen_visits_vs_gap(8, 2, 5, 0.1), 0.01, 0.1);
  const auto large = elimination_period_bound(gen_visits_vs_gap(8, 2, 5, 0.5), 0.01, 0.1);
  const auto mdp = gen_visits_vs_gap(8, 2, 5, 0.1);
  const int tree_arc = mdp.arc_from_key("1/s1/a1");
  CHECK(large[tree_arc] < small[tree_arc]);
}

TEST_CASE("elimination period bound: covers empirical elimination periods on good runs") {
  const auto mdp = gen_bandit({0.9, 0.1});
  const double eps = 0.05, delta = 0.1;
  const auto ceiling = elimination_period_bound(mdp, eps, delta);
  for (uint64_t seed = 0; seed < 30; ++seed) {
    MaxCoverageRule rule;
    const auto result = run_learner(mdp, rule, eps, delta, 4000 + seed);
    if (!result.good_event) continue;
    for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
      const int64_t t_elim = result.elimination_episode[arc];
      if (t_elim < 0) continue;
      // Map the elimination episode onto its period index.
      int64_t k_elim = -1;
      for (const auto& p : result.periods)
        if (p.t_start <= t_elim && t_elim < p.t_start + std::max<int64_t>(p.duration, 1))
          k_elim = p.k;
      REQUIRE(k_elim >= 1);
      CHECK(static_cast<double>(k_elim) <= ceiling[arc]);
    }
  }
}

TEST_CASE("generate: dispatches every kind and validates") {
  InstanceSpec spec;
  spec.kind = "hard-worst-case";
  spec.S = 4;
  spec.A = 2;
  spec.H = 6;
  CHECK(generate(spec).num_arcs() > 0);
  spec.kind = "bandit";
  spec.means = {0.9, 0.1};
  CHECK(generate(spec).horizon() == 1);
  spec.kind = "cover-crossover";
  spec.m = 2;
  CHECK(generate(spec).horizon() == 3);
  spec.kind = "nope";
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

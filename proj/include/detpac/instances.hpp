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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "detpac/flow.hpp"
#include "detpac/gaps.hpp"
#include "detpac/mdp.hpp"

namespace detpac {

/// Worst-case family: a waiting state with a self-loop feeding a full binary
/// tree of S-1 states whose leaves self-loop to the horizon. Zero rewards by
/// default; the optional hook perturbs individual arc means (stage is
/// 1-based, state/action use the generated ids/labels).
///
/// Requires S = 2^d, A >= 2, H >= 3*log2(S). The waiting action is available
/// up to stage floor(H/3) - 1.
DeterministicMdp gen_hard_worst_case(
    int S, int A, int H,
    const std::function<double(int stage, const std::string& state,
                               const std::string& action)>& reward_hook = {});

/// A binary tree behind action a1 with all-zero rewards, against a forced
/// self-loop chain whose final action pays delta: every tree arc then has
/// deterministic return gap delta. Requires S >= 4, A >= 2,
/// H >= ceil(log2 S) + 1.
DeterministicMdp gen_visits_vs_gap(int S, int A, int H, double delta);

/// Tree whose reachable states all funnel into one final state at stage H-1;
/// only that state's first action at stage H pays delta (Gaussian rewards,
/// unit variance). Every path to the funnel is optimal. Same constraints as
/// gen_visits_vs_gap.
DeterministicMdp gen_regret_vs_bpi(int S, int A, int H, double delta);

/// Layered DAG with `states_per_stage` states per stage (capped by the
/// available out-degree near the source), A actions per state, every state
/// reachable; arc means are U(0,1) with probability `reward_density` and
/// zero otherwise.
DeterministicMdp gen_random_layered(int states_per_stage, int A, int H,
                                    double reward_density, uint64_t seed,
                                    RewardModel reward = RewardModel::bernoulli());

/// Random tree: every state spawns 1..branching fresh children, so each
/// state has exactly one incoming arc. Arc means are U(0,1).
DeterministicMdp gen_random_tree(int branching, int H, uint64_t seed,
                                 RewardModel reward = RewardModel::bernoulli());

/// H = 1 instance with the given arm means.
DeterministicMdp gen_bandit(const std::vector<double>& means,
                            RewardModel reward = RewardModel::bernoulli());

/// Three-stage gadget in which one branch can recycle surplus flow into the
/// other through a single crossover arc "cross": a policy cover of all other
/// arcs has size m+1 when the crossover arc is present and 2m when it is
/// removed from the graph. Zero rewards.
DeterministicMdp gen_cover_crossover(int m, bool with_crossover_arc);

/// Flat id of the crossover arc of gen_cover_crossover(m, true).
int cover_crossover_arc(const DeterministicMdp& mdp);

/// Parsed generator request (CLI surface).
struct InstanceSpec {
  std::string kind;  // hard-worst-case | visits-vs-gap | regret-vs-bpi |
                     // random-layered | random-tree | bandit | cover-crossover
  int S = 8, A = 2, H = 4;
  double delta_gap = 0.1;
  int branching = 2;
  double density = 1.0;
  uint64_t seed = 1;
  int m = 2;
  bool with_crossover_arc = true;
  std::vector<double> means;  // bandit arms
  std::optional<double> gaussian_sigma2;
};

DeterministicMdp generate(const InstanceSpec& spec);

/// Local visit lower bounds and their minimum-flow aggregate.
struct LowerBoundReport {
  double eps = 0.0, delta = 0.0, sigma2 = 1.0;
  DemandFn demand;           // per-arc local bound, scaled by sigma2
  double phi_star = 0.0;     // minimum-flow value of `demand`
  double stage_max_sum = 0.0;
  double total_sum = 0.0;
  std::optional<double> tree_bound;  // present when the MDP is tree-based
};

/// Per-arc bound log(1/(4 delta)) / (4 max(gap, stage_gap_floor, eps)^2)
/// (clamped at zero when delta >= 1/4, where the bound is vacuous), scaled by
/// sigma2, with the stage gap floor equal to the smallest positive gap when
/// exactly one arc at the stage is eps-optimal-reachable and zero otherwise;
/// a stage whose single reachable arc is forced contributes nothing. The
/// aggregate is the minimum flow of these demands.
LowerBoundReport visit_lower_bound(const DeterministicMdp& mdp, double eps,
                                      double delta, double sigma2 = 1.0);

/// Closed-form bound for tree-based MDPs:
/// max_h sum_arcs (H-h+1) log(1/(4 delta)) / (4 max(gap, floor_h, eps)^2).
/// Throws unless is_tree_based(mdp).
double tree_lower_bound(const DeterministicMdp& mdp, double eps, double delta);

/// Diagnostic ceiling on the period at which each arc is eliminated:
/// 8H^2/m^2 (log(eN^2/delta) + L) + 1 with m = max(gap, gap_min, eps) and
/// L = log 2 + 4 log(4H/m) + log log(eN^2/delta); gap_min uses the global
/// unique-optimal-trajectory convention. Arcs with an infinite effective gap
/// (a forced single trajectory) get 1.
std::vector<double> elimination_period_bound(const DeterministicMdp& mdp, double eps,
                                double delta);

}  // namespace detpac

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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detpac/ext_real.hpp"
#include "detpac/mdp.hpp"
#include "detpac/rng.hpp"

namespace detpac {

class SamplingRule;

enum class StopReason { kWidth, kUniqueActive, kBudget };

std::string to_string(StopReason reason);

/// Running statistics of the elimination learner: visit counts, empirical
/// means, confidence bonuses and the active action sets. The good-event flag
/// is instrumentation computed from the true means; nothing in the learner
/// reads it back.
class LearnerState {
 public:
  LearnerState(const DeterministicMdp& mdp, double eps, double delta);

  const DeterministicMdp& mdp() const { return *mdp_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  int64_t episode() const { return t_; }

  int64_t count(int arc) const { return counts_[arc]; }
  const std::vector<int64_t>& counts() const { return counts_; }
  double mean(int arc) const { return mean_[arc]; }
  double bonus(int arc) const { return bonus_[arc]; }
  const std::vector<double>& bonuses() const { return bonus_; }

  const ActionMask& active() const { return active_; }
  bool all_singleton_active() const { return multi_active_states_ == 0; }
  bool good_event() const { return good_event_; }
  int64_t elimination_episode(int arc) const { return elim_episode_[arc]; }
  const std::vector<int64_t>& elimination_episodes() const {
    return elim_episode_;
  }

  /// Width of the confidence interval for an arc visited n times. Bounded
  /// rewards use beta(n) = 0.5 log(e(n+1)N/delta) clipped at one; Gaussian
  /// rewards use the subgaussian beta(n) = 2 sigma^2 log(pi^2 n^2 N / 3
  /// delta) without clipping (deviations are unbounded), and the unvisited
  /// width is max(1, sqrt(beta(1))).
  double bonus_for_count(int64_t n) const;

  /// Counts +1 along the trajectory; means and bonuses recomputed for the
  /// touched arcs only. Also advances the episode counter and checks the
  /// good event on the touched arcs (untouched intervals are unchanged, so
  /// this is equivalent to a full per-episode scan).
  void update_statistics(const Trajectory& traj,
                         const std::vector<double>& rewards);

  /// Test hook: overwrite one arc's statistics (bonus recomputed from n).
  void set_statistics(int arc, int64_t n, double mean);
  /// Test hook: force one arc's bonus.
  void force_bonus(int arc, double b) { bonus_[arc] = b; }

  void eliminate_arc(int arc);  // batch application happens in eliminate()

 private:
  const DeterministicMdp* mdp_;
  double eps_, delta_;
  int64_t t_ = 0;
  std::vector<int64_t> counts_;
  std::vector<double> reward_sum_;
  std::vector<double> mean_;
  std::vector<double> bonus_;
  ActionMask active_;
  int multi_active_states_ = 0;
  bool good_event_ = true;
  std::vector<int64_t> elim_episode_;  // -1 when never eliminated

  double bounded_log_const_;  // log(e N / delta)
  double gaussian_log_const_; // log(pi^2 N / (3 delta))
};

/// Optimistic and pessimistic value tables for the current statistics.
///
/// optimistic_suffix maximizes mean+bonus over active actions (empty active
/// set means the full set); optimistic_prefix is the best active value of
/// reaching each node from the source, -inf where unreachable under the
/// mask. pessimistic_all maximizes mean-bonus over ALL actions: the
/// elimination benchmark ranges over the full policy set, active or not.
struct ConfidenceTables {
  std::vector<double> optimistic_suffix;  // per node
  std::vector<ExtReal> optimistic_prefix; // per node
  std::vector<double> pessimistic_all;    // per node
  std::vector<double> upper_weight;       // per arc: mean + bonus

  double best_active_upper(const DeterministicMdp& mdp) const {
    return optimistic_suffix[mdp.source_node()];
  }
  double best_lower(const DeterministicMdp& mdp) const {
    return pessimistic_all[mdp.source_node()];
  }
  /// max over active policies through the arc of the optimistic return.
  ExtReal constrained_upper(const DeterministicMdp& mdp, int arc) const {
    const int head = mdp.arc_head(arc);
    return optimistic_prefix[mdp.arc_node(arc)] + upper_weight[arc] +
           (head >= 0 ? optimistic_suffix[head] : 0.0);
  }
};

ConfidenceTables confidence_values(const LearnerState& state);

/// One elimination sweep: removes every active action whose best active
/// optimistic return through it falls below the best pessimistic return over
/// all policies (-inf convention when no active policy reaches it). All
/// removals are decided against the pre-sweep active sets and applied
/// together. Returns the newly eliminated arcs.
std::vector<int> eliminate(LearnerState& state);

/// Stopping rules: kWidth when the widest active confidence interval
/// (2 * best active bonus sum) is at most eps; kUniqueActive when every
/// active set has at most one action. Width is reported when both hold.
std::optional<StopReason> check_stopping(const LearnerState& state);

/// Optimistic active policy (backward induction on mean+bonus over active
/// sets, ties to the lowest action index).
Policy recommend(const LearnerState& state);

struct PeriodLog {
  int64_t k = 0;
  int64_t t_start = 0;
  int64_t duration = 0;
  int64_t demanded = 0;        // N_k
  double phi_star = 0.0;       // minimum-flow value of the period demand
  int64_t cover_size = 0;      // 0 for rules that do not precompute covers
  int64_t min_active_visits_at_start = 0;
  int64_t active_last_stage_arcs = 0;
  // Demanded arcs covered after each episode of the period (cumulative).
  std::vector<int64_t> coverage_trace;
};

struct RunResult {
  uint64_t seed = 0;
  std::string rule;
  double eps = 0.0, delta = 0.0;
  int64_t tau = 0;
  StopReason stop_reason = StopReason::kBudget;
  Policy recommended;
  double suboptimality = 0.0;     // policy gap of the recommendation
  bool good_event = true;
  std::vector<int64_t> final_counts;       // per arc
  std::vector<int64_t> elimination_episode; // per arc, -1 = never
  std::vector<PeriodLog> periods;           // empty for max-diameter
};

struct RunConfig {
  int64_t max_episodes = 10'000'000;
  int64_t elim_period = 1;  // eliminations checked every this many episodes
};

/// The elimination learner loop: sample, update, eliminate, stop-check.
/// Stops almost surely under any of the provided sampling rules; the budget
/// cap is a guard and is reported as a distinct stop reason.
RunResult run_learner(const DeterministicMdp& mdp, SamplingRule& rule, double eps,
                   double delta, uint64_t seed,
                   const RunConfig& config = RunConfig{});

}  // namespace detpac

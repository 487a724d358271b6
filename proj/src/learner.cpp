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

#include "detpac/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "detpac/gaps.hpp"
#include "detpac/sampling.hpp"

namespace detpac {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kWidth: return "width";
    case StopReason::kUniqueActive: return "unique-active";
    case StopReason::kBudget: return "budget";
  }
  return "unknown";
}

LearnerState::LearnerState(const DeterministicMdp& mdp, double eps,
                           double delta)
    : mdp_(&mdp),
      eps_(eps),
      delta_(delta),
      counts_(mdp.num_arcs(), 0),
      reward_sum_(mdp.num_arcs(), 0.0),
      mean_(mdp.num_arcs(), 0.0),
      bonus_(mdp.num_arcs(), 0.0),
      active_(mdp),
      elim_episode_(mdp.num_arcs(), -1) {
  if (!(eps > 0.0)) throw std::invalid_argument("learner: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("learner: delta must be in (0,1)");
  const double n_arcs = static_cast<double>(mdp.num_arcs());
  bounded_log_const_ = 1.0 + std::log(n_arcs / delta);
  const double pi2 = 9.869604401089358;
  gaussian_log_const_ = std::log(pi2 * n_arcs / (3.0 * delta));
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    bonus_[arc] = bonus_for_count(0);
  for (int node = 0; node < mdp.num_nodes(); ++node)
    if (active_.count(node) > 1) ++multi_active_states_;
}

double LearnerState::bonus_for_count(int64_t n) const {
  if (mdp_->reward_model().is_gaussian()) {
    const double s2 = mdp_->reward_model().sigma2;
    const auto beta = [&](int64_t m) {
      return 2.0 * s2 *
             (gaussian_log_const_ + 2.0 * std::log(static_cast<double>(m)));
    };
    if (n == 0) return std::max(1.0, std::sqrt(beta(1)));
    return std::sqrt(beta(n) / static_cast<double>(n));
  }
  if (n == 0) return 1.0;
  const double beta =
      0.5 * (bounded_log_const_ + std::log(static_cast<double>(n + 1)));
  return std::min(1.0, std::sqrt(beta / static_cast<double>(n)));
}

void LearnerState::update_statistics(const Trajectory& traj,
                                     const std::vector<double>& rewards) {
  if (traj.arcs.size() != rewards.size())
    throw std::invalid_argument("update_statistics: size mismatch");
  ++t_;
  for (size_t h = 0; h < traj.arcs.size(); ++h) {
    const int arc = traj.arcs[h];
    ++counts_[arc];
    reward_sum_[arc] += rewards[h];
    mean_[arc] = reward_sum_[arc] / static_cast<double>(counts_[arc]);
    bonus_[arc] = bonus_for_count(counts_[arc]);
    if (std::abs(mean_[arc] - mdp_->arc_mean(arc)) > bonus_[arc] + 1e-12)
      good_event_ = false;
  }
}

void LearnerState::set_statistics(int arc, int64_t n, double mean) {
  counts_[arc] = n;
  mean_[arc] = mean;
  reward_sum_[arc] = mean * static_cast<double>(n);
  bonus_[arc] = bonus_for_count(n);
}

void LearnerState::eliminate_arc(int arc) {
  if (!active_.raw(arc)) return;
  const int node = mdp_->arc_node(arc);
  const int before = active_.count(node);
  active_.remove(*mdp_, arc);
  if (before == 2) --multi_active_states_;
  elim_episode_[arc] = t_;
}

ConfidenceTables confidence_values(const LearnerState& state) {
  const auto& mdp = state.mdp();
  ConfidenceTables t;
  t.upper_weight.resize(mdp.num_arcs());
  std::vector<double> lower_weight(mdp.num_arcs());
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    t.upper_weight[arc] = state.mean(arc) + state.bonus(arc);
    lower_weight[arc] = state.mean(arc) - state.bonus(arc);
  }
  t.optimistic_suffix = best_suffix(mdp, t.upper_weight, state.active());
  t.optimistic_prefix = best_prefix(mdp, t.upper_weight, state.active());
  t.pessimistic_all = best_suffix(mdp, lower_weight);
  return t;
}

std::vector<int> eliminate(LearnerState& state) {
  const auto& mdp = state.mdp();
  const auto tables = confidence_values(state);
  const ExtReal threshold(tables.best_lower(mdp));

  std::vector<int> removed;
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    if (!state.active().raw(arc)) continue;
    if (tables.constrained_upper(mdp, arc) < threshold) removed.push_back(arc);
  }
  for (int arc : removed) state.eliminate_arc(arc);
  return removed;
}

std::optional<StopReason> check_stopping(const LearnerState& state) {
  const auto& mdp = state.mdp();
  const auto diam = best_suffix(mdp, state.bonuses(), state.active());
  if (2.0 * diam[mdp.source_node()] <= state.eps()) return StopReason::kWidth;
  if (state.all_singleton_active()) return StopReason::kUniqueActive;
  return std::nullopt;
}

Policy recommend(const LearnerState& state) {
  const auto& mdp = state.mdp();
  std::vector<double> upper(mdp.num_arcs());
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    upper[arc] = state.mean(arc) + state.bonus(arc);
  const auto suffix = best_suffix(mdp, upper, state.active());
  return suffix_policy(mdp, upper, suffix, state.active());
}

RunResult run_learner(const DeterministicMdp& mdp, SamplingRule& rule, double eps,
                   double delta, uint64_t seed, const RunConfig& config) {
  if (config.max_episodes < 1)
    throw std::invalid_argument("run_learner: max_episodes must be >= 1");
  if (config.elim_period < 1)
    throw std::invalid_argument("run_learner: elim_period must be >= 1");

  LearnerState state(mdp, eps, delta);
  rule.reset(mdp, state);
  Rng rng(seed);

  RunResult result;
  result.seed = seed;
  result.rule = rule.name();
  result.eps = eps;
  result.delta = delta;

  std::vector<double> rewards(mdp.horizon());
  const bool gaussian = mdp.reward_model().is_gaussian();
  const double sigma = std::sqrt(mdp.reward_model().sigma2);

  std::optional<StopReason> stop;
  int64_t t = 0;
  while (t < config.max_episodes) {
    ++t;
    const Policy policy = rule.select(state, t);
    const Trajectory traj = rollout(mdp, policy);
    for (int h = 0; h < mdp.horizon(); ++h) {
      const double mean = mdp.arc_mean(traj.arcs[h]);
      rewards[h] = gaussian ? mean + sigma * rng.normal()
                            : (rng.bernoulli(mean) ? 1.0 : 0.0);
    }
    state.update_statistics(traj, rewards);
    if (t % config.elim_period == 0) eliminate(state);
    rule.after_episode(state, t, traj);
    stop = check_stopping(state);
    if (stop) break;
  }

  rule.finalize(t);
  result.tau = t;
  result.stop_reason = stop.value_or(StopReason::kBudget);
  result.recommended = recommend(state);
  result.suboptimality = policy_gap(mdp, result.recommended);
  result.good_event = state.good_event();
  result.final_counts = state.counts();
  result.elimination_episode = state.elimination_episodes();
  if (const auto* logs = rule.period_logs()) result.periods = *logs;
  return result;
}

}  // namespace detpac

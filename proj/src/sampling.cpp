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

#include "detpac/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace detpac {

Policy max_diameter_policy(const LearnerState& state) {
  const auto& mdp = state.mdp();
  const auto suffix = best_suffix(mdp, state.bonuses(), state.active());
  return suffix_policy(mdp, state.bonuses(), suffix, state.active());
}

void PeriodTracker::reset(const DeterministicMdp& mdp) {
  mdp_ = &mdp;
  current_k_ = 0;
  t_start_ = 0;
  demanded_.assign(mdp.num_arcs(), 0);
  covered_.assign(mdp.num_arcs(), 0);
  covered_count_ = 0;
  flow_.eta.assign(mdp.num_arcs(), 0.0);
  logs_.clear();
}

bool PeriodTracker::advance(const LearnerState& state, int64_t t) {
  const auto& mdp = *mdp_;
  int64_t min_visits = -1;
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    if (!state.active().raw(arc)) continue;
    if (min_visits < 0 || state.count(arc) < min_visits)
      min_visits = state.count(arc);
  }
  if (min_visits < 0)
    throw std::logic_error(
        "period: no active arcs; the stopping rule should have fired");
  const int64_t k = min_visits + 1;
  if (k <= current_k_) return false;

  if (current_k_ >= 1) {
    logs_.back().duration = t - t_start_;
  }
  int64_t active_last = 0;
  for (int s = 0; s < mdp.num_states(mdp.horizon() - 1); ++s) {
    const int node = mdp.node_index(mdp.horizon() - 1, s);
    for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc)
      if (state.active().raw(arc)) ++active_last;
  }
  // Targets skipped by eliminations are empty periods.
  for (int64_t k_skip = current_k_ + 1; k_skip < k; ++k_skip) {
    PeriodLog log;
    log.k = k_skip;
    log.t_start = t;
    log.duration = 0;
    log.min_active_visits_at_start = min_visits;
    log.active_last_stage_arcs = active_last;
    logs_.push_back(std::move(log));
  }

  current_k_ = k;
  t_start_ = t;
  covered_count_ = 0;
  DemandFn demand(mdp);
  int64_t demanded_count = 0;
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    covered_[arc] = 0;
    const bool wanted = state.active().raw(arc) && state.count(arc) < k;
    demanded_[arc] = wanted ? 1 : 0;
    if (wanted) {
      demand.lower[arc] = 1.0;
      ++demanded_count;
    }
  }
  auto solved = min_flow(mdp, demand);
  flow_ = std::move(solved.flow);

  PeriodLog log;
  log.k = k;
  log.t_start = t;
  log.demanded = demanded_count;
  log.phi_star = solved.value;
  log.min_active_visits_at_start = min_visits;
  log.active_last_stage_arcs = active_last;
  logs_.push_back(std::move(log));
  return true;
}

void PeriodTracker::record_visits(const Trajectory& traj) {
  for (int arc : traj.arcs) {
    if (demanded_[arc] && !covered_[arc]) {
      covered_[arc] = 1;
      ++covered_count_;
    }
  }
  if (!logs_.empty()) logs_.back().coverage_trace.push_back(covered_count_);
}

void PeriodTracker::finalize(int64_t tau) {
  if (current_k_ >= 1) logs_.back().duration = tau - t_start_ + 1;
}

void MaxCoverageRule::reset(const DeterministicMdp& mdp,
                            const LearnerState& state) {
  tracker_.reset(mdp);
  cover_.clear();
  branches_.clear();
}

Policy MaxCoverageRule::select(const LearnerState& state, int64_t t) {
  if (tracker_.advance(state, t)) {
    cover_.clear();
    auto policies = extract_policy_cover(state.mdp(), tracker_.period_flow());
    tracker_.logs().back().cover_size = static_cast<int64_t>(policies.size());
    for (auto& p : policies) cover_.push_back(std::move(p));
  }
  if (t % 2 == 1 && !cover_.empty()) {
    branches_.push_back('c');
    Policy p = std::move(cover_.front());
    cover_.pop_front();
    return p;
  }
  // Even episodes, and odd ones once the cover queue has drained before the
  // target incremented.
  branches_.push_back(t % 2 == 1 ? 'f' : 'd');
  return max_diameter_policy(state);
}

void MaxCoverageRule::after_episode(const LearnerState& state, int64_t t,
                                    const Trajectory& traj) {
  tracker_.record_visits(traj);
}

void MaxCoverageRule::finalize(int64_t tau) { tracker_.finalize(tau); }

void AdaptiveMaxCoverageRule::reset(const DeterministicMdp& mdp,
                                    const LearnerState& state) {
  tracker_.reset(mdp);
  branches_.clear();
}

Policy AdaptiveMaxCoverageRule::select(const LearnerState& state, int64_t t) {
  tracker_.advance(state, t);
  const auto& mdp = state.mdp();
  if (t % 2 == 1) {
    branches_.push_back('g');
    // Count of still-open demanded triplets along the trajectory, maximized
    // over ALL policies: eliminated arcs stay traversable.
    std::vector<double> weight(mdp.num_arcs(), 0.0);
    for (int arc = 0; arc < mdp.num_arcs(); ++arc)
      if (tracker_.arc_demand_open(arc)) weight[arc] = 1.0;
    const ActionMask full(mdp);
    const auto suffix = best_suffix(mdp, weight, full);
    return suffix_policy(mdp, weight, suffix, full);
  }
  branches_.push_back('d');
  return max_diameter_policy(state);
}

void AdaptiveMaxCoverageRule::after_episode(const LearnerState& state,
                                            int64_t t, const Trajectory& traj) {
  tracker_.record_visits(traj);
}

void AdaptiveMaxCoverageRule::finalize(int64_t tau) { tracker_.finalize(tau); }

Policy MaxDiameterRule::select(const LearnerState& state, int64_t t) {
  branches_.push_back('d');
  return max_diameter_policy(state);
}

int64_t coverage_function(const std::vector<uint8_t>& demanded,
                          const DeterministicMdp& mdp,
                          const std::vector<Policy>& policies) {
  std::vector<uint8_t> hit(mdp.num_arcs(), 0);
  for (const auto& policy : policies) {
    const auto traj = rollout(mdp, policy);
    for (int arc : traj.arcs) hit[arc] = 1;
  }
  int64_t covered = 0;
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    if (demanded[arc] && hit[arc]) ++covered;
  return covered;
}

std::unique_ptr<SamplingRule> make_sampling_rule(const std::string& name) {
  if (name == "max-diameter") return std::make_unique<MaxDiameterRule>();
  if (name == "max-coverage") return std::make_unique<MaxCoverageRule>();
  if (name == "adaptive-max-coverage")
    return std::make_unique<AdaptiveMaxCoverageRule>();
  throw std::invalid_argument("unknown sampling rule '" + name + "'");
}

}  // namespace detpac

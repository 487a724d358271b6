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

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "detpac/flow.hpp"
#include "detpac/learner.hpp"
#include "detpac/mdp.hpp"

namespace detpac {

/// Strategy interface consumed by run_learner. One instance drives one run;
/// mutable period bookkeeping lives inside the rule.
class SamplingRule {
 public:
  virtual ~SamplingRule() = default;
  virtual std::string name() const = 0;
  virtual void reset(const DeterministicMdp& mdp, const LearnerState& state) {}
  virtual Policy select(const LearnerState& state, int64_t t) = 0;
  virtual void after_episode(const LearnerState& state, int64_t t,
                             const Trajectory& traj) {}
  virtual void finalize(int64_t tau) {}
  virtual const std::vector<PeriodLog>* period_logs() const { return nullptr; }
  /// One character per episode: 'd' max-diameter, 'c' cover policy,
  /// 'g' greedy coverage, 'f' fallback.
  const std::string& branch_history() const { return branches_; }

 protected:
  std::string branches_;
};

/// argmax over active policies of the bonus sum along the trajectory.
Policy max_diameter_policy(const LearnerState& state);

/// Period bookkeeping shared by the coverage rules: detects target
/// increments, snapshots the demand c^k (active at period start and fewer
/// than k visits), solves the per-period minimum flow, and logs durations
/// and coverage traces.
class PeriodTracker {
 public:
  void reset(const DeterministicMdp& mdp);

  /// Recomputes the target k_t from the pre-episode statistics; on an
  /// increment, closes the running period (skipped targets log zero-length
  /// periods) and snapshots the new demand. Returns true when a new period
  /// begins at episode t.
  bool advance(const LearnerState& state, int64_t t);

  void record_visits(const Trajectory& traj);
  void finalize(int64_t tau);

  int64_t current_k() const { return current_k_; }
  const std::vector<uint8_t>& demanded() const { return demanded_; }
  bool arc_demand_open(int arc) const {
    return demanded_[arc] != 0 && covered_[arc] == 0;
  }
  const Flow& period_flow() const { return flow_; }
  std::vector<PeriodLog>& logs() { return logs_; }
  const std::vector<PeriodLog>& logs() const { return logs_; }

 private:
  const DeterministicMdp* mdp_ = nullptr;
  int64_t current_k_ = 0;
  int64_t t_start_ = 0;
  std::vector<uint8_t> demanded_;
  std::vector<uint8_t> covered_;
  int64_t covered_count_ = 0;
  Flow flow_;
  std::vector<PeriodLog> logs_;
};

/// Plays precomputed minimum policy covers on odd episodes (FIFO order) and
/// the maximum-diameter policy on even ones. The per-period cover comes from
/// an integer minimum flow over the full arc set; eliminated arcs carry zero
/// demand but stay traversable.
class MaxCoverageRule : public SamplingRule {
 public:
  std::string name() const override { return "max-coverage"; }
  void reset(const DeterministicMdp& mdp, const LearnerState& state) override;
  Policy select(const LearnerState& state, int64_t t) override;
  void after_episode(const LearnerState& state, int64_t t,
                     const Trajectory& traj) override;
  void finalize(int64_t tau) override;
  const std::vector<PeriodLog>* period_logs() const override {
    return &tracker_.logs();
  }

 private:
  PeriodTracker tracker_;
  std::deque<Policy> cover_;
};

/// Greedy coverage on odd episodes: plays the policy visiting the most
/// still-uncovered demanded triplets of the running period (an exact greedy
/// step on the coverage set function, optimized over all policies), and the
/// maximum-diameter policy on even episodes.
class AdaptiveMaxCoverageRule : public SamplingRule {
 public:
  std::string name() const override { return "adaptive-max-coverage"; }
  void reset(const DeterministicMdp& mdp, const LearnerState& state) override;
  Policy select(const LearnerState& state, int64_t t) override;
  void after_episode(const LearnerState& state, int64_t t,
                     const Trajectory& traj) override;
  void finalize(int64_t tau) override;
  const std::vector<PeriodLog>* period_logs() const override {
    return &tracker_.logs();
  }

 private:
  PeriodTracker tracker_;
};

class MaxDiameterRule : public SamplingRule {
 public:
  std::string name() const override { return "max-diameter"; }
  Policy select(const LearnerState& state, int64_t t) override;
};

/// The coverage set function C^k: number of demanded arcs visited by at
/// least one policy of the set.
int64_t coverage_function(const std::vector<uint8_t>& demanded,
                          const DeterministicMdp& mdp,
                          const std::vector<Policy>& policies);

/// Factory for the CLI names: max-diameter | max-coverage |
/// adaptive-max-coverage.
std::unique_ptr<SamplingRule> make_sampling_rule(const std::string& name);

}  // namespace detpac

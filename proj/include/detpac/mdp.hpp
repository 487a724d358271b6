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
#include <string>
#include <vector>

#include "detpac/ext_real.hpp"

namespace detpac {

/// Reward distribution attached to every arc of the model. Bernoulli arcs
/// draw in {0,1} with the arc mean as success probability; Gaussian arcs draw
/// N(mean, sigma2) with a single model-level variance.
struct RewardModel {
  enum class Kind { kBernoulli, kGaussian };
  Kind kind = Kind::kBernoulli;
  double sigma2 = 1.0;

  static RewardModel bernoulli() { return RewardModel{Kind::kBernoulli, 1.0}; }
  static RewardModel gaussian(double sigma2) {
    return RewardModel{Kind::kGaussian, sigma2};
  }
  bool is_gaussian() const { return kind == Kind::kGaussian; }
};

struct ActionSpec {
  std::string label;
  int next_state = -1;  // index into the next stage; ignored at the last stage
  double mean_reward = 0.0;
};

struct StateSpec {
  std::string id;
  std::vector<ActionSpec> actions;
};

struct StageSpec {
  std::vector<StateSpec> states;
};

/// Deterministic time-inhomogeneous finite-horizon MDP over a layered graph.
///
/// State identity is per-(stage,state): the same id may name states at
/// several stages, and all internal indexing is stage-local. Stage-H actions
/// all point at a single fictitious sink. Construction validates the model
/// (reachability of every state, action targets in range, reward means in
/// [0,1]) and freezes it; instances are immutable afterwards and safe to
/// share across threads.
class DeterministicMdp {
 public:
  DeterministicMdp(std::vector<StageSpec> stages, RewardModel reward);

  int horizon() const { return horizon_; }
  const RewardModel& reward_model() const { return reward_; }

  int num_nodes() const { return num_nodes_; }  // excludes the sink
  int num_arcs() const { return num_arcs_; }    // N

  int num_states(int stage) const {
    return static_cast<int>(stages_[stage].states.size());
  }
  const StateSpec& state(int stage, int s) const {
    return stages_[stage].states[s];
  }
  int num_actions(int stage, int s) const {
    return static_cast<int>(stages_[stage].states[s].actions.size());
  }

  // Flat node ids, stage-major. The sink is not a node.
  int node_index(int stage, int s) const { return node_offset_[stage] + s; }
  int node_stage(int node) const { return node_stage_[node]; }
  int node_state(int node) const { return node_state_[node]; }
  int source_node() const { return 0; }

  // Flat arc ids, grouped by node then action index.
  int arc_index(int node, int a) const { return arc_offset_[node] + a; }
  int arc_begin(int node) const { return arc_offset_[node]; }
  int arc_end(int node) const { return arc_offset_[node] + arc_degree_[node]; }
  int arc_node(int arc) const { return arc_node_[arc]; }
  int arc_stage(int arc) const { return node_stage_[arc_node_[arc]]; }
  int arc_action(int arc) const { return arc_action_[arc]; }
  /// Flat id of the head node, or -1 when the arc enters the sink.
  int arc_head(int arc) const { return arc_head_[arc]; }
  double arc_mean(int arc) const { return arc_mean_[arc]; }
  const std::vector<double>& arc_means() const { return arc_mean_; }

  const std::vector<int>& incoming_arcs(int node) const {
    return incoming_[node];
  }

  std::string node_key(int node) const;  // "h/state_id", 1-based stage
  std::string arc_key(int arc) const;    // "h/state_id/action_label"
  /// Resolves an "h/state/action" key to a flat arc id; throws on unknown.
  int arc_from_key(const std::string& key) const;

  const std::vector<StageSpec>& stages() const { return stages_; }

 private:
  int horizon_;
  RewardModel reward_;
  std::vector<StageSpec> stages_;

  int num_nodes_ = 0;
  int num_arcs_ = 0;
  std::vector<int> node_offset_;
  std::vector<int32_t> node_stage_, node_state_;
  std::vector<int> arc_offset_;
  std::vector<int32_t> arc_degree_;
  std::vector<int32_t> arc_node_, arc_action_, arc_head_;
  std::vector<double> arc_mean_;
  std::vector<std::vector<int>> incoming_;
};

/// Stage-state -> action table. Actions are stored for every node, so a
/// policy is defined even at states its own trajectory never reaches.
struct Policy {
  std::vector<int32_t> actions;  // indexed by flat node id
};

/// Checks pi_h(s) in A_h(s) for every node; throws std::invalid_argument.
void validate_policy(const DeterministicMdp& mdp, const Policy& policy);

struct Trajectory {
  std::vector<int> nodes;  // one node per stage, starting at the source
  std::vector<int> arcs;   // one arc per stage
};

/// Executes a policy from the initial state; the result has length H.
Trajectory rollout(const DeterministicMdp& mdp, const Policy& policy);

/// Per-arc action subsets with the empty-set convention: a state whose subset
/// is empty places no restriction (all of its actions are allowed). This is
/// the mask type used by every constrained dynamic program.
class ActionMask {
 public:
  /// All actions allowed everywhere.
  explicit ActionMask(const DeterministicMdp& mdp);

  bool raw(int arc) const { return flags_[arc] != 0; }
  bool allowed(const DeterministicMdp& mdp, int arc) const {
    return flags_[arc] != 0 || count_[mdp.arc_node(arc)] == 0;
  }
  int count(int node) const { return count_[node]; }

  void remove(const DeterministicMdp& mdp, int arc);

  const std::vector<uint8_t>& flags() const { return flags_; }

 private:
  std::vector<uint8_t> flags_;  // per arc
  std::vector<int32_t> count_;  // active actions per node
};

/// V over nodes and Q over arcs for one policy or the Bellman optimum;
/// V at the sink is identically zero and kept implicit.
struct ValueTable {
  std::vector<double> v;  // per node
  std::vector<double> q;  // per arc
};

ValueTable optimal_values(const DeterministicMdp& mdp);
ValueTable policy_values(const DeterministicMdp& mdp, const Policy& policy);

/// Greedy policy for a value table; argmax ties break toward the lowest
/// action index.
Policy greedy_policy(const DeterministicMdp& mdp, const ValueTable& values);

/// max over allowed actions of weights[arc] + suffix[head], per node.
/// Always finite: the mask convention guarantees at least one allowed action.
std::vector<double> best_suffix(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights,
                                const ActionMask& mask);
std::vector<double> best_suffix(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights);

/// Best achievable weight-sum from the source to each node under the mask;
/// nodes unreachable through allowed actions carry the -inf sentinel.
std::vector<ExtReal> best_prefix(const DeterministicMdp& mdp,
                                 const std::vector<double>& arc_weights,
                                 const ActionMask& mask);
std::vector<ExtReal> best_prefix(const DeterministicMdp& mdp,
                                 const std::vector<double>& arc_weights);

/// Argmax policy of a suffix table (ties to lowest action index).
Policy suffix_policy(const DeterministicMdp& mdp,
                     const std::vector<double>& arc_weights,
                     const std::vector<double>& suffix, const ActionMask& mask);

/// Best weight-sum over policies forced through arc (s,a,h) while respecting
/// the mask. Returns the -inf sentinel when no masked policy visits the arc.
ExtReal constrained_best_return(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights,
                                int arc, const ActionMask& mask);
ExtReal constrained_best_return(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights,
                                int arc);

/// True iff every node at stages 2..H has exactly one incoming arc (the sink
/// is excluded from the check).
bool is_tree_based(const DeterministicMdp& mdp);

}  // namespace detpac

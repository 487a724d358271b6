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

#include "detpac/mdp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace detpac {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

DeterministicMdp::DeterministicMdp(std::vector<StageSpec> stages,
                                   RewardModel reward)
    : horizon_(static_cast<int>(stages.size())),
      reward_(reward),
      stages_(std::move(stages)) {
  if (horizon_ < 1) fail("mdp: horizon must be positive");
  if (stages_[0].states.size() != 1)
    fail("mdp: stage 1 must contain exactly the initial state");
  if (reward_.is_gaussian() && !(reward_.sigma2 > 0.0))
    fail("mdp: gaussian variance must be positive");

  node_offset_.resize(horizon_ + 1, 0);
  for (int h = 0; h < horizon_; ++h) {
    if (stages_[h].states.empty()) fail("mdp: empty stage");
    node_offset_[h + 1] =
        node_offset_[h] + static_cast<int>(stages_[h].states.size());
  }
  num_nodes_ = node_offset_[horizon_];

  node_stage_.resize(num_nodes_);
  node_state_.resize(num_nodes_);
  arc_offset_.resize(num_nodes_ + 1, 0);
  arc_degree_.resize(num_nodes_, 0);
  for (int h = 0; h < horizon_; ++h) {
    for (int s = 0; s < num_states(h); ++s) {
      const int node = node_index(h, s);
      node_stage_[node] = h;
      node_state_[node] = s;
      const auto& actions = stages_[h].states[s].actions;
      if (actions.empty())
        fail("mdp: state '" + stages_[h].states[s].id + "' at stage " +
             std::to_string(h + 1) + " has no actions");
      arc_degree_[node] = static_cast<int32_t>(actions.size());
    }
  }
  for (int node = 0; node < num_nodes_; ++node)
    arc_offset_[node + 1] = arc_offset_[node] + arc_degree_[node];
  num_arcs_ = arc_offset_[num_nodes_];

  // Ids and labels feed the "h/state/action" key interface: they must be
  // nonempty, slash-free, and unambiguous.
  for (int h = 0; h < horizon_; ++h) {
    std::set<std::string> ids;
    for (const auto& st : stages_[h].states) {
      if (st.id.empty() || st.id.find('/') != std::string::npos)
        fail("mdp: state id '" + st.id + "' must be nonempty and slash-free");
      if (!ids.insert(st.id).second)
        fail("mdp: duplicate state id '" + st.id + "' at stage " +
             std::to_string(h + 1));
      std::set<std::string> labels;
      for (const auto& a : st.actions) {
        if (a.label.empty() || a.label.find('/') != std::string::npos)
          fail("mdp: action label '" + a.label +
               "' must be nonempty and slash-free");
        if (!labels.insert(a.label).second)
          fail("mdp: duplicate action label '" + a.label + "' at state '" +
               st.id + "'");
      }
    }
  }

  arc_node_.resize(num_arcs_);
  arc_action_.resize(num_arcs_);
  arc_head_.resize(num_arcs_);
  arc_mean_.resize(num_arcs_);
  incoming_.resize(num_nodes_);

  for (int node = 0; node < num_nodes_; ++node) {
    const int h = node_stage_[node];
    const auto& actions = stages_[h].states[node_state_[node]].actions;
    for (int a = 0; a < static_cast<int>(actions.size()); ++a) {
      const int arc = arc_index(node, a);
      arc_node_[arc] = node;
      arc_action_[arc] = a;
      const double mean = actions[a].mean_reward;
      if (!(mean >= 0.0 && mean <= 1.0))
        fail("mdp: mean reward out of [0,1] at arc " +
             stages_[h].states[node_state_[node]].id + "/" + actions[a].label);
      arc_mean_[arc] = mean;
      if (h + 1 < horizon_) {
        const int next = actions[a].next_state;
        if (next < 0 || next >= num_states(h + 1))
          fail("mdp: action '" + actions[a].label + "' of state '" +
               stages_[h].states[node_state_[node]].id +
               "' targets an unknown state at stage " + std::to_string(h + 2));
        const int head = node_index(h + 1, next);
        arc_head_[arc] = head;
        incoming_[head].push_back(arc);
      } else {
        arc_head_[arc] = -1;  // sink
      }
    }
  }

  // Reachability: every state beyond the first stage needs an incoming arc.
  for (int node = num_states(0); node < num_nodes_; ++node) {
    if (incoming_[node].empty())
      fail("mdp: state '" + stages_[node_stage_[node]].states[node_state_[node]].id +
           "' at stage " + std::to_string(node_stage_[node] + 1) +
           " is unreachable");
  }
}

std::string DeterministicMdp::node_key(int node) const {
  const int h = node_stage_[node];
  return std::to_string(h + 1) + "/" + stages_[h].states[node_state_[node]].id;
}

std::string DeterministicMdp::arc_key(int arc) const {
  const int node = arc_node_[arc];
  const int h = node_stage_[node];
  const auto& st = stages_[h].states[node_state_[node]];
  return std::to_string(h + 1) + "/" + st.id + "/" +
         st.actions[arc_action_[arc]].label;
}

int DeterministicMdp::arc_from_key(const std::string& key) const {
  const auto p1 = key.find('/');
  const auto p2 = key.find('/', p1 == std::string::npos ? p1 : p1 + 1);
  if (p1 == std::string::npos || p2 == std::string::npos)
    fail("arc key '" + key + "' is not of the form h/state/action");
  int h = 0;
  try {
    h = std::stoi(key.substr(0, p1));
  } catch (const std::exception&) {
    fail("arc key '" + key + "' has a non-numeric stage");
  }
  if (h < 1 || h > horizon_) fail("arc key '" + key + "' stage out of range");
  const std::string state_id = key.substr(p1 + 1, p2 - p1 - 1);
  const std::string label = key.substr(p2 + 1);
  for (int s = 0; s < num_states(h - 1); ++s) {
    const auto& st = stages_[h - 1].states[s];
    if (st.id != state_id) continue;
    for (int a = 0; a < static_cast<int>(st.actions.size()); ++a) {
      if (st.actions[a].label == label)
        return arc_index(node_index(h - 1, s), a);
    }
    fail("arc key '" + key + "': state has no action '" + label + "'");
  }
  fail("arc key '" + key + "': no state '" + state_id + "' at stage " +
       std::to_string(h));
}

void validate_policy(const DeterministicMdp& mdp, const Policy& policy) {
  if (static_cast<int>(policy.actions.size()) != mdp.num_nodes())
    fail("policy: wrong table size");
  for (int node = 0; node < mdp.num_nodes(); ++node) {
    const int a = policy.actions[node];
    if (a < 0 || a >= mdp.arc_end(node) - mdp.arc_begin(node))
      fail("policy: action out of range at node " + mdp.node_key(node));
  }
}

Trajectory rollout(const DeterministicMdp& mdp, const Policy& policy) {
  validate_policy(mdp, policy);
  Trajectory traj;
  traj.nodes.reserve(mdp.horizon());
  traj.arcs.reserve(mdp.horizon());
  int node = mdp.source_node();
  for (int h = 0; h < mdp.horizon(); ++h) {
    const int arc = mdp.arc_index(node, policy.actions[node]);
    traj.nodes.push_back(node);
    traj.arcs.push_back(arc);
    node = mdp.arc_head(arc);
  }
  return traj;
}

ActionMask::ActionMask(const DeterministicMdp& mdp)
    : flags_(mdp.num_arcs(), 1), count_(mdp.num_nodes()) {
  for (int node = 0; node < mdp.num_nodes(); ++node)
    count_[node] = mdp.arc_end(node) - mdp.arc_begin(node);
}

void ActionMask::remove(const DeterministicMdp& mdp, int arc) {
  if (flags_[arc]) {
    flags_[arc] = 0;
    --count_[mdp.arc_node(arc)];
  }
}

namespace {

ValueTable backward_induction(const DeterministicMdp& mdp,
                              const Policy* policy) {
  ValueTable t;
  t.v.assign(mdp.num_nodes(), 0.0);
  t.q.assign(mdp.num_arcs(), 0.0);
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    for (int s = 0; s < mdp.num_states(h); ++s) {
      const int node = mdp.node_index(h, s);
      double best = 0.0;
      bool first = true;
      for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc) {
        const int head = mdp.arc_head(arc);
        const double q = mdp.arc_mean(arc) + (head >= 0 ? t.v[head] : 0.0);
        t.q[arc] = q;
        if (first || q > best) {
          best = q;
          first = false;
        }
      }
      if (policy != nullptr)
        best = t.q[mdp.arc_index(node, policy->actions[node])];
      t.v[node] = best;
    }
  }
  return t;
}

}  // namespace

ValueTable optimal_values(const DeterministicMdp& mdp) {
  return backward_induction(mdp, nullptr);
}

ValueTable policy_values(const DeterministicMdp& mdp, const Policy& policy) {
  validate_policy(mdp, policy);
  return backward_induction(mdp, &policy);
}

Policy greedy_policy(const DeterministicMdp& mdp, const ValueTable& values) {
  Policy p;
  p.actions.resize(mdp.num_nodes());
  for (int node = 0; node < mdp.num_nodes(); ++node) {
    int best_a = 0;
    double best = values.q[mdp.arc_begin(node)];
    for (int arc = mdp.arc_begin(node) + 1; arc < mdp.arc_end(node); ++arc) {
      if (values.q[arc] > best) {
        best = values.q[arc];
        best_a = arc - mdp.arc_begin(node);
      }
    }
    p.actions[node] = best_a;
  }
  return p;
}

std::vector<double> best_suffix(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights,
                                const ActionMask& mask) {
  std::vector<double> suffix(mdp.num_nodes(), 0.0);
  for (int h = mdp.horizon() - 1; h >= 0; --h) {
    for (int s = 0; s < mdp.num_states(h); ++s) {
      const int node = mdp.node_index(h, s);
      double best = 0.0;
      bool first = true;
      for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc) {
        if (!mask.allowed(mdp, arc)) continue;
        const int head = mdp.arc_head(arc);
        const double v = arc_weights[arc] + (head >= 0 ? suffix[head] : 0.0);
        if (first || v > best) {
          best = v;
          first = false;
        }
      }
      suffix[node] = best;
    }
  }
  return suffix;
}

std::vector<double> best_suffix(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights) {
  return best_suffix(mdp, arc_weights, ActionMask(mdp));
}

std::vector<ExtReal> best_prefix(const DeterministicMdp& mdp,
                                 const std::vector<double>& arc_weights,
                                 const ActionMask& mask) {
  std::vector<ExtReal> prefix(mdp.num_nodes(), ExtReal::neg_inf());
  prefix[mdp.source_node()] = ExtReal(0.0);
  for (int node = 0; node < mdp.num_nodes(); ++node) {
    if (prefix[node].is_neg_inf()) continue;
    for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc) {
      if (!mask.allowed(mdp, arc)) continue;
      const int head = mdp.arc_head(arc);
      if (head < 0) continue;
      prefix[head] = ExtReal::max(prefix[head], prefix[node] + arc_weights[arc]);
    }
  }
  return prefix;
}

std::vector<ExtReal> best_prefix(const DeterministicMdp& mdp,
                                 const std::vector<double>& arc_weights) {
  return best_prefix(mdp, arc_weights, ActionMask(mdp));
}

Policy suffix_policy(const DeterministicMdp& mdp,
                     const std::vector<double>& arc_weights,
                     const std::vector<double>& suffix,
                     const ActionMask& mask) {
  Policy p;
  p.actions.resize(mdp.num_nodes());
  for (int node = 0; node < mdp.num_nodes(); ++node) {
    int best_a = -1;
    double best = 0.0;
    for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc) {
      if (!mask.allowed(mdp, arc)) continue;
      const int head = mdp.arc_head(arc);
      const double v = arc_weights[arc] + (head >= 0 ? suffix[head] : 0.0);
      if (best_a < 0 || v > best) {
        best = v;
        best_a = arc - mdp.arc_begin(node);
      }
    }
    p.actions[node] = best_a;
  }
  return p;
}

ExtReal constrained_best_return(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights,
                                int arc, const ActionMask& mask) {
  if (!mask.allowed(mdp, arc)) return ExtReal::neg_inf();
  const auto prefix = best_prefix(mdp, arc_weights, mask);
  const auto suffix = best_suffix(mdp, arc_weights, mask);
  const int head = mdp.arc_head(arc);
  return prefix[mdp.arc_node(arc)] + arc_weights[arc] +
         (head >= 0 ? suffix[head] : 0.0);
}

ExtReal constrained_best_return(const DeterministicMdp& mdp,
                                const std::vector<double>& arc_weights,
                                int arc) {
  return constrained_best_return(mdp, arc_weights, arc, ActionMask(mdp));
}

bool is_tree_based(const DeterministicMdp& mdp) {
  for (int node = mdp.num_states(0); node < mdp.num_nodes(); ++node) {
    if (mdp.incoming_arcs(node).size() != 1) return false;
  }
  return true;
}

}  // namespace detpac

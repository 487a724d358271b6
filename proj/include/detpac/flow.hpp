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

#include <vector>

#include "detpac/mdp.hpp"

namespace detpac {

/// Per-arc nonnegative lower bounds (demands). Capacities are unbounded
/// throughout this module.
struct DemandFn {
  std::vector<double> lower;  // per arc

  explicit DemandFn(const DeterministicMdp& mdp)
      : lower(mdp.num_arcs(), 0.0) {}
  DemandFn() = default;

  double total() const;
  /// max over stages of the stage demand sum (the layer-cut value).
  double max_stage_sum(const DeterministicMdp& mdp) const;
};

/// Nonnegative arc allocation satisfying conservation at internal nodes.
struct Flow {
  std::vector<double> eta;  // per arc

  /// Total outflow of the source node.
  double value(const DeterministicMdp& mdp) const;
  /// True when every arc value is within tol of an integer.
  bool is_integral(double tol = 1e-9) const;
};

/// Conservation residual must stay below tol at every internal node.
void validate_flow(const DeterministicMdp& mdp, const Flow& flow,
                   double tol = 1e-9);

/// Source-containing node subset, sink excluded.
struct Cut {
  std::vector<uint8_t> in_cut;  // per node

  std::vector<int> forward_arcs(const DeterministicMdp& mdp) const;
  bool has_backward_arcs(const DeterministicMdp& mdp) const;
};

/// Demand sum over the cut's forward arcs. Throws on cuts with backward
/// arcs (their value is minus infinity and they never certify anything).
double cut_value(const DeterministicMdp& mdp, const Cut& cut,
                 const DemandFn& demand);

/// Feasible (not minimal) flow: each demanded arc gets its demand routed
/// along one source->arc->sink path. Integral for integral demands.
Flow initial_feasible_flow(const DeterministicMdp& mdp, const DemandFn& demand);

struct MinFlowResult {
  Flow flow;
  Cut cut;
  double value = 0.0;
};

/// Minimum flow with lower bounds on the layered DAG of the MDP, plus the
/// certifying maximum cut (nodes reachable from the source in the final
/// residual graph). Decreasing paths are found breadth-first, so the solver
/// terminates in polynomially many augmentations for real-valued demands
/// too; integral demands yield an integral flow.
MinFlowResult min_flow(const DeterministicMdp& mdp, const DemandFn& demand);

/// phi*(demand): value of the minimum flow.
double min_flow_value(const DeterministicMdp& mdp, const DemandFn& demand);

/// Peels an integral flow into value(flow) trajectories by repeatedly
/// walking argmax-flow actions from the source (ties to the lowest action
/// index) and decrementing. Off-trajectory entries of each policy default to
/// action 0. Throws on non-integral input.
std::vector<Policy> extract_policy_cover(const DeterministicMdp& mdp,
                                         Flow flow);

}  // namespace detpac

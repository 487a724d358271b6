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

#include "detpac/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace detpac {

namespace {

constexpr double kResidualTol = 1e-12;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

double DemandFn::total() const {
  double s = 0.0;
  for (double d : lower) s += d;
  return s;
}

double DemandFn::max_stage_sum(const DeterministicMdp& mdp) const {
  std::vector<double> per_stage(mdp.horizon(), 0.0);
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    per_stage[mdp.arc_stage(arc)] += lower[arc];
  return *std::max_element(per_stage.begin(), per_stage.end());
}

double Flow::value(const DeterministicMdp& mdp) const {
  double v = 0.0;
  const int src = mdp.source_node();
  for (int arc = mdp.arc_begin(src); arc < mdp.arc_end(src); ++arc)
    v += eta[arc];
  return v;
}

bool Flow::is_integral(double tol) const {
  for (double e : eta) {
    if (std::abs(e - std::round(e)) > tol) return false;
  }
  return true;
}

void validate_flow(const DeterministicMdp& mdp, const Flow& flow, double tol) {
  if (static_cast<int>(flow.eta.size()) != mdp.num_arcs())
    fail("flow: wrong arc count");
  for (double e : flow.eta)
    if (e < -tol) fail("flow: negative arc value");
  for (int node = mdp.num_states(0); node < mdp.num_nodes(); ++node) {
    double in = 0.0, out = 0.0;
    for (int arc : mdp.incoming_arcs(node)) in += flow.eta[arc];
    for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc)
      out += flow.eta[arc];
    if (std::abs(in - out) > tol)
      fail("flow: conservation violated at " + mdp.node_key(node));
  }
}

std::vector<int> Cut::forward_arcs(const DeterministicMdp& mdp) const {
  std::vector<int> arcs;
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const int head = mdp.arc_head(arc);
    if (in_cut[mdp.arc_node(arc)] && (head < 0 || !in_cut[head]))
      arcs.push_back(arc);
  }
  return arcs;
}

bool Cut::has_backward_arcs(const DeterministicMdp& mdp) const {
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const int head = mdp.arc_head(arc);
    if (head >= 0 && in_cut[head] && !in_cut[mdp.arc_node(arc)]) return true;
  }
  return false;
}

double cut_value(const DeterministicMdp& mdp, const Cut& cut,
                 const DemandFn& demand) {
  if (static_cast<int>(cut.in_cut.size()) != mdp.num_nodes())
    fail("cut: wrong node count");
  if (!cut.in_cut[mdp.source_node()]) fail("cut: must contain the source");
  if (cut.has_backward_arcs(mdp))
    fail("cut: has backward arcs, value would be -inf");
  double v = 0.0;
  for (int arc : cut.forward_arcs(mdp)) v += demand.lower[arc];
  return v;
}

Flow initial_feasible_flow(const DeterministicMdp& mdp,
                           const DemandFn& demand) {
  if (static_cast<int>(demand.lower.size()) != mdp.num_arcs())
    fail("demand: wrong arc count");
  for (double d : demand.lower)
    if (d < 0.0) fail("demand: negative lower bound");

  // One fixed arc towards the source and one towards the sink per node.
  std::vector<int> up(mdp.num_nodes(), -1);
  for (int node = mdp.num_states(0); node < mdp.num_nodes(); ++node)
    up[node] = mdp.incoming_arcs(node).front();

  Flow flow;
  flow.eta.assign(mdp.num_arcs(), 0.0);
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const double d = demand.lower[arc];
    if (d <= 0.0) continue;
    flow.eta[arc] += d;
    for (int node = mdp.arc_node(arc); node != mdp.source_node();) {
      const int in_arc = up[node];
      flow.eta[in_arc] += d;
      node = mdp.arc_node(in_arc);
    }
    for (int node = mdp.arc_head(arc); node >= 0;) {
      const int out_arc = mdp.arc_begin(node);
      flow.eta[out_arc] += d;
      node = mdp.arc_head(out_arc);
    }
  }
  return flow;
}

MinFlowResult min_flow(const DeterministicMdp& mdp, const DemandFn& demand) {
  Flow flow = initial_feasible_flow(mdp, demand);

  const int sink = mdp.num_nodes();
  std::vector<int> parent_arc(mdp.num_nodes() + 1);
  std::vector<int8_t> parent_dir(mdp.num_nodes() + 1);  // +1 fwd, -1 bwd
  std::vector<uint8_t> seen(mdp.num_nodes() + 1);

  // Breadth-first decreasing path: forward residual eta - lower, backward
  // residual unbounded. The source has no incoming arcs, so every decreasing
  // path contains at least one forward arc and the bottleneck is positive.
  const auto find_path = [&]() -> bool {
    std::fill(seen.begin(), seen.end(), 0);
    std::deque<int> queue;
    queue.push_back(mdp.source_node());
    seen[mdp.source_node()] = 1;
    while (!queue.empty()) {
      const int node = queue.front();
      queue.pop_front();
      if (node == sink) return true;
      for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc) {
        if (flow.eta[arc] - demand.lower[arc] <= kResidualTol) continue;
        const int head = mdp.arc_head(arc);
        const int to = head < 0 ? sink : head;
        if (seen[to]) continue;
        seen[to] = 1;
        parent_arc[to] = arc;
        parent_dir[to] = 1;
        queue.push_back(to);
      }
      for (int arc : mdp.incoming_arcs(node)) {
        const int to = mdp.arc_node(arc);
        if (seen[to]) continue;
        seen[to] = 1;
        parent_arc[to] = arc;
        parent_dir[to] = -1;
        queue.push_back(to);
      }
    }
    return false;
  };

  while (find_path()) {
    double bottleneck = std::numeric_limits<double>::infinity();
    for (int node = sink; node != mdp.source_node();) {
      const int arc = parent_arc[node];
      if (parent_dir[node] > 0) {
        bottleneck = std::min(bottleneck, flow.eta[arc] - demand.lower[arc]);
        node = mdp.arc_node(arc);
      } else {
        node = mdp.arc_head(arc) < 0 ? sink : mdp.arc_head(arc);
      }
    }
    for (int node = sink; node != mdp.source_node();) {
      const int arc = parent_arc[node];
      if (parent_dir[node] > 0) {
        flow.eta[arc] -= bottleneck;
        if (std::abs(flow.eta[arc] - demand.lower[arc]) < kResidualTol)
          flow.eta[arc] = demand.lower[arc];
        node = mdp.arc_node(arc);
      } else {
        flow.eta[arc] += bottleneck;
        node = mdp.arc_head(arc) < 0 ? sink : mdp.arc_head(arc);
      }
    }
  }

  MinFlowResult result;
  result.cut.in_cut.assign(mdp.num_nodes(), 0);
  for (int node = 0; node < mdp.num_nodes(); ++node)
    result.cut.in_cut[node] = seen[node];
  result.value = flow.value(mdp);
  result.flow = std::move(flow);

  const double psi = cut_value(mdp, result.cut, demand);
  if (std::abs(psi - result.value) > 1e-9 * std::max(1.0, result.value))
    throw std::logic_error("min_flow: duality gap between flow and cut");
  return result;
}

double min_flow_value(const DeterministicMdp& mdp, const DemandFn& demand) {
  return min_flow(mdp, demand).value;
}

std::vector<Policy> extract_policy_cover(const DeterministicMdp& mdp,
                                         Flow flow) {
  if (!flow.is_integral())
    fail("extract_policy_cover: flow is not integral");
  validate_flow(mdp, flow);

  std::vector<long long> eta(flow.eta.size());
  for (size_t i = 0; i < eta.size(); ++i)
    eta[i] = std::llround(flow.eta[i]);

  long long remaining = 0;
  const int src = mdp.source_node();
  for (int arc = mdp.arc_begin(src); arc < mdp.arc_end(src); ++arc)
    remaining += eta[arc];

  std::vector<Policy> cover;
  while (remaining > 0) {
    Policy policy;
    policy.actions.assign(mdp.num_nodes(), 0);
    int node = src;
    for (int h = 0; h < mdp.horizon(); ++h) {
      int best_arc = -1;
      for (int arc = mdp.arc_begin(node); arc < mdp.arc_end(node); ++arc) {
        if (best_arc < 0 || eta[arc] > eta[best_arc]) best_arc = arc;
      }
      if (eta[best_arc] <= 0)
        throw std::logic_error("extract_policy_cover: stuck walk");
      policy.actions[node] = best_arc - mdp.arc_begin(node);
      --eta[best_arc];
      node = mdp.arc_head(best_arc);
    }
    cover.push_back(std::move(policy));
    --remaining;
  }
  return cover;
}

}  // namespace detpac

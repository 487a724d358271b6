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

#include "detpac/gaps.hpp"

#include <algorithm>
#include <limits>

namespace detpac {

GapTable compute_gaps(const DeterministicMdp& mdp) {
  GapTable t;
  const auto opt = optimal_values(mdp);
  t.optimal_return = opt.v[mdp.source_node()];

  t.value_gap.resize(mdp.num_arcs());
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    t.value_gap[arc] = std::max(0.0, opt.v[mdp.arc_node(arc)] - opt.q[arc]);

  // Best return through each arc = best prefix + arc reward + best suffix.
  // The suffix of the optimal table and an unconstrained prefix suffice.
  const auto prefix = best_prefix(mdp, mdp.arc_means());
  t.det_return_gap.resize(mdp.num_arcs());
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const int head = mdp.arc_head(arc);
    const double through = prefix[mdp.arc_node(arc)].value() +
                           mdp.arc_mean(arc) + (head >= 0 ? opt.v[head] : 0.0);
    t.det_return_gap[arc] = std::max(0.0, t.optimal_return - through);
  }

  const double inf = std::numeric_limits<double>::infinity();
  t.stage_min_positive.assign(mdp.horizon(), inf);
  t.stage_zero_count.assign(mdp.horizon(), 0);
  t.global_min_positive = inf;
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const int h = mdp.arc_stage(arc);
    const double g = t.det_return_gap[arc];
    if (g <= kGapZeroTol) {
      ++t.stage_zero_count[h];
    } else {
      t.stage_min_positive[h] = std::min(t.stage_min_positive[h], g);
      t.global_min_positive = std::min(t.global_min_positive, g);
    }
  }
  t.unique_optimal_trajectory = true;
  for (int h = 0; h < mdp.horizon(); ++h) {
    if (t.stage_zero_count[h] != 1) {
      t.unique_optimal_trajectory = false;
      break;
    }
  }
  return t;
}

double policy_gap(const DeterministicMdp& mdp, const Policy& policy) {
  const auto opt = optimal_values(mdp);
  const auto val = policy_values(mdp, policy);
  return opt.v[mdp.source_node()] - val.v[mdp.source_node()];
}

}  // namespace detpac

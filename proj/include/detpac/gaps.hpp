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

/// Gaps below this threshold count as zero when classifying arcs as optimal;
/// absorbs floating noise from summing rewards along different paths.
inline constexpr double kGapZeroTol = 1e-9;

/// All four gap notions for one MDP, from exact dynamic programming.
///
/// value_gap is V*_h(s) - Q*_h(s,a); det_return_gap is the optimal return
/// minus the best return of any policy forced through the arc. An arc has
/// det_return_gap zero exactly when some optimal policy visits it.
struct GapTable {
  std::vector<double> value_gap;       // per arc
  std::vector<double> det_return_gap;  // per arc
  double optimal_return = 0.0;

  /// Per stage: smallest positive det_return_gap, +inf when the stage has
  /// none (every arc there lies on an optimal trajectory).
  std::vector<double> stage_min_positive;
  /// Per stage: number of arcs with det_return_gap == 0.
  std::vector<int> stage_zero_count;

  /// True when exactly one arc per stage is gap-free, i.e. all optimal
  /// policies share a single trajectory.
  bool unique_optimal_trajectory = false;
  /// Smallest positive det_return_gap over all arcs (+inf when none).
  double global_min_positive = 0.0;

  /// Return gap: det_return_gap scaled by 1/H.
  double return_gap(const DeterministicMdp& mdp, int arc) const {
    return det_return_gap[arc] / mdp.horizon();
  }

  /// Global gap floor under the unique-optimal-trajectory convention:
  /// the minimum positive gap when the optimal trajectory is unique, zero
  /// otherwise.
  double delta_min() const {
    return unique_optimal_trajectory ? global_min_positive : 0.0;
  }
};

GapTable compute_gaps(const DeterministicMdp& mdp);

/// Policy gap: optimal return minus the policy's return.
double policy_gap(const DeterministicMdp& mdp, const Policy& policy);

}  // namespace detpac

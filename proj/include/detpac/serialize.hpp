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

#include <string>

#include <json.hpp>

#include "detpac/flow.hpp"
#include "detpac/gaps.hpp"
#include "detpac/instances.hpp"
#include "detpac/learner.hpp"
#include "detpac/mdp.hpp"

namespace detpac {

// Instance files:
// {horizon, reward_kind: "bernoulli" | {"gaussian": sigma2},
//  stages: [{states: [{id, actions: [{label, next_state, mean_reward}]}]}]}
// Stage-H actions point at the implicit sink; their next_state is emitted as
// "sink" and, when present on input, must be "sink".
nlohmann::json mdp_to_json(const DeterministicMdp& mdp);
DeterministicMdp mdp_from_json(const nlohmann::json& j);

// Demands, flows and per-arc tables use a flat map keyed "h/state/action".
nlohmann::json demand_to_json(const DeterministicMdp& mdp,
                              const DemandFn& demand);
DemandFn demand_from_json(const DeterministicMdp& mdp,
                          const nlohmann::json& j);

nlohmann::json flow_to_json(const DeterministicMdp& mdp, const Flow& flow);
nlohmann::json cut_to_json(const DeterministicMdp& mdp, const Cut& cut,
                           const DemandFn& demand);
nlohmann::json policy_to_json(const DeterministicMdp& mdp,
                              const Policy& policy);
Policy policy_from_json(const DeterministicMdp& mdp, const nlohmann::json& j);

nlohmann::json gap_table_to_json(const DeterministicMdp& mdp,
                                 const GapTable& gaps);
nlohmann::json lower_bound_report_to_json(const DeterministicMdp& mdp,
                                          const LowerBoundReport& report);
nlohmann::json run_result_to_json(const DeterministicMdp& mdp,
                                  const RunResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Fixed-format double for byte-stable CSV output.
std::string format_double(double v);

}  // namespace detpac

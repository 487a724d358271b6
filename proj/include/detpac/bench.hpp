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
#include <vector>

#include <json.hpp>

#include "detpac/learner.hpp"
#include "detpac/mdp.hpp"

namespace detpac {

struct ExperimentConfig {
  std::string rule = "max-diameter";
  double eps = 0.1;
  double delta = 0.1;
  int64_t trials = 1;
  uint64_t seed = 1;
  int64_t budget = 10'000'000;
  int64_t elim_period = 1;

  void validate() const;
};

/// Runs `trials` independent learner runs with per-trial RNG streams split
/// from the master seed. Trials execute in parallel (capped by the
/// DETPAC_THREADS environment variable); results are indexed by trial, so
/// aggregation does not depend on scheduling.
std::vector<RunResult> run_batch(const DeterministicMdp& mdp,
                                 const ExperimentConfig& config);

/// CSV with a versioned header comment. Schema (one row per trial):
///   seed, rule, eps, delta, tau, stop_rule, subopt, good_event
std::string batch_to_csv(const std::vector<RunResult>& batch);

struct CsvRow {
  uint64_t seed;
  std::string rule;
  double eps, delta;
  int64_t tau;
  std::string stop_rule;
  double subopt;
  bool good_event;
};

std::vector<CsvRow> parse_batch_csv(const std::string& csv);

struct BatchSummary {
  std::string rule;
  double eps = 0.0, delta = 0.0;
  int64_t trials = 0;
  double mean_tau = 0.0, median_tau = 0.0, p95_tau = 0.0;
  double failure_rate = 0.0;     // fraction of trials with subopt > eps
  double good_event_freq = 0.0;
  double mean_subopt = 0.0;
  int64_t budget_exceeded = 0;
  // Coverage diagnostics (zero periods => ratio stays 0).
  double max_period_duration_ratio = 0.0;  // d_k / (2 phi* C_H) over periods
  int64_t cover_property_violations = 0;   // periods with n_min < k-1
  double phi_star_sigma2_1 = 0.0;          // visit-bound min flow, sigma2=1
  double phi_star_sigma2_quarter = 0.0;
};

BatchSummary summarize(const DeterministicMdp& mdp,
                       const ExperimentConfig& config,
                       const std::vector<RunResult>& batch);

nlohmann::json batch_summary_to_json(const BatchSummary& summary);

}  // namespace detpac

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

#include "detpac/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "detpac/instances.hpp"
#include "detpac/sampling.hpp"
#include "detpac/serialize.hpp"

namespace detpac {

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("config: delta must be in (0,1)");
  if (budget < 1) throw std::invalid_argument("config: budget must be >= 1");
  if (elim_period < 1)
    throw std::invalid_argument("config: elim-period must be >= 1");
  make_sampling_rule(rule);  // throws on unknown names
}

namespace {

int worker_count(int64_t trials) {
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (const char* env = std::getenv("DETPAC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) workers = std::min(workers, cap);
  }
  return static_cast<int>(std::min<int64_t>(workers, trials));
}

double nearest_rank(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<int64_t>(values.size());
  const auto rank =
      std::max<int64_t>(1, static_cast<int64_t>(std::ceil(q * n)));
  return values[std::min(rank, n) - 1];
}

}  // namespace

std::vector<RunResult> run_batch(const DeterministicMdp& mdp,
                                 const ExperimentConfig& config) {
  config.validate();
  std::vector<RunResult> results(config.trials);
  RunConfig rc;
  rc.max_episodes = config.budget;
  rc.elim_period = config.elim_period;

  std::atomic<int64_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const int64_t trial = next.fetch_add(1);
      if (trial >= config.trials) return;
      const auto rule = make_sampling_rule(config.rule);
      const uint64_t seed = Rng::for_trial(config.seed, trial).next_u64();
      results[trial] =
          run_learner(mdp, *rule, config.eps, config.delta, seed, rc);
    }
  };

  const int workers = worker_count(config.trials);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return results;
}

std::string batch_to_csv(const std::vector<RunResult>& batch) {
  std::ostringstream out;
  out << "# detpac-bench-csv v1\n";
  out << "seed,rule,eps,delta,tau,stop_rule,subopt,good_event\n";
  for (const auto& r : batch) {
    out << r.seed << ',' << r.rule << ',' << format_double(r.eps) << ','
        << format_double(r.delta) << ',' << r.tau << ','
        << to_string(r.stop_reason) << ',' << format_double(r.suboptimality)
        << ',' << (r.good_event ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<CsvRow> parse_batch_csv(const std::string& csv) {
  std::vector<CsvRow> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("seed,", 0) == 0) continue;
    std::istringstream ls(line);
    std::string field;
    CsvRow row;
    std::getline(ls, field, ',');
    row.seed = std::stoull(field);
    std::getline(ls, row.rule, ',');
    std::getline(ls, field, ',');
    row.eps = std::stod(field);
    std::getline(ls, field, ',');
    row.delta = std::stod(field);
    std::getline(ls, field, ',');
    row.tau = std::stoll(field);
    std::getline(ls, row.stop_rule, ',');
    std::getline(ls, field, ',');
    row.subopt = std::stod(field);
    std::getline(ls, field, ',');
    row.good_event = field == "1";
    rows.push_back(std::move(row));
  }
  return rows;
}

BatchSummary summarize(const DeterministicMdp& mdp,
                       const ExperimentConfig& config,
                       const std::vector<RunResult>& batch) {
  BatchSummary s;
  s.rule = config.rule;
  s.eps = config.eps;
  s.delta = config.delta;
  s.trials = static_cast<int64_t>(batch.size());

  std::vector<double> taus;
  taus.reserve(batch.size());
  const double coverage_factor =
      config.rule == "adaptive-max-coverage"
          ? std::log(static_cast<double>(mdp.horizon())) + 1.0
          : 1.0;
  for (const auto& r : batch) {
    taus.push_back(static_cast<double>(r.tau));
    s.mean_tau += static_cast<double>(r.tau) / batch.size();
    s.mean_subopt += r.suboptimality / batch.size();
    if (r.suboptimality > config.eps) s.failure_rate += 1.0 / batch.size();
    if (r.good_event) s.good_event_freq += 1.0 / batch.size();
    if (r.stop_reason == StopReason::kBudget) ++s.budget_exceeded;
    for (const auto& p : r.periods) {
      if (p.min_active_visits_at_start < p.k - 1)
        ++s.cover_property_violations;
      if (p.phi_star > 0.0) {
        const double ratio =
            static_cast<double>(p.duration) / (2.0 * p.phi_star * coverage_factor);
        s.max_period_duration_ratio =
            std::max(s.max_period_duration_ratio, ratio);
      }
    }
  }
  if (!taus.empty()) {
    s.median_tau = nearest_rank(taus, 0.5);
    s.p95_tau = nearest_rank(taus, 0.95);
  }
  const auto report = visit_lower_bound(mdp, config.eps, config.delta, 1.0);
  s.phi_star_sigma2_1 = report.phi_star;
  s.phi_star_sigma2_quarter = 0.25 * report.phi_star;
  return s;
}

nlohmann::json batch_summary_to_json(const BatchSummary& s) {
  return nlohmann::json{{"rule", s.rule},
                        {"eps", s.eps},
                        {"delta", s.delta},
                        {"trials", s.trials},
                        {"mean_tau", s.mean_tau},
                        {"median_tau", s.median_tau},
                        {"p95_tau", s.p95_tau},
                        {"failure_rate", s.failure_rate},
                        {"good_event_freq", s.good_event_freq},
                        {"mean_subopt", s.mean_subopt},
                        {"budget_exceeded", s.budget_exceeded},
                        {"max_period_duration_ratio",
                         s.max_period_duration_ratio},
                        {"cover_property_violations",
                         s.cover_property_violations},
                        {"phi_star_sigma2_1", s.phi_star_sigma2_1},
                        {"phi_star_sigma2_quarter", s.phi_star_sigma2_quarter}};
}

}  // namespace detpac

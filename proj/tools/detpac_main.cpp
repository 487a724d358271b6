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

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "detpac/bench.hpp"
#include "detpac/instances.hpp"
#include "detpac/sampling.hpp"
#include "detpac/serialize.hpp"

namespace {

using nlohmann::json;

detpac::DeterministicMdp load_instance(const std::string& path) {
  return detpac::mdp_from_json(json::parse(detpac::read_text_file(path)));
}

void emit(const std::string& out_path, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    detpac::write_text_file(out_path, text);
}

std::vector<double> parse_means(const std::string& csv) {
  std::vector<double> means;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) means.push_back(std::stod(item));
  return means;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elimination-based PAC identification in deterministic MDPs"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "Generate an instance file");
  detpac::InstanceSpec spec;
  std::string gen_out, gen_means;
  double gen_sigma2 = -1.0;
  bool no_crossover = false;
  gen->add_option("--kind", spec.kind,
                  "hard-worst-case | visits-vs-gap | regret-vs-bpi | "
                  "random-layered | random-tree | bandit | cover-crossover")
      ->required();
  gen->add_option("--S", spec.S, "states");
  gen->add_option("--A", spec.A, "actions");
  gen->add_option("--H", spec.H, "horizon");
  gen->add_option("--delta-gap", spec.delta_gap, "reward gap of the instance");
  gen->add_option("--branching", spec.branching, "max branching (random-tree)");
  gen->add_option("--density", spec.density, "nonzero-reward density");
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--m", spec.m, "branch width (cover-crossover)");
  gen->add_flag("--no-crossover-arc", no_crossover,
                "drop the crossover arc (cover-crossover)");
  gen->add_option("--means", gen_means, "comma-separated arm means (bandit)");
  gen->add_option("--gaussian", gen_sigma2,
                  "use Gaussian rewards with this variance");
  gen->add_option("--out", gen_out, "output path (default stdout)");

  // --- gaps ---
  auto* gaps_cmd = app.add_subcommand("gaps", "Exact gap tables");
  std::string gaps_instance, gaps_out;
  gaps_cmd->add_option("--instance", gaps_instance)->required();
  gaps_cmd->add_option("--out", gaps_out);

  // --- lb ---
  auto* lb = app.add_subcommand("lb", "Visit lower bounds and their min flow");
  std::string lb_instance, lb_out;
  double lb_eps = 0.1, lb_delta = 0.1, lb_sigma2 = 1.0;
  lb->add_option("--instance", lb_instance)->required();
  lb->add_option("--eps", lb_eps);
  lb->add_option("--delta", lb_delta);
  lb->add_option("--sigma2", lb_sigma2);
  lb->add_option("--out", lb_out);

  // --- flow ---
  auto* flow_cmd = app.add_subcommand("flow", "Minimum flow / max cut / cover");
  std::string flow_instance, flow_demand, flow_out;
  flow_cmd->add_option("--instance", flow_instance)->required();
  flow_cmd->add_option("--demand", flow_demand, "demand JSON path")->required();
  flow_cmd->add_option("--out", flow_out);

  // --- run ---
  auto* run_cmd = app.add_subcommand("run", "One seeded learner run");
  detpac::ExperimentConfig run_cfg;
  std::string run_instance, run_out;
  run_cmd->add_option("--instance", run_instance)->required();
  run_cmd->add_option("--rule", run_cfg.rule,
                      "max-diameter | max-coverage | adaptive-max-coverage");
  run_cmd->add_option("--eps", run_cfg.eps);
  run_cmd->add_option("--delta", run_cfg.delta);
  run_cmd->add_option("--seed", run_cfg.seed);
  run_cmd->add_option("--budget", run_cfg.budget);
  run_cmd->add_option("--elim-period", run_cfg.elim_period);
  run_cmd->add_option("--out", run_out);

  // --- bench ---
  auto* bench_cmd = app.add_subcommand("bench", "Monte-Carlo batch of runs");
  detpac::ExperimentConfig bench_cfg;
  std::string bench_instance, bench_out, bench_summary;
  bench_cmd->add_option("--instance", bench_instance)->required();
  bench_cmd->add_option("--rule", bench_cfg.rule);
  bench_cmd->add_option("--eps", bench_cfg.eps);
  bench_cmd->add_option("--delta", bench_cfg.delta);
  bench_cmd->add_option("--trials", bench_cfg.trials);
  bench_cmd->add_option("--seed", bench_cfg.seed);
  bench_cmd->add_option("--budget", bench_cfg.budget);
  bench_cmd->add_option("--elim-period", bench_cfg.elim_period);
  bench_cmd->add_option("--out", bench_out, "CSV output path")->required();
  bench_cmd->add_option("--summary", bench_summary,
                        "summary JSON path (default <out>.summary.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      if (!gen_means.empty()) spec.means = parse_means(gen_means);
      if (gen_sigma2 > 0.0) spec.gaussian_sigma2 = gen_sigma2;
      spec.with_crossover_arc = !no_crossover;
      emit(gen_out, detpac::mdp_to_json(detpac::generate(spec)));
    } else if (gaps_cmd->parsed()) {
      const auto mdp = load_instance(gaps_instance);
      emit(gaps_out, detpac::gap_table_to_json(mdp, detpac::compute_gaps(mdp)));
    } else if (lb->parsed()) {
      const auto mdp = load_instance(lb_instance);
      const auto report =
          detpac::visit_lower_bound(mdp, lb_eps, lb_delta, lb_sigma2);
      emit(lb_out, detpac::lower_bound_report_to_json(mdp, report));
    } else if (flow_cmd->parsed()) {
      const auto mdp = load_instance(flow_instance);
      const auto demand = detpac::demand_from_json(
          mdp, json::parse(detpac::read_text_file(flow_demand)));
      const auto solved = detpac::min_flow(mdp, demand);
      json j;
      j["phi_star"] = solved.value;
      j["flow"] = detpac::flow_to_json(mdp, solved.flow);
      j["cut"] = detpac::cut_to_json(mdp, solved.cut, demand);
      if (solved.flow.is_integral()) {
        json cover = json::array();
        for (const auto& p : detpac::extract_policy_cover(mdp, solved.flow))
          cover.push_back(detpac::policy_to_json(mdp, p));
        j["cover"] = std::move(cover);
      }
      emit(flow_out, j);
    } else if (run_cmd->parsed()) {
      const auto mdp = load_instance(run_instance);
      run_cfg.validate();
      const auto rule = detpac::make_sampling_rule(run_cfg.rule);
      detpac::RunConfig rc;
      rc.max_episodes = run_cfg.budget;
      rc.elim_period = run_cfg.elim_period;
      const auto result = detpac::run_learner(mdp, *rule, run_cfg.eps,
                                           run_cfg.delta, run_cfg.seed, rc);
      emit(run_out, detpac::run_result_to_json(mdp, result));
    } else if (bench_cmd->parsed()) {
      const auto mdp = load_instance(bench_instance);
      bench_cfg.validate();
      const auto batch = detpac::run_batch(mdp, bench_cfg);
      detpac::write_text_file(bench_out, detpac::batch_to_csv(batch));
      const std::string summary_path =
          bench_summary.empty() ? bench_out + ".summary.json" : bench_summary;
      emit(summary_path, detpac::batch_summary_to_json(
                             detpac::summarize(mdp, bench_cfg, batch)));
    }
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}

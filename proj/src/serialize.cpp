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

#include "detpac/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace detpac {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

}  // namespace

json mdp_to_json(const DeterministicMdp& mdp) {
  json j;
  j["horizon"] = mdp.horizon();
  if (mdp.reward_model().is_gaussian())
    j["reward_kind"] = json{{"gaussian", mdp.reward_model().sigma2}};
  else
    j["reward_kind"] = "bernoulli";
  json stages = json::array();
  for (int h = 0; h < mdp.horizon(); ++h) {
    json states = json::array();
    for (int s = 0; s < mdp.num_states(h); ++s) {
      const auto& st = mdp.state(h, s);
      json actions = json::array();
      for (const auto& a : st.actions) {
        json action;
        action["label"] = a.label;
        action["next_state"] = h + 1 < mdp.horizon()
                                   ? mdp.state(h + 1, a.next_state).id
                                   : "sink";
        action["mean_reward"] = a.mean_reward;
        actions.push_back(std::move(action));
      }
      states.push_back(json{{"id", st.id}, {"actions", std::move(actions)}});
    }
    stages.push_back(json{{"states", std::move(states)}});
  }
  j["stages"] = std::move(stages);
  return j;
}

DeterministicMdp mdp_from_json(const json& j) {
  if (!j.is_object() || !j.contains("horizon") || !j.contains("stages"))
    fail("instance: expected {horizon, stages, reward_kind}");
  const int horizon = j.at("horizon").get<int>();
  const auto& jstages = j.at("stages");
  if (!jstages.is_array() || static_cast<int>(jstages.size()) != horizon)
    fail("instance: stage array length must equal the horizon");

  RewardModel reward = RewardModel::bernoulli();
  if (j.contains("reward_kind")) {
    const auto& rk = j.at("reward_kind");
    if (rk.is_string()) {
      if (rk.get<std::string>() != "bernoulli")
        fail("instance: unknown reward_kind '" + rk.get<std::string>() + "'");
    } else if (rk.is_object() && rk.contains("gaussian")) {
      reward = RewardModel::gaussian(rk.at("gaussian").get<double>());
    } else {
      fail("instance: reward_kind must be \"bernoulli\" or {\"gaussian\": s2}");
    }
  }

  // Pass 1: state ids per stage, to resolve next_state names.
  std::vector<std::vector<std::string>> ids(horizon);
  for (int h = 0; h < horizon; ++h) {
    for (const auto& jstate : jstages[h].at("states"))
      ids[h].push_back(jstate.at("id").get<std::string>());
  }
  const auto resolve = [&](int h, const std::string& id) {
    for (size_t s = 0; s < ids[h].size(); ++s)
      if (ids[h][s] == id) return static_cast<int>(s);
    fail("instance: unknown next_state '" + id + "' at stage " +
         std::to_string(h + 1));
  };

  std::vector<StageSpec> stages(horizon);
  for (int h = 0; h < horizon; ++h) {
    for (const auto& jstate : jstages[h].at("states")) {
      StateSpec st;
      st.id = jstate.at("id").get<std::string>();
      for (const auto& jaction : jstate.at("actions")) {
        ActionSpec a;
        a.label = jaction.at("label").get<std::string>();
        a.mean_reward = jaction.value("mean_reward", 0.0);
        if (h + 1 < horizon) {
          a.next_state = resolve(h + 1, jaction.at("next_state").get<std::string>());
        } else {
          if (jaction.contains("next_state") &&
              jaction.at("next_state").get<std::string>() != "sink")
            fail("instance: last-stage actions must target the sink");
          a.next_state = -1;
        }
        st.actions.push_back(std::move(a));
      }
      stages[h].states.push_back(std::move(st));
    }
  }
  return DeterministicMdp(std::move(stages), reward);
}

json demand_to_json(const DeterministicMdp& mdp, const DemandFn& demand) {
  json j = json::object();
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    if (demand.lower[arc] != 0.0) j[mdp.arc_key(arc)] = demand.lower[arc];
  }
  return j;
}

DemandFn demand_from_json(const DeterministicMdp& mdp, const json& j) {
  if (!j.is_object()) fail("demand: expected a map of arc keys to numbers");
  DemandFn demand(mdp);
  for (const auto& [key, value] : j.items()) {
    const double d = value.get<double>();
    if (d < 0.0) fail("demand: negative value for arc '" + key + "'");
    demand.lower[mdp.arc_from_key(key)] = d;
  }
  return demand;
}

json flow_to_json(const DeterministicMdp& mdp, const Flow& flow) {
  json j = json::object();
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    if (flow.eta[arc] != 0.0) j[mdp.arc_key(arc)] = flow.eta[arc];
  }
  return j;
}

json cut_to_json(const DeterministicMdp& mdp, const Cut& cut,
                 const DemandFn& demand) {
  json nodes = json::array();
  for (int node = 0; node < mdp.num_nodes(); ++node)
    if (cut.in_cut[node]) nodes.push_back(mdp.node_key(node));
  json arcs = json::object();
  for (int arc : cut.forward_arcs(mdp)) arcs[mdp.arc_key(arc)] = demand.lower[arc];
  return json{{"nodes", std::move(nodes)},
              {"forward_arcs", std::move(arcs)},
              {"psi", cut_value(mdp, cut, demand)}};
}

json policy_to_json(const DeterministicMdp& mdp, const Policy& policy) {
  json j = json::object();
  for (int node = 0; node < mdp.num_nodes(); ++node) {
    const auto& st = mdp.state(mdp.node_stage(node), mdp.node_state(node));
    j[mdp.node_key(node)] = st.actions[policy.actions[node]].label;
  }
  return j;
}

Policy policy_from_json(const DeterministicMdp& mdp, const json& j) {
  if (!j.is_object()) fail("policy: expected a map of node keys to labels");
  Policy p;
  p.actions.assign(mdp.num_nodes(), 0);
  std::vector<uint8_t> seen(mdp.num_nodes(), 0);
  for (const auto& [key, value] : j.items()) {
    const int arc = mdp.arc_from_key(key + "/" + value.get<std::string>());
    p.actions[mdp.arc_node(arc)] = mdp.arc_action(arc);
    seen[mdp.arc_node(arc)] = 1;
  }
  for (int node = 0; node < mdp.num_nodes(); ++node)
    if (!seen[node]) fail("policy: missing entry for " + mdp.node_key(node));
  return p;
}

json gap_table_to_json(const DeterministicMdp& mdp, const GapTable& gaps) {
  json value_gap = json::object(), det_gap = json::object(),
       ret_gap = json::object();
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const auto key = mdp.arc_key(arc);
    value_gap[key] = gaps.value_gap[arc];
    det_gap[key] = gaps.det_return_gap[arc];
    ret_gap[key] = gaps.return_gap(mdp, arc);
  }
  json stage_min = json::array();
  for (double v : gaps.stage_min_positive)
    stage_min.push_back(std::isfinite(v) ? json(v) : json());
  return json{{"optimal_return", gaps.optimal_return},
              {"value_gap", std::move(value_gap)},
              {"det_return_gap", std::move(det_gap)},
              {"return_gap", std::move(ret_gap)},
              {"stage_min_positive_gap", std::move(stage_min)},
              {"unique_optimal_trajectory", gaps.unique_optimal_trajectory},
              {"delta_min", gaps.unique_optimal_trajectory &&
                                    !std::isfinite(gaps.global_min_positive)
                                ? json()
                                : json(gaps.delta_min())}};
}

json lower_bound_report_to_json(const DeterministicMdp& mdp,
                                const LowerBoundReport& report) {
  json j;
  j["eps"] = report.eps;
  j["delta"] = report.delta;
  j["sigma2"] = report.sigma2;
  j["local_bounds"] = demand_to_json(mdp, report.demand);
  j["phi_star"] = report.phi_star;
  // phi* scales linearly in sigma2, so both reference scalings are exact.
  j["phi_star_sigma2_1"] = report.phi_star / report.sigma2;
  j["phi_star_sigma2_quarter"] = 0.25 * report.phi_star / report.sigma2;
  j["stage_max_sum"] = report.stage_max_sum;
  j["total_sum"] = report.total_sum;
  if (report.tree_bound) j["tree_bound"] = *report.tree_bound;
  return j;
}

json run_result_to_json(const DeterministicMdp& mdp, const RunResult& r) {
  json counts = json::object(), elim = json::object();
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const auto key = mdp.arc_key(arc);
    counts[key] = r.final_counts[arc];
    elim[key] = r.elimination_episode[arc] < 0
                    ? json()
                    : json(r.elimination_episode[arc]);
  }
  json periods = json::array();
  for (const auto& p : r.periods) {
    periods.push_back(json{{"k", p.k},
                           {"t_start", p.t_start},
                           {"d_k", p.duration},
                           {"N_k", p.demanded},
                           {"phi_star", p.phi_star},
                           {"cover_size", p.cover_size},
                           {"min_active_visits_at_start",
                            p.min_active_visits_at_start},
                           {"active_last_stage_arcs", p.active_last_stage_arcs},
                           {"coverage_trace", p.coverage_trace}});
  }
  return json{{"seed", r.seed},
              {"rule", r.rule},
              {"eps", r.eps},
              {"delta", r.delta},
              {"tau", r.tau},
              {"stop_rule", to_string(r.stop_reason)},
              {"subopt", r.suboptimality},
              {"good_event", r.good_event},
              {"recommended", policy_to_json(mdp, r.recommended)},
              {"counts", std::move(counts)},
              {"elim_episode", std::move(elim)},
              {"periods", std::move(periods)}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail("failed writing '" + path + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace detpac

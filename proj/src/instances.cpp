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

#include "detpac/instances.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "detpac/rng.hpp"

namespace detpac {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

/// Incremental layered-graph builder; states are created on first use and
/// keep their creation order inside each stage.
class GraphBuilder {
 public:
  explicit GraphBuilder(int horizon) : stages_(horizon) {}

  // stage is 1-based here; the sink is addressed as stage horizon+1.
  int state(int stage, const std::string& id) {
    auto& index = index_[stage];
    const auto it = index.find(id);
    if (it != index.end()) return it->second;
    const int s = static_cast<int>(stages_[stage - 1].states.size());
    stages_[stage - 1].states.push_back(StateSpec{id, {}});
    index.emplace(id, s);
    return s;
  }

  void arc(int stage, const std::string& from, const std::string& label,
           const std::string& to, double mean) {
    const int s = state(stage, from);
    const int next = stage == static_cast<int>(stages_.size())
                         ? -1
                         : state(stage + 1, to);
    stages_[stage - 1].states[s].actions.push_back(
        ActionSpec{label, next, mean});
  }

  DeterministicMdp build(RewardModel reward) {
    return DeterministicMdp(std::move(stages_), reward);
  }

 private:
  std::vector<StageSpec> stages_;
  std::map<int, std::map<std::string, int>> index_;
};

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int int_log2(int v) {
  int d = 0;
  while ((1 << (d + 1)) <= v) ++d;
  return d;
}

int ceil_log2(int v) {
  int d = 0;
  while ((1 << d) < v) ++d;
  return d;
}

int tree_depth(int j) { return int_log2(j) + 1; }

std::string action_label(int a) { return "a" + std::to_string(a + 1); }

DeterministicMdp with_reward_model(const DeterministicMdp& mdp,
                                   RewardModel reward) {
  return DeterministicMdp(mdp.stages(), reward);
}

}  // namespace

DeterministicMdp gen_hard_worst_case(
    int S, int A, int H,
    const std::function<double(int, const std::string&, const std::string&)>&
        reward_hook) {
  if (!is_power_of_two(S) || S < 2) fail("hard-worst-case: S must be 2^d");
  if (A < 2) fail("hard-worst-case: A must be >= 2");
  const int d = int_log2(S);
  if (H < 3 * d) fail("hard-worst-case: H must be >= 3*log2(S)");
  const int waiting = std::max(1, H / 3);  // last stage where a1 is forced

  const auto mean = [&](int stage, const std::string& state,
                        const std::string& action) {
    return reward_hook ? reward_hook(stage, state, action) : 0.0;
  };

  GraphBuilder g(H);
  for (int h = 1; h < waiting; ++h) {
    g.arc(h, "s1", "a1", "t1", mean(h, "s1", "a1"));
    g.arc(h, "s1", "a2", "s1", mean(h, "s1", "a2"));
  }
  g.arc(waiting, "s1", "a1", "t1", mean(waiting, "s1", "a1"));

  for (int j = 1; j < S; ++j) {
    const std::string id = "t" + std::to_string(j);
    const int dep = tree_depth(j);
    if (2 * j < S) {  // internal: two children
      for (int h = 1 + dep; h <= waiting + dep; ++h) {
        g.arc(h, id, "a1", "t" + std::to_string(2 * j), mean(h, id, "a1"));
        g.arc(h, id, "a2", "t" + std::to_string(2 * j + 1), mean(h, id, "a2"));
      }
    } else {  // leaf: keep all A actions looping until the horizon
      for (int h = 1 + dep; h <= H; ++h) {
        for (int a = 0; a < A; ++a)
          g.arc(h, id, action_label(a), id, mean(h, id, action_label(a)));
      }
    }
  }
  return g.build(RewardModel::bernoulli());
}

DeterministicMdp gen_visits_vs_gap(int S, int A, int H, double delta) {
  if (S < 4) fail("visits-vs-gap: S must be >= 4");
  if (A < 2) fail("visits-vs-gap: A must be >= 2");
  if (H < ceil_log2(S) + 1) fail("visits-vs-gap: H must be >= ceil(log2 S)+1");
  if (!(delta > 0.0 && delta <= 1.0)) fail("visits-vs-gap: delta in (0,1]");

  GraphBuilder g(H);
  g.arc(1, "s1", "a1", "t1", 0.0);
  g.arc(1, "s1", "a2", "s1", 0.0);
  for (int h = 2; h < H; ++h) g.arc(h, "s1", "a2", "s1", 0.0);
  g.arc(H, "s1", "a2", "sink", delta);

  const int n = S - 1;  // states in the tree, heap-ordered
  for (int j = 1; j <= n; ++j) {
    const std::string id = "t" + std::to_string(j);
    const int arrival = 1 + tree_depth(j);
    if (2 * j <= n) {  // at least a left child
      g.arc(arrival, id, "a1", "t" + std::to_string(2 * j), 0.0);
      if (2 * j + 1 <= n)
        g.arc(arrival, id, "a2", "t" + std::to_string(2 * j + 1), 0.0);
    } else {  // childless: all A actions loop in place until the horizon
      for (int h = arrival; h <= H; ++h)
        for (int a = 0; a < A; ++a) g.arc(h, id, action_label(a), id, 0.0);
    }
  }
  return g.build(RewardModel::bernoulli());
}

DeterministicMdp gen_regret_vs_bpi(int S, int A, int H, double delta) {
  if (S < 4) fail("regret-vs-bpi: S must be >= 4");
  if (A < 2) fail("regret-vs-bpi: A must be >= 2");
  if (H < ceil_log2(S) + 1) fail("regret-vs-bpi: H must be >= ceil(log2 S)+1");
  if (!(delta > 0.0 && delta <= 1.0)) fail("regret-vs-bpi: delta in (0,1]");

  const std::string final_id = "t" + std::to_string(S);
  GraphBuilder g(H);
  // Reachable state set per stage, built by walking the heap-ordered tree.
  std::vector<std::vector<int>> present(H + 1);
  present[1] = {1};
  for (int h = 1; h <= H - 2; ++h) {
    for (int j : present[h]) {
      const std::string id = "t" + std::to_string(j);
      if (2 * j <= S && tree_depth(j) == h) {  // internal node, descend
        g.arc(h, id, "a1", "t" + std::to_string(2 * j), 0.0);
        present[h + 1].push_back(2 * j);
        if (2 * j + 1 <= S) {
          g.arc(h, id, "a2", "t" + std::to_string(2 * j + 1), 0.0);
          present[h + 1].push_back(2 * j + 1);
        }
      } else {  // childless (or already looping): all A actions loop
        for (int a = 0; a < A; ++a) g.arc(h, id, action_label(a), id, 0.0);
        present[h + 1].push_back(j);
      }
    }
  }
  for (int j : present[H - 1]) {
    const std::string id = "t" + std::to_string(j);
    for (int a = 0; a < A; ++a)
      g.arc(H - 1, id, action_label(a), final_id, 0.0);
  }
  g.arc(H, final_id, "a1", "sink", delta);
  g.arc(H, final_id, "a2", "sink", 0.0);
  return g.build(RewardModel::gaussian(1.0));
}

DeterministicMdp gen_random_layered(int states_per_stage, int A, int H,
                                    double reward_density, uint64_t seed,
                                    RewardModel reward) {
  if (states_per_stage < 1 || A < 1 || H < 1)
    fail("random-layered: sizes must be positive");
  if (!(reward_density >= 0.0 && reward_density <= 1.0))
    fail("random-layered: density in [0,1]");
  Rng rng(seed);

  // Stage sizes grow at most by the available out-degree.
  std::vector<int> size(H + 1);
  size[1] = 1;
  for (int h = 2; h <= H; ++h)
    size[h] = std::min(states_per_stage, size[h - 1] * A);

  const auto mean = [&]() {
    return rng.uniform01() < reward_density ? rng.uniform01() : 0.0;
  };

  std::vector<StageSpec> stages(H);
  for (int h = 1; h <= H; ++h) {
    stages[h - 1].states.resize(size[h]);
    for (int s = 0; s < size[h]; ++s)
      stages[h - 1].states[s].id = "s" + std::to_string(s + 1);
  }
  for (int h = 1; h <= H; ++h) {
    const int slots = size[h] * A;
    // Each next-stage state claims one distinct slot, the rest are uniform.
    std::vector<int> target(slots, -1);
    if (h < H) {
      std::vector<int> order(slots);
      for (int i = 0; i < slots; ++i) order[i] = i;
      for (int i = slots - 1; i > 0; --i)
        std::swap(order[i], order[rng.next_u64() % (i + 1)]);
      for (int t = 0; t < size[h + 1]; ++t) target[order[t]] = t;
      for (int i = 0; i < slots; ++i)
        if (target[i] < 0)
          target[i] = static_cast<int>(rng.next_u64() % size[h + 1]);
    }
    for (int s = 0; s < size[h]; ++s) {
      for (int a = 0; a < A; ++a) {
        stages[h - 1].states[s].actions.push_back(
            ActionSpec{action_label(a), target[s * A + a], mean()});
      }
    }
  }
  return DeterministicMdp(std::move(stages), reward);
}

DeterministicMdp gen_random_tree(int branching, int H, uint64_t seed,
                                 RewardModel reward) {
  if (branching < 1 || H < 1) fail("random-tree: sizes must be positive");
  Rng rng(seed);
  std::vector<StageSpec> stages(H);
  stages[0].states.push_back(StateSpec{"s1", {}});
  int next_id = 2;
  for (int h = 1; h <= H; ++h) {
    for (auto& st : stages[h - 1].states) {
      const int na = 1 + static_cast<int>(rng.next_u64() %
                                          static_cast<uint64_t>(branching));
      for (int a = 0; a < na; ++a) {
        int child = -1;
        if (h < H) {
          child = static_cast<int>(stages[h].states.size());
          stages[h].states.push_back(
              StateSpec{"s" + std::to_string(next_id++), {}});
        }
        st.actions.push_back(ActionSpec{action_label(a), child,
                                        rng.uniform01()});
      }
    }
    if (h < H && stages[h].states.size() > 100000)
      fail("random-tree: instance too large");
  }
  return DeterministicMdp(std::move(stages), reward);
}

DeterministicMdp gen_bandit(const std::vector<double>& means,
                            RewardModel reward) {
  if (means.empty()) fail("bandit: needs at least one arm");
  std::vector<StageSpec> stages(1);
  stages[0].states.push_back(StateSpec{"s1", {}});
  for (size_t a = 0; a < means.size(); ++a)
    stages[0].states[0].actions.push_back(
        ActionSpec{action_label(static_cast<int>(a)), -1, means[a]});
  return DeterministicMdp(std::move(stages), reward);
}

DeterministicMdp gen_cover_crossover(int m, bool with_crossover_arc) {
  if (m < 1) fail("cover-crossover: m must be >= 1");
  GraphBuilder g(3);
  for (int a = 0; a < m; ++a) g.arc(1, "s1", action_label(a), "p", 0.0);
  g.arc(1, "s1", action_label(m), "q", 0.0);
  g.arc(2, "p", "fwd", "r", 0.0);
  if (with_crossover_arc) g.arc(2, "p", "cross", "qq", 0.0);
  g.arc(2, "q", "a1", "qq", 0.0);
  g.arc(3, "r", "a1", "sink", 0.0);
  for (int a = 0; a < m; ++a) g.arc(3, "qq", action_label(a), "sink", 0.0);
  return g.build(RewardModel::bernoulli());
}

int cover_crossover_arc(const DeterministicMdp& mdp) {
  return mdp.arc_from_key("2/p/cross");
}

DeterministicMdp generate(const InstanceSpec& spec) {
  DeterministicMdp mdp = [&]() {
    if (spec.kind == "hard-worst-case")
      return gen_hard_worst_case(spec.S, spec.A, spec.H);
    if (spec.kind == "visits-vs-gap")
      return gen_visits_vs_gap(spec.S, spec.A, spec.H, spec.delta_gap);
    if (spec.kind == "regret-vs-bpi")
      return gen_regret_vs_bpi(spec.S, spec.A, spec.H, spec.delta_gap);
    if (spec.kind == "random-layered")
      return gen_random_layered(spec.S, spec.A, spec.H, spec.density,
                                spec.seed);
    if (spec.kind == "random-tree")
      return gen_random_tree(spec.branching, spec.H, spec.seed);
    if (spec.kind == "bandit") {
      if (spec.means.empty()) fail("bandit: provide --means");
      return gen_bandit(spec.means);
    }
    if (spec.kind == "cover-crossover")
      return gen_cover_crossover(spec.m, spec.with_crossover_arc);
    fail("unknown instance kind '" + spec.kind + "'");
  }();
  if (spec.gaussian_sigma2)
    return with_reward_model(mdp, RewardModel::gaussian(*spec.gaussian_sigma2));
  return mdp;
}

namespace {

/// Per-stage gap floor of the visit lower bound: the smallest positive gap
/// when exactly one arc at the stage is reachable by an eps-optimal policy
/// (infinite when the stage is a forced single arc), zero otherwise.
std::vector<double> stage_gap_floors(const DeterministicMdp& mdp,
                                     const GapTable& gaps, double eps) {
  std::vector<int> z_count(mdp.horizon(), 0);
  for (int arc = 0; arc < mdp.num_arcs(); ++arc)
    if (gaps.det_return_gap[arc] <= eps + 1e-12) ++z_count[mdp.arc_stage(arc)];
  std::vector<double> floor(mdp.horizon(), 0.0);
  for (int h = 0; h < mdp.horizon(); ++h)
    floor[h] = z_count[h] == 1 ? gaps.stage_min_positive[h] : 0.0;
  return floor;
}

}  // namespace

LowerBoundReport visit_lower_bound(const DeterministicMdp& mdp, double eps,
                                      double delta, double sigma2) {
  if (!(eps > 0.0)) fail("lower bound: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) fail("lower bound: delta in (0,1)");
  if (!(sigma2 > 0.0)) fail("lower bound: sigma2 must be > 0");

  const auto gaps = compute_gaps(mdp);
  const auto floors = stage_gap_floors(mdp, gaps, eps);
  const double log_term = std::max(0.0, std::log(1.0 / (4.0 * delta)));

  LowerBoundReport report;
  report.eps = eps;
  report.delta = delta;
  report.sigma2 = sigma2;
  report.demand = DemandFn(mdp);
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const double m = std::max({gaps.det_return_gap[arc],
                               floors[mdp.arc_stage(arc)], eps});
    report.demand.lower[arc] =
        std::isfinite(m) ? sigma2 * log_term / (4.0 * m * m) : 0.0;
  }
  report.phi_star = min_flow_value(mdp, report.demand);
  report.stage_max_sum = report.demand.max_stage_sum(mdp);
  report.total_sum = report.demand.total();
  if (is_tree_based(mdp))
    report.tree_bound = tree_lower_bound(mdp, eps, delta);
  return report;
}

double tree_lower_bound(const DeterministicMdp& mdp, double eps,
                        double delta) {
  if (!is_tree_based(mdp)) fail("tree lower bound: MDP is not tree-based");
  if (!(eps > 0.0)) fail("lower bound: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) fail("lower bound: delta in (0,1)");

  const auto gaps = compute_gaps(mdp);
  const auto floors = stage_gap_floors(mdp, gaps, eps);
  const double log_term = std::max(0.0, std::log(1.0 / (4.0 * delta)));

  std::vector<double> stage_sum(mdp.horizon(), 0.0);
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const int h = mdp.arc_stage(arc);
    const double m = std::max({gaps.det_return_gap[arc], floors[h], eps});
    if (!std::isfinite(m)) continue;
    stage_sum[h] += (mdp.horizon() - h) * log_term / (4.0 * m * m);
  }
  return *std::max_element(stage_sum.begin(), stage_sum.end());
}

std::vector<double> elimination_period_bound(const DeterministicMdp& mdp, double eps,
                                double delta) {
  if (!(eps > 0.0)) fail("elimination period bound: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) fail("elimination period bound: delta in (0,1)");

  const auto gaps = compute_gaps(mdp);
  const double gap_floor = gaps.delta_min();
  const double n_sq = static_cast<double>(mdp.num_arcs()) *
                      static_cast<double>(mdp.num_arcs());
  const double log_n2 = 1.0 + std::log(n_sq / delta);
  const double h2 = static_cast<double>(mdp.horizon()) * mdp.horizon();

  std::vector<double> bound(mdp.num_arcs());
  for (int arc = 0; arc < mdp.num_arcs(); ++arc) {
    const double m = std::max({gaps.det_return_gap[arc], gap_floor, eps});
    if (!std::isfinite(m)) {
      bound[arc] = 1.0;
      continue;
    }
    const double l_term = std::log(2.0) +
                          4.0 * std::log(4.0 * mdp.horizon() / m) +
                          std::log(log_n2);
    bound[arc] = 8.0 * h2 / (m * m) * (log_n2 + l_term) + 1.0;
  }
  return bound;
}

}  // namespace detpac

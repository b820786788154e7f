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

#include "bmx/bm_mcts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmx {

double PenaltyParams::kappa_energy(double remaining) const {
  return std::exp(-a1 * remaining / energy_budget + b1);
}

double PenaltyParams::kappa_time(double remaining) const {
  return std::exp(-a2 * remaining / time_budget + b2);
}

void PenaltyParams::validate() const {
  if (!(a1 > a2 && a2 > 0.0)) throw std::invalid_argument("penalty coefficients require a1 > a2 > 0");
  if (!(energy_budget > 0.0 && time_budget > 0.0)) throw std::invalid_argument("budgets must be positive");
}

void SearchConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iteration threshold must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (!(gamma_ig > 0.0)) throw std::invalid_argument("gamma_ig must be positive");
  if (!(child_distance > 0.0)) throw std::invalid_argument("child distance threshold must be positive");
}

PlanningProblem PlanningProblem::from_groups(std::span<const ViewpointGroup> groups, const Pose& robot,
                                             const Vec3& home, double energy_remaining, double time_remaining,
                                             const CostParams& costs, const PenaltyParams& penalty,
                                             PathLengthFn estimator,
                                             std::vector<std::pair<int, int>>* source_of_candidate) {
  PlanningProblem p;
  p.robot = robot;
  p.home = home;
  p.energy_remaining = energy_remaining;
  p.time_remaining = time_remaining;
  p.costs = costs;
  p.penalty = penalty;
  p.estimator = std::move(estimator);
  if (source_of_candidate) source_of_candidate->clear();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const ViewpointGroup& g = groups[gi];
    if (!g.reachable || (g.as.empty() && g.hs.empty())) continue;
    const int slot = static_cast<int>(p.group_averages.size());
    p.group_averages.push_back(g.average);
    int k = 0;
    for (const auto* set : {&g.as, &g.hs}) {
      for (const Viewpoint& vp : *set) {
        p.candidates.push_back({vp.pose, vp.modality, vp.strategy, slot, static_cast<double>(vp.ig)});
        if (source_of_candidate) source_of_candidate->emplace_back(static_cast<int>(gi), k);
        ++k;
      }
    }
  }
  return p;
}

BmMcts::BmMcts(PlanningProblem problem, SearchConfig config)
    : problem_(std::move(problem)), config_(config), rng_(config.seed) {
  config_.validate();
  problem_.penalty.validate();
  TreeNode root;
  root.candidate = kRootNode;
  root.energy_arrival = problem_.energy_remaining;
  root.time_arrival = problem_.time_remaining;
  nodes_.push_back(std::move(root));
}

Pose BmMcts::pose_of(int node) const {
  const int c = nodes_[node].candidate;
  if (c == kRootNode) return problem_.robot;
  if (c == kHomeNode) return {problem_.home, 0.0};
  return problem_.candidates[c].pose;
}

std::vector<int> BmMcts::branch_candidates(int node) const {
  std::vector<int> out;
  for (int v = node; v >= 0 && nodes_[v].candidate != kRootNode; v = nodes_[v].parent)
    out.push_back(nodes_[v].candidate);
  std::reverse(out.begin(), out.end());
  return out;
}

int BmMcts::add_node(int parent, int candidate) {
  TreeNode child;
  child.candidate = candidate;
  child.parent = parent;
  child.depth = nodes_[parent].depth + 1;
  child.terminal = candidate == kHomeNode;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(std::move(child));
  nodes_[parent].children.push_back(id);
  return id;
}

std::vector<int> BmMcts::potential_children(int node) const {
  if (nodes_[node].candidate == kHomeNode) return {};
  const int n_cand = static_cast<int>(problem_.candidates.size());
  std::vector<char> on_branch(n_cand, 0);
  std::vector<int> lock(problem_.group_averages.size(), -1);
  for (int c : branch_candidates(node)) {
    if (c < 0) continue;
    on_branch[c] = 1;
    const Candidate& cand = problem_.candidates[c];
    if (lock[cand.group] < 0) lock[cand.group] = static_cast<int>(cand.strategy);
  }
  const Vec3 here = pose_of(node).position;
  std::vector<int> near, any;
  for (int c = 0; c < n_cand; ++c) {
    if (on_branch[c]) continue;
    const Candidate& cand = problem_.candidates[c];
    if (lock[cand.group] >= 0 && lock[cand.group] != static_cast<int>(cand.strategy)) continue;
    any.push_back(c);
    if (distance(here, cand.pose.position) <= config_.child_distance) near.push_back(c);
  }
  std::vector<int> out = near.empty() ? std::move(any) : std::move(near);
  out.push_back(kHomeNode);
  return out;
}

double BmMcts::edge_length(int from_candidate, int to_candidate) {
  const auto key = std::pair{from_candidate, to_candidate};
  if (auto it = lengths_.find(key); it != lengths_.end()) return it->second;
  const Vec3 a = from_candidate == kRootNode ? problem_.robot.position
                                               : problem_.candidates[from_candidate].pose.position;
  const Vec3 b = to_candidate == kHomeNode ? problem_.home : problem_.candidates[to_candidate].pose.position;
  const double len = path_length(a, b, problem_.estimator);
  lengths_.emplace(key, len);
  return len;
}

void BmMcts::prepare_groups() {
  if (groups_ready_) return;
  groups_ready_ = true;
  const int k = static_cast<int>(problem_.group_averages.size());
  const CostParams& c = problem_.costs;
  group_to_group_ = SquareMatrix(k, kInf);
  group_to_home_.assign(k, kInf);
  group_reachable_.assign(k, 0);
  for (int i = 0; i < k; ++i) {
    const Pose& gi = problem_.group_averages[i];
    group_to_home_[i] = time_of(path_length(gi.position, problem_.home, problem_.estimator), 0.0,
                                CostMode::kAverage, c);
    group_reachable_[i] = group_to_home_[i] < kInf;
  }
  for (int i = 0; i < k; ++i) {
    if (!group_reachable_[i]) continue;
    for (int j = 0; j < k; ++j) {
      if (i == j || !group_reachable_[j]) continue;
      const Pose& a = problem_.group_averages[i];
      const Pose& b = problem_.group_averages[j];
      group_to_group_(i, j) = time_of(path_length(a.position, b.position, problem_.estimator),
                                      yaw_difference(a.yaw, b.yaw), CostMode::kAverage, c);
    }
  }
  table_slot_.assign(k, -1);
  std::vector<int> members;
  for (int i = 0; i < k; ++i)
    if (group_reachable_[i]) {
      table_slot_[i] = static_cast<int>(members.size());
      members.push_back(i);
    }
  if (static_cast<int>(members.size()) <= config_.table_limit) {
    const int m = static_cast<int>(members.size());
    SquareMatrix g2g(m, kInf);
    std::vector<double> g2h(m);
    for (int a = 0; a < m; ++a) {
      g2h[a] = group_to_home_[members[a]];
      for (int b = 0; b < m; ++b)
        if (a != b) g2g(a, b) = group_to_group_(members[a], members[b]);
    }
    table_ = std::make_unique<SuffixTourTable>(g2g, g2h);
  }
}

double BmMcts::group_to_home_time(int group) {
  prepare_groups();
  return group_to_home_[group];
}

double BmMcts::guidance_time(int node) {
  prepare_groups();
  const int c = nodes_[node].candidate;
  const Candidate& cand = problem_.candidates[c];
  const int k = static_cast<int>(problem_.group_averages.size());
  const CostParams& costs = problem_.costs;

  auto row_it = anchor_rows_.find(c);
  if (row_it == anchor_rows_.end()) {
    std::vector<double> row(k + 1, kInf);
    for (int j = 0; j < k; ++j) {
      if (!group_reachable_[j]) continue;
      const Pose& g = problem_.group_averages[j];
      row[j] = time_of(path_length(cand.pose.position, g.position, problem_.estimator),
                       yaw_difference(cand.pose.yaw, g.yaw), CostMode::kAverage, costs);
    }
    row[k] = time_of(edge_length(c, kHomeNode), 0.0, CostMode::kAverage, costs);
    row_it = anchor_rows_.emplace(c, std::move(row)).first;
  }
  const std::vector<double>& row = row_it->second;

  std::vector<char> visited(k, 0);
  for (int b : branch_candidates(node))
    if (b >= 0) visited[problem_.candidates[b].group] = 1;

  std::vector<int> remaining;
  for (int j = 0; j < k; ++j)
    if (!visited[j] && group_reachable_[j] && row[j] < kInf) remaining.push_back(j);

  if (table_) {
    std::vector<double> compact(table_->group_count(), kInf);
    std::uint32_t mask = 0;
    for (int j : remaining) {
      compact[table_slot_[j]] = row[j];
      mask |= 1u << table_slot_[j];
    }
    return table_->query(compact, row[k], mask);
  }

  const int m = static_cast<int>(remaining.size());
  std::vector<double> a2g(m), g2h(m);
  SquareMatrix g2g(m, kInf);
  for (int a = 0; a < m; ++a) {
    a2g[a] = row[remaining[a]];
    g2h[a] = group_to_home_[remaining[a]];
    for (int b = 0; b < m; ++b)
      if (a != b) g2g(a, b) = group_to_group_(remaining[a], remaining[b]);
  }
  try {
    SolveOptions opts = config_.tsp;
    opts.seed = config_.seed + static_cast<std::uint64_t>(node);
    return solve(assemble_matrix(a2g, g2g, g2h, row[k]), opts).total_time;
  } catch (const PlanningDeadEnd&) {
    return kInf;
  }
}

std::pair<bool, int> BmMcts::expand(int node) {
  if (!nodes_[node].potentials_ready) {
    nodes_[node].unexpanded = potential_children(node);
    nodes_[node].potentials_ready = true;
  }
  if (nodes_[node].unexpanded.empty()) return {false, -1};
  std::vector<int>& pool = nodes_[node].unexpanded;
  const std::size_t pick = static_cast<std::size_t>(rng_() % pool.size());
  const int c = pool[pick];
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));

  const Pose from = pose_of(node);
  const double parent_energy = nodes_[node].energy_arrival;
  const double parent_time = nodes_[node].time_arrival;
  const int from_candidate = nodes_[node].candidate;
  const int child = add_node(node, c);
  TreeNode& t = nodes_[child];
  const CostParams& costs = problem_.costs;

  if (c == kHomeNode) {
    const double time = time_of(edge_length(from_candidate, kHomeNode), 0.0, CostMode::kAverage, costs);
    t.time_arrival = parent_time - time;
    t.energy_arrival = parent_energy - costs.power(CostMode::kAverage) * time;
    t.pruned = !(t.energy_arrival >= 0.0);
    return {!t.pruned, child};
  }

  const Candidate& cand = problem_.candidates[c];
  const CostMode mode = cost_mode(cand.modality);
  const double time = time_of(edge_length(from_candidate, c), yaw_difference(from.yaw, cand.pose.yaw), mode, costs);
  if (!(time < kInf)) {
    nodes_[child].pruned = true;
    return {false, child};
  }
  const double home_energy = costs.power(CostMode::kAverage) * group_to_home_time(cand.group);
  TreeNode& u = nodes_[child];
  u.time_arrival = parent_time - time;
  u.energy_arrival = parent_energy - costs.power(mode) * time;
  u.pruned = u.energy_arrival - home_energy < 0.0 || !(home_energy < kInf);
  return {!u.pruned, child};
}

bool BmMcts::simulate(int node) {
  const CostParams& costs = problem_.costs;
  const PenaltyParams& pen = problem_.penalty;
  const int c = nodes_[node].candidate;
  if (c == kHomeNode) {
    TreeNode& t = nodes_[node];
    t.ig = 0.0;
    t.energy_final = t.energy_arrival;
    t.time_final = t.time_arrival;
  } else {
    const double tour = guidance_time(node);
    TreeNode& t = nodes_[node];
    if (!(tour < kInf)) {
      t.pruned = true;
      return false;
    }
    t.ig = problem_.candidates[c].ig;
    t.energy_final = t.energy_arrival - costs.power(CostMode::kAverage) * tour;
    t.time_final = t.time_arrival - tour;
  }
  TreeNode& t = nodes_[node];
  t.kappa_e = pen.kappa_energy(t.energy_final);
  t.kappa_t = pen.kappa_time(t.time_final);
  t.simulated = true;
  return true;
}

namespace {

void refresh_kappa(std::vector<TreeNode>& nodes, int v) {
  double se = 0.0, st = 0.0;
  int cnt = 0;
  for (int k : nodes[v].children) {
    const TreeNode& c = nodes[k];
    if (!c.simulated || c.pruned) continue;
    se += c.kappa_e;
    st += c.kappa_t;
    ++cnt;
  }
  if (cnt > 0) {
    nodes[v].kappa_e = se / cnt;
    nodes[v].kappa_t = st / cnt;
  }
}

}  // namespace

void BmMcts::backpropagate(int node, int child) {
  // The freshly simulated child's gain enters its parent discounted once,
  // and each further level discounts the increment again.
  double delta = nodes_[child].ig;
  for (int v = node; v >= 0; v = nodes_[v].parent) {
    TreeNode& t = nodes_[v];
    t.n += 1;
    t.n_ig += config_.gamma_ig;
    delta *= config_.gamma_ig;
    t.ig += delta;
    refresh_kappa(nodes_, v);
  }
}

void BmMcts::revisit_terminal(int node) {
  // Nothing new to sample: only the selection counts move, so the UCB bonus
  // shrinks along this path without diluting the discounted gain average.
  for (int v = node; v >= 0; v = nodes_[v].parent) nodes_[v].n += 1;
}

Reward BmMcts::reward(int node) const {
  const TreeNode& t = nodes_[node];
  Reward r;
  r.process = t.n_ig > 0.0 ? t.ig / t.n_ig : t.ig;
  r.terminal = t.kappa_e + t.kappa_t;
  return r;
}

std::vector<std::pair<int, double>> BmMcts::child_scores(int node) const {
  std::vector<std::pair<int, double>> out;
  std::vector<int> kids;
  for (int k : nodes_[node].children)
    if (nodes_[k].simulated && !nodes_[k].pruned) kids.push_back(k);
  if (kids.empty()) return out;
  double lo = kInf, hi = -kInf;
  for (int k : kids) {
    const double rp = reward(k).process;
    lo = std::min(lo, rp);
    hi = std::max(hi, rp);
  }
  const double eps = config_.epsilon;
  for (int k : kids) {
    const Reward r = reward(k);
    const double normalized = hi - lo < 1e-12 ? 1.0 : eps + (1.0 - eps) * (r.process - lo) / (hi - lo);
    out.emplace_back(k, -normalized + r.terminal);
  }
  return out;
}

int BmMcts::best_child(int node, bool explore) {
  const auto scores = child_scores(node);
  if (scores.empty()) return -1;
  if (explore) {
    std::vector<int> fresh;
    for (const auto& [k, g] : scores)
      if (nodes_[k].n == 0) fresh.push_back(k);
    if (!fresh.empty()) return fresh[static_cast<std::size_t>(rng_() % fresh.size())];
  }
  double n_s = 0.0;
  for (int k : nodes_[node].children) n_s += nodes_[k].n;
  int best = -1;
  double best_u = kInf;
  for (const auto& [k, g] : scores) {
    double u = g;
    if (explore) u -= std::sqrt(2.0 * std::log(n_s) / nodes_[k].n);
    if (best < 0 || u < best_u) {
      best = k;
      best_u = u;
    }
  }
  return best;
}

int BmMcts::select() {
  int v = root();
  while (true) {
    if (nodes_[v].terminal) return v;
    if (!nodes_[v].potentials_ready) {
      nodes_[v].unexpanded = potential_children(v);
      nodes_[v].potentials_ready = true;
    }
    if (!nodes_[v].unexpanded.empty()) return v;
    const int next = best_child(v, true);
    if (next < 0) {
      nodes_[v].terminal = true;
      return v;
    }
    v = next;
  }
}

SearchResult BmMcts::search() {
  SearchResult result;
  if (problem_.candidates.empty()) {
    const bool home = distance(problem_.robot.position, problem_.home) < 1e-3;
    result.kind = home ? SearchResult::Kind::kComplete : SearchResult::Kind::kReturnHome;
    if (!home) result.branch = {kHomeNode};
    return result;
  }
  int it = 0;
  for (; it < config_.iterations; ++it) {
    const int s = select();
    if (nodes_[s].terminal) {
      if (s == root()) break;
      revisit_terminal(s);
      continue;
    }
    const auto [ok, e] = expand(s);
    if (ok && simulate(e)) backpropagate(s, e);
  }
  result.iterations = it;
  result.tree_size = nodes_.size();

  const auto scores = child_scores(root());
  for (int k : nodes_[root()].children) {
    ChildStat st;
    const TreeNode& t = nodes_[k];
    st.candidate = t.candidate;
    if (t.candidate >= 0) st.modality = problem_.candidates[t.candidate].modality;
    st.visits = t.n;
    st.pruned = t.pruned || !t.simulated;
    const Reward r = reward(k);
    st.process = r.process;
    st.terminal = r.terminal;
    st.score = kInf;
    for (const auto& [id, g] : scores)
      if (id == k) st.score = g;
    result.root_children.push_back(st);
  }

  const int best = best_child(root(), false);
  if (best < 0 || nodes_[best].candidate == kHomeNode) {
    result.kind = SearchResult::Kind::kReturnHome;
    result.branch = {kHomeNode};
    return result;
  }
  result.kind = SearchResult::Kind::kGoal;
  result.goal = nodes_[best].candidate;
  for (int v = best; v >= 0; v = best_child(v, false)) result.branch.push_back(nodes_[v].candidate);
  return result;
}

nlohmann::json BmMcts::to_json(int max_depth) const {
  auto dump = [&](auto&& self, int v) -> nlohmann::json {
    const TreeNode& t = nodes_[v];
    nlohmann::json j = {{"candidate", t.candidate}, {"n", t.n},           {"n_ig", t.n_ig},
                        {"ig", t.ig},               {"E_R", t.energy_arrival}, {"T_R", t.time_arrival},
                        {"E_r", t.energy_final},    {"T_r", t.time_final},     {"kappa_e", t.kappa_e},
                        {"kappa_t", t.kappa_t},     {"pruned", t.pruned}};
    if (t.depth < max_depth) {
      nlohmann::json kids = nlohmann::json::array();
      for (int k : t.children) kids.push_back(self(self, k));
      j["children"] = std::move(kids);
    }
    return j;
  };
  return dump(dump, root());
}

}  // namespace bmx

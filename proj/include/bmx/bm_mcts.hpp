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

// Bimodal Monte Carlo tree search over viewpoints and locomotion modality.
//
// Each tree node is a viewpoint reached along its branch (or the robot pose
// at the root, or the return-home sentinel). Nodes carry the budget left on
// arrival, the budget estimated to remain after a guidance tour through the
// unvisited groups and home, exponential penalties on those estimates, and
// discounted information gain accumulators. Children are chosen by a
// lower-is-better UCB score on
//
//   G = -N(IG / n_IG) + kappa_E + kappa_T,   U = G - sqrt(2 ln n_s / n),
//
// where N maps sibling process gains linearly onto [epsilon, 1].

#ifndef BMX_BM_MCTS_HPP_
#define BMX_BM_MCTS_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmx/cost_model.hpp"
#include "bmx/grouped_tsp.hpp"
#include "bmx/viewpoint_gen.hpp"

namespace bmx {

struct PenaltyParams {
  double a1 = 10.0;
  double b1 = 2.0;
  double a2 = 4.0;
  double b2 = 0.0;
  double energy_budget = 1000.0;  // E_all
  double time_budget = 600.0;     // T_all

  double kappa_energy(double remaining) const;
  double kappa_time(double remaining) const;
  void validate() const;
};

struct SearchConfig {
  int iterations = 2000;
  double child_distance = 3.0;  // meters
  double gamma_ig = 0.8;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  // Exact remaining-tour table up to this many groups, per-simulation
  // heuristic tours above.
  int table_limit = 16;
  SolveOptions tsp{12, 0, 1};

  void validate() const;
};

// One selectable viewpoint as the planner sees it.
struct Candidate {
  Pose pose;
  Modality modality = Modality::kAerial;
  Strategy strategy = Strategy::kAerial;
  int group = 0;  // index into PlanningProblem::group_averages
  double ig = 0.0;
};

struct PlanningProblem {
  Pose robot;
  Vec3 home;
  double energy_remaining = 0.0;  // E_R at the root
  double time_remaining = 0.0;    // T_R at the root
  std::vector<Pose> group_averages;
  std::vector<Candidate> candidates;
  CostParams costs;
  PenaltyParams penalty;
  PathLengthFn estimator = straight_line_length;

  // Flattens each reachable group's AS then HS viewpoints into candidates.
  // `group_of_candidate` (optional) receives the source group position.
  static PlanningProblem from_groups(std::span<const ViewpointGroup> groups, const Pose& robot,
                                     const Vec3& home, double energy_remaining, double time_remaining,
                                     const CostParams& costs, const PenaltyParams& penalty,
                                     PathLengthFn estimator,
                                     std::vector<std::pair<int, int>>* source_of_candidate = nullptr);
};

inline constexpr int kRootNode = -1;
inline constexpr int kHomeNode = -2;

struct TreeNode {
  int candidate = kRootNode;  // candidate index, kRootNode, or kHomeNode
  int parent = -1;
  int depth = 0;
  std::vector<int> children;
  std::vector<int> unexpanded;  // candidate ids (kHomeNode included)
  bool potentials_ready = false;

  int n = 0;            // selection count
  double n_ig = 0.0;    // discounted visitation count
  double ig = 0.0;      // accumulated discounted information gain
  double energy_arrival = 0.0;  // E_R
  double time_arrival = 0.0;    // T_R
  double energy_final = 0.0;    // E_r
  double time_final = 0.0;      // T_r
  double kappa_e = 0.0;
  double kappa_t = 0.0;
  bool simulated = false;
  bool pruned = false;
  bool terminal = false;
};

struct Reward {
  double process = 0.0;   // R_p
  double terminal = 0.0;  // R_t
};

struct ChildStat {
  int candidate = kHomeNode;
  std::optional<Modality> modality;  // empty for the home sentinel
  int visits = 0;
  double process = 0.0;
  double terminal = 0.0;
  double score = 0.0;  // G, lower is better
  bool pruned = false;
};

struct SearchResult {
  enum class Kind { kGoal, kReturnHome, kComplete };
  Kind kind = Kind::kReturnHome;
  int goal = -1;            // candidate index when kind == kGoal
  std::vector<int> branch;  // candidate ids along best children (kHomeNode allowed)
  std::vector<ChildStat> root_children;
  int iterations = 0;
  std::size_t tree_size = 0;
};

class BmMcts {
 public:
  BmMcts(PlanningProblem problem, SearchConfig config);

  // Runs select / expand / simulate / backpropagate for the configured
  // number of iterations and extracts the best root child.
  SearchResult search();

  // Single steps, exposed for tests and instrumentation.
  int select();
  std::pair<bool, int> expand(int node);
  bool simulate(int node);
  void backpropagate(int node, int child);
  int best_child(int node, bool explore);
  std::vector<int> potential_children(int node) const;
  Reward reward(int node) const;
  // G for each unpruned, simulated child of `node`, keyed by node id.
  std::vector<std::pair<int, double>> child_scores(int node) const;

  int root() const { return 0; }
  const TreeNode& node(int id) const { return nodes_[id]; }
  TreeNode& mutable_node(int id) { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  // Appends a bare child without pricing or simulation (tests only).
  int add_node(int parent, int candidate);

  const PlanningProblem& problem() const { return problem_; }
  const SearchConfig& config() const { return config_; }
  Pose pose_of(int node) const;
  std::vector<int> branch_candidates(int node) const;  // root->node order
  nlohmann::json to_json(int max_depth) const;

 private:
  double edge_length(int from_candidate, int to_candidate);
  double group_to_home_time(int group);
  double guidance_time(int node);
  void prepare_groups();
  void revisit_terminal(int node);
  static double time_of(double len, double dyaw, CostMode m, const CostParams& c) {
    return time_from_length(len, dyaw, m, c);
  }

  PlanningProblem problem_;
  SearchConfig config_;
  std::vector<TreeNode> nodes_;
  std::mt19937_64 rng_;

  bool groups_ready_ = false;
  SquareMatrix group_to_group_;
  std::vector<double> group_to_home_;
  std::vector<char> group_reachable_;
  std::vector<int> table_slot_;  // group -> bit in the table, -1 when excluded
  std::unique_ptr<SuffixTourTable> table_;
  std::map<std::pair<int, int>, double> lengths_;
  std::map<int, std::vector<double>> anchor_rows_;  // candidate -> anchor->group times
};

}  // namespace bmx

#endif  // BMX_BM_MCTS_HPP_

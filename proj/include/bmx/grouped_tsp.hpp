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

// Guidance paths: an asymmetric TSP over viewpoint groups whose cost matrix
// pins the tour to start at the newly expanded viewpoint and end at home.
//
// Matrix layout (n = 2 + number of groups):
//   row/col 0      start anchor
//   rows 1..n-2    intermediate groups, priced at the average modality
//   row/col n-1    home
// home -> start is 0, every other edge into start and every edge out of home
// is +inf, and the diagonal is +inf. A closed tour through this matrix is
// therefore start -> ... -> home -> start, and cutting the free return edge
// yields the guidance path.

#ifndef BMX_GROUPED_TSP_HPP_
#define BMX_GROUPED_TSP_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmx/cost_model.hpp"

namespace bmx {

class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, double fill = kInf) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}
  int size() const { return n_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

struct GuidanceInstance {
  SquareMatrix cost;  // seconds
  int start() const { return 0; }
  int home() const { return cost.size() - 1; }
  int group_count() const { return cost.size() - 2; }

  nlohmann::json to_json() const;
};

// Builds the matrix for a guidance path that starts at `anchor` (the chosen
// viewpoint), passes the groups represented by `group_averages`, and ends
// at `home`.
GuidanceInstance build_matrix(const Pose& anchor, std::span<const Pose> group_averages, const Vec3& home,
                              const CostParams& params, const PathLengthFn& estimator);

// Same, from precomputed pieces: anchor->group times, group->group times
// (k x k, diagonal ignored), group->home times, anchor->home time.
GuidanceInstance assemble_matrix(std::span<const double> anchor_to_group, const SquareMatrix& group_to_group,
                                 std::span<const double> group_to_home, double anchor_to_home);

class PlanningDeadEnd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveOptions {
  int exact_limit = 12;  // Held-Karp at or below this many groups
  std::uint64_t seed = 0;
  int restarts = 6;
};

struct GuidanceTour {
  std::vector<int> order;    // intermediate group positions (0-based), visiting order
  std::vector<int> skipped;  // groups unreachable from the anchor or unable to reach home
  double total_time = 0.0;
  bool exact = false;
};

// Visits every reachable group once, start first and home last.
// Throws PlanningDeadEnd when no finite path exists.
GuidanceTour solve(const GuidanceInstance& inst, const SolveOptions& options = {});

// Exact closed-tour Held-Karp over the full matrix; returns the node cycle
// beginning at node 0 (without repeating it) and its cost.
std::pair<std::vector<int>, double> held_karp_cycle(const SquareMatrix& cost);

// Nearest-neighbour construction plus 2-opt / or-opt refinement of an open
// path from node 0 to node n-1 through all nodes in between.
std::pair<std::vector<int>, double> heuristic_path(const SquareMatrix& cost, std::uint64_t seed, int restarts);
std::pair<std::vector<int>, double> nearest_neighbor_path(const SquareMatrix& cost);
double path_cost(const SquareMatrix& cost, std::span<const int> path);

// Exact remaining-tour table: for every subset of groups and every entry
// group, the cheapest way to visit the subset and end at home. Answers the
// guidance cost for any anchor in O(k) once built.
class SuffixTourTable {
 public:
  SuffixTourTable() = default;
  SuffixTourTable(const SquareMatrix& group_to_group, std::span<const double> group_to_home);

  int group_count() const { return k_; }
  // Cheapest start -> (all groups in `mask`) -> home time.
  double query(std::span<const double> anchor_to_group, double anchor_to_home, std::uint32_t mask) const;

 private:
  int k_ = 0;
  std::vector<double> best_;  // [mask * k + j], j not in mask
};

}  // namespace bmx

#endif  // BMX_GROUPED_TSP_HPP_

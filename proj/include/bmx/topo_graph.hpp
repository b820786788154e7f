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

// Incremental roadmap of visited positions, used for fast conservative
// path-length estimates between arbitrary points in known space.

#ifndef BMX_TOPO_GRAPH_HPP_
#define BMX_TOPO_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmx/geometry.hpp"
#include "bmx/world_model.hpp"

namespace bmx {

struct TopoParams {
  double insertion_interval = 0.5;
  double connection_radius = 1.5;
  // Endpoints attach to every line-of-sight node within this radius.
  double attach_radius = 6.0;
};

struct TopoEdge {
  int to = 0;
  double length = 0.0;
};

class TopoGraph {
 public:
  explicit TopoGraph(TopoParams params = {}) : params_(params) {}

  // Adds `p` as a node iff it is at least the insertion interval away from
  // every existing node. Returns true when a node was added.
  bool record_position(const Vec3& p, const VoxelGrid& grid);

  // Entry segment + shortest graph path + exit segment, or the straight
  // segment when a and b see each other. +inf when no route exists.
  double estimate_path_length(const Vec3& a, const Vec3& b, const VoxelGrid& grid) const;

  // Line-of-sight nodes within the attach radius: (node, segment length).
  std::vector<std::pair<int, double>> attachments(const Vec3& p, const VoxelGrid& grid) const;

  // Multi-source Dijkstra; `sources` carry initial offsets.
  std::vector<double> distances_from(std::span<const std::pair<int, double>> sources) const;

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<std::vector<TopoEdge>>& adjacency() const { return adj_; }
  std::size_t edge_count() const;
  const TopoParams& params() const { return params_; }
  std::uint64_t revision() const { return revision_; }

  nlohmann::json to_json() const;

 private:
  TopoParams params_;
  std::vector<Vec3> nodes_;
  std::vector<std::vector<TopoEdge>> adj_;
  std::uint64_t revision_ = 0;
};

// Memoizing estimator bound to one graph + grid snapshot: topo-graph
// estimate first, known-space grid search when the roadmap has no route.
class CachedPathEstimator {
 public:
  CachedPathEstimator(const TopoGraph& graph, const VoxelGrid& grid, bool grid_fallback = true)
      : graph_(graph), grid_(grid), grid_fallback_(grid_fallback) {}

  double operator()(const Vec3& a, const Vec3& b);

  std::size_t cache_size() const { return pairs_.size(); }

 private:
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  static Key key_of(const Vec3& p);

  struct Source {
    std::vector<std::pair<int, double>> attach;
    std::vector<double> dist;
    bool dist_ready = false;
  };
  Source& source(const Vec3& p);

  const TopoGraph& graph_;
  const VoxelGrid& grid_;
  bool grid_fallback_;
  std::map<Key, Source> sources_;
  std::map<std::pair<Key, Key>, double> pairs_;
};

}  // namespace bmx

#endif  // BMX_TOPO_GRAPH_HPP_

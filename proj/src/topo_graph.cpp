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

#include "bmx/topo_graph.hpp"

#include <algorithm>
#include <queue>

#include "bmx/grid_search.hpp"

namespace bmx {

bool TopoGraph::record_position(const Vec3& p, const VoxelGrid& grid) {
  for (const Vec3& n : nodes_)
    if (distance(n, p) < params_.insertion_interval) return false;
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(p);
  adj_.emplace_back();
  for (int j = 0; j < id; ++j) {
    const double d = distance(nodes_[j], p);
    if (d > params_.connection_radius) continue;
    if (!segment_known_free(grid, nodes_[j], p)) continue;
    adj_[id].push_back({j, d});
    adj_[j].push_back({id, d});
  }
  ++revision_;
  return true;
}

std::size_t TopoGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adj_) n += a.size();
  return n / 2;
}

std::vector<std::pair<int, double>> TopoGraph::attachments(const Vec3& p, const VoxelGrid& grid) const {
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double d = distance(nodes_[i], p);
    if (d > params_.attach_radius) continue;
    if (d > 0.0 && !segment_known_free(grid, p, nodes_[i])) continue;
    out.emplace_back(static_cast<int>(i), d);
  }
  return out;
}

std::vector<double> TopoGraph::distances_from(std::span<const std::pair<int, double>> sources) const {
  std::vector<double> dist(nodes_.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (const auto& [n, d] : sources) {
    if (d < dist[n]) {
      dist[n] = d;
      open.emplace(d, n);
    }
  }
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    for (const TopoEdge& e : adj_[u]) {
      const double cand = d + e.length;
      if (cand < dist[e.to]) {
        dist[e.to] = cand;
        open.emplace(cand, e.to);
      }
    }
  }
  return dist;
}

double TopoGraph::estimate_path_length(const Vec3& a, const Vec3& b, const VoxelGrid& grid) const {
  if (a == b) return 0.0;
  double best = segment_known_free(grid, a, b) ? distance(a, b) : kInf;
  const auto src = attachments(a, grid);
  const auto dst = attachments(b, grid);
  if (src.empty() || dst.empty()) return best;

  std::vector<double> exit(nodes_.size(), kInf);
  for (const auto& [n, d] : dst) exit[n] = d;

  // A* over the roadmap toward b; every exit segment is at least the
  // straight-line heuristic, so the search may stop once f >= best.
  std::vector<double> g(nodes_.size(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (const auto& [n, d] : src) {
    if (d < g[n]) {
      g[n] = d;
      open.emplace(d + distance(nodes_[n], b), n);
    }
  }
  while (!open.empty()) {
    const auto [f, u] = open.top();
    open.pop();
    if (f >= best) break;
    const double gu = f - distance(nodes_[u], b);
    if (gu > g[u] + 1e-12) continue;
    if (exit[u] < kInf) best = std::min(best, g[u] + exit[u]);
    for (const TopoEdge& e : adj_[u]) {
      const double cand = g[u] + e.length;
      if (cand < g[e.to]) {
        g[e.to] = cand;
        open.emplace(cand + distance(nodes_[e.to], b), e.to);
      }
    }
  }
  return best;
}

nlohmann::json TopoGraph::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Vec3& n : nodes_) nodes.push_back({n.x, n.y, n.z});
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t i = 0; i < adj_.size(); ++i)
    for (const TopoEdge& e : adj_[i])
      if (static_cast<int>(i) < e.to) edges.push_back({i, e.to, e.length});
  return {{"nodes", nodes}, {"edges", edges}};
}

CachedPathEstimator::Key CachedPathEstimator::key_of(const Vec3& p) {
  constexpr double q = 1e6;
  return {std::llround(p.x * q), std::llround(p.y * q), std::llround(p.z * q)};
}

CachedPathEstimator::Source& CachedPathEstimator::source(const Vec3& p) {
  auto [it, inserted] = sources_.try_emplace(key_of(p));
  if (inserted) it->second.attach = graph_.attachments(p, grid_);
  return it->second;
}

double CachedPathEstimator::operator()(const Vec3& a, const Vec3& b) {
  if (a == b) return 0.0;
  const auto key = std::pair{key_of(a), key_of(b)};
  if (auto it = pairs_.find(key); it != pairs_.end()) return it->second;

  double best = segment_known_free(grid_, a, b) ? distance(a, b) : kInf;
  Source& sa = source(a);
  Source& sb = source(b);
  if (!sa.attach.empty() && !sb.attach.empty()) {
    if (!sa.dist_ready) {
      sa.dist = graph_.distances_from(sa.attach);
      sa.dist_ready = true;
    }
    for (const auto& [n, d] : sb.attach) best = std::min(best, sa.dist[n] + d);
  }
  if (!(best < kInf) && grid_fallback_) best = known_space_path_length(grid_, a, b);
  pairs_.emplace(key, best);
  return best;
}

}  // namespace bmx

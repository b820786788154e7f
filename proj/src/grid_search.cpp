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

#include "bmx/grid_search.hpp"

#include <queue>
#include <vector>

namespace bmx {

const std::array<Index3, 26>& lattice_moves() {
  static const std::array<Index3, 26> moves = [] {
    std::array<Index3, 26> m{};
    int k = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dx || dy || dz) m[k++] = {dx, dy, dz};
    return m;
  }();
  return moves;
}

bool move_clear(const VoxelGrid& grid, const Index3& from, const Index3& move) {
  for (int dz = std::min(0, move.z); dz <= std::max(0, move.z); ++dz)
    for (int dy = std::min(0, move.y); dy <= std::max(0, move.y); ++dy)
      for (int dx = std::min(0, move.x); dx <= std::max(0, move.x); ++dx)
        if (!grid.known_free(from + Index3{dx, dy, dz})) return false;
  return true;
}

double known_space_path_length(const VoxelGrid& grid, const Vec3& a, const Vec3& b) {
  const Index3 va = grid.voxel_of(a);
  const Index3 vb = grid.voxel_of(b);
  if (!grid.known_free(va) || !grid.known_free(vb)) return kInf;
  if (va == vb) return distance(a, b);
  const double res = grid.resolution();
  const std::size_t start = grid.index(va);
  const std::size_t goal = grid.index(vb);
  const Vec3 goal_c = grid.center(vb);

  std::vector<double> g(grid.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  g[start] = 0.0;
  open.emplace(distance(grid.center(start), goal_c), start);
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (cur == goal) break;
    const Index3 c = grid.coords(cur);
    if (f - distance(grid.center(cur), goal_c) > g[cur] + 1e-12) continue;
    for (const Index3& m : lattice_moves()) {
      if (!move_clear(grid, c, m)) continue;
      const std::size_t n = grid.index(c + m);
      const double step = res * std::sqrt(static_cast<double>(m.x * m.x + m.y * m.y + m.z * m.z));
      const double cand = g[cur] + step;
      if (cand < g[n]) {
        g[n] = cand;
        open.emplace(cand + distance(grid.center(n), goal_c), n);
      }
    }
  }
  if (!(g[goal] < kInf)) return kInf;
  return distance(a, grid.center(va)) + g[goal] + distance(goal_c, b);
}

}  // namespace bmx

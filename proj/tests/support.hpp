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

// Shared fixtures and independent oracles for the unit tests.

#ifndef BMX_TESTS_SUPPORT_HPP_
#define BMX_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <vector>

#include "bmx/world_model.hpp"

namespace bmx::testing {

inline VoxelGrid make_grid(GridDims d, double res, const std::function<bool(int, int, int)>& occupied = nullptr) {
  std::vector<std::uint8_t> truth(static_cast<std::size_t>(d.nx) * d.ny * d.nz, 0);
  if (occupied)
    for (int z = 0; z < d.nz; ++z)
      for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x)
          truth[(static_cast<std::size_t>(z) * d.ny + y) * d.nx + x] = occupied(x, y, z) ? 1 : 0;
  return VoxelGrid(d, res, std::move(truth));
}

inline void reveal_all(VoxelGrid& g) {
  for (std::size_t i = 0; i < g.size(); ++i) g.reveal(i);
}

inline void reveal_box(VoxelGrid& g, Index3 lo, Index3 hi) {
  for (int z = lo.z; z <= hi.z; ++z)
    for (int y = lo.y; y <= hi.y; ++y)
      for (int x = lo.x; x <= hi.x; ++x)
        if (g.contains(Index3{x, y, z})) g.reveal(g.index(Index3{x, y, z}));
}

// Brute-force frontier definition.
inline std::vector<std::size_t> frontier_oracle(const VoxelGrid& g) {
  std::vector<std::size_t> out;
  const Index3 nb[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.state(i) != CellState::kFree) continue;
    const Index3 c = g.coords(i);
    bool f = false;
    for (const Index3& d : nb) {
      const Index3 n{c.x + d.x, c.y + d.y, c.z + d.z};
      if (g.contains(n) && g.state(n) == CellState::kUnknown) f = true;
    }
    if (f) out.push_back(i);
  }
  return out;
}

// Dense 26-connected Dijkstra over known FREE voxels, no corner cutting,
// between voxel centers.
inline double grid_dijkstra(const VoxelGrid& g, const Index3& a, const Index3& b) {
  if (!g.known_free(a) || !g.known_free(b)) return kInf;
  std::vector<double> dist(g.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[g.index(a)] = 0.0;
  open.emplace(0.0, g.index(a));
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    const Index3 c = g.coords(u);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dx && !dy && !dz) continue;
          bool ok = true;
          for (int z = std::min(0, dz); z <= std::max(0, dz) && ok; ++z)
            for (int y = std::min(0, dy); y <= std::max(0, dy) && ok; ++y)
              for (int x = std::min(0, dx); x <= std::max(0, dx) && ok; ++x)
                ok = g.known_free(Index3{c.x + x, c.y + y, c.z + z});
          if (!ok) continue;
          const Index3 n{c.x + dx, c.y + dy, c.z + dz};
          const double nd = d + g.resolution() * std::sqrt(double(dx * dx + dy * dy + dz * dz));
          if (nd < dist[g.index(n)]) {
            dist[g.index(n)] = nd;
            open.emplace(nd, g.index(n));
          }
        }
  }
  return dist[g.index(b)];
}

}  // namespace bmx::testing

#endif  // BMX_TESTS_SUPPORT_HPP_

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

#include "bmx/scenes.hpp"

#include <algorithm>
#include <sstream>

namespace bmx {

SceneBuilder::SceneBuilder(GridDims dims, double resolution)
    : dims_(dims), res_(resolution), occ_(static_cast<std::size_t>(dims.nx) * dims.ny * dims.nz, 0) {}

void SceneBuilder::set(Index3 lo, Index3 hi, std::uint8_t v) {
  for (int z = std::max(lo.z, 0); z <= std::min(hi.z, dims_.nz - 1); ++z)
    for (int y = std::max(lo.y, 0); y <= std::min(hi.y, dims_.ny - 1); ++y)
      for (int x = std::max(lo.x, 0); x <= std::min(hi.x, dims_.nx - 1); ++x)
        occ_[(static_cast<std::size_t>(z) * dims_.ny + y) * dims_.nx + x] = v;
}

SceneBuilder& SceneBuilder::box(Index3 lo, Index3 hi) {
  set(lo, hi, 1);
  return *this;
}

SceneBuilder& SceneBuilder::clear(Index3 lo, Index3 hi) {
  set(lo, hi, 0);
  return *this;
}

std::string SceneBuilder::text() const {
  nlohmann::json header = extra_;
  header["resolution"] = res_;
  header["dims"] = {dims_.nx, dims_.ny, dims_.nz};
  header["start"] = {start_.x, start_.y, start_.z};
  if (has_home_) header["home"] = {home_.x, home_.y, home_.z};
  std::ostringstream out;
  out << header.dump() << "\n";
  for (int z = 0; z < dims_.nz; ++z) {
    out << "layer " << z << "\n";
    for (int y = 0; y < dims_.ny; ++y) {
      for (int x = 0; x < dims_.nx; ++x)
        out << (occ_[(static_cast<std::size_t>(z) * dims_.ny + y) * dims_.nx + x] ? '#' : '.');
      out << "\n";
    }
  }
  return out.str();
}

namespace {

nlohmann::json budgets(double energy, double time) { return {{"energy", energy}, {"time", time}}; }

}  // namespace

std::string room_scene(int nx, int ny, int nz, double resolution, double energy, double time) {
  return SceneBuilder({nx, ny, nz}, resolution)
      .start({1, 1, 0})
      .extra("name", "room")
      .extra("budgets", budgets(energy, time))
      .text();
}

std::string office_scene(double energy, double time) {
  SceneBuilder b({48, 20, 4}, 0.5);
  // Cubicle rows split by a long partition, bays every 4 m.
  b.box({0, 10, 0}, {47, 10, 1});
  for (int x = 8; x < 48; x += 8) b.box({x, 0, 0}, {x, 19, 1});
  for (int x = 0; x < 48; x += 8) b.clear({x + 3, 10, 0}, {x + 5, 10, 1});
  for (int x = 8; x < 48; x += 8) {
    b.clear({x, 4, 0}, {x, 6, 1});
    b.clear({x, 14, 0}, {x, 16, 1});
  }
  // Desks inside some bays.
  for (int x = 2; x < 48; x += 8) {
    b.box({x, 1, 0}, {x + 2, 2, 1});
    b.box({x + 1, 17, 0}, {x + 3, 18, 1});
  }
  return b.start({2, 5, 0}).extra("name", "office").extra("budgets", budgets(energy, time)).text();
}

std::string corridor_scene(double energy, double time) {
  SceneBuilder b({40, 4, 4}, 0.5);
  b.box({10, 0, 0}, {11, 1, 0});
  b.box({20, 2, 0}, {21, 3, 0});
  b.box({30, 0, 0}, {31, 1, 0});
  return b.start({1, 1, 0}).extra("name", "corridor").extra("budgets", budgets(energy, time)).text();
}

std::string two_level_scene(double energy, double time) {
  SceneBuilder b({28, 16, 6}, 0.5);
  // Raised platform, 1 m high, on the far half.
  b.box({16, 0, 0}, {27, 15, 1});
  // Low partitions on the floor level.
  b.box({6, 0, 0}, {6, 9, 1});
  b.box({11, 6, 0}, {11, 15, 1});
  return b.start({2, 2, 0}).extra("name", "two_level").extra("budgets", budgets(energy, time)).text();
}

}  // namespace bmx

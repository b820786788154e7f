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

// Procedural benchmark scenes, emitted in the text scene format.

#ifndef BMX_SCENES_HPP_
#define BMX_SCENES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmx/geometry.hpp"
#include "bmx/world_model.hpp"

namespace bmx {

class SceneBuilder {
 public:
  SceneBuilder(GridDims dims, double resolution);
  // Marks the inclusive voxel box occupied (clipped to the grid).
  SceneBuilder& box(Index3 lo, Index3 hi);
  SceneBuilder& clear(Index3 lo, Index3 hi);
  SceneBuilder& start(Index3 s) {
    start_ = s;
    return *this;
  }
  SceneBuilder& home(Index3 h) {
    home_ = h;
    has_home_ = true;
    return *this;
  }
  SceneBuilder& extra(const std::string& key, nlohmann::json value) {
    extra_[key] = std::move(value);
    return *this;
  }
  std::string text() const;

 private:
  void set(Index3 lo, Index3 hi, std::uint8_t v);
  GridDims dims_;
  double res_;
  std::vector<std::uint8_t> occ_;
  Index3 start_;
  Index3 home_;
  bool has_home_ = false;
  nlohmann::json extra_ = nlohmann::json::object();
};

// Empty box room, floor at z = 0.
std::string room_scene(int nx, int ny, int nz, double resolution, double energy, double time);

// Open-plan office: 24 m x 10 m x 2 m, cubicle partitions of 1 m with gaps.
std::string office_scene(double energy = 600.0, double time = 400.0);

// One-way corridor, 20 m x 2 m x 2 m, with low clutter along the floor.
std::string corridor_scene(double energy = 400.0, double time = 200.0);

// Low floor area next to a raised platform reachable only by flight.
std::string two_level_scene(double energy = 1000.0, double time = 600.0);

}  // namespace bmx

#endif  // BMX_SCENES_HPP_

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

// Voxel knowledge map, simulated lidar sensing, frontier extraction and
// ground traversability.
//
// The grid carries two layers: the immutable ground truth loaded from a
// scene, and the planner-visible knowledge state, which only ever moves out
// of UNKNOWN.

#ifndef BMX_WORLD_MODEL_HPP_
#define BMX_WORLD_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmx/geometry.hpp"

namespace bmx {

enum class CellState : std::uint8_t { kUnknown = 0, kFree = 1, kOccupied = 2 };

struct GridDims {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  bool operator==(const GridDims&) const = default;
};

class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(GridDims dims, double resolution, std::vector<std::uint8_t> occupied_truth);

  const GridDims& dims() const { return dims_; }
  double resolution() const { return resolution_; }
  std::size_t size() const { return state_.size(); }

  bool contains(const Index3& c) const {
    return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < dims_.nx && c.y < dims_.ny &&
           c.z < dims_.nz;
  }
  std::size_t index(const Index3& c) const {
    return (static_cast<std::size_t>(c.z) * dims_.ny + c.y) * dims_.nx + c.x;
  }
  Index3 coords(std::size_t idx) const {
    const int x = static_cast<int>(idx % dims_.nx);
    const int y = static_cast<int>((idx / dims_.nx) % dims_.ny);
    const int z = static_cast<int>(idx / (static_cast<std::size_t>(dims_.nx) * dims_.ny));
    return {x, y, z};
  }
  Vec3 center(const Index3& c) const {
    return {(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_, (c.z + 0.5) * resolution_};
  }
  Vec3 center(std::size_t idx) const { return center(coords(idx)); }
  Index3 voxel_of(const Vec3& p) const {
    return {static_cast<int>(std::floor(p.x / resolution_)),
            static_cast<int>(std::floor(p.y / resolution_)),
            static_cast<int>(std::floor(p.z / resolution_))};
  }
  bool contains(const Vec3& p) const { return contains(voxel_of(p)); }

  CellState state(std::size_t idx) const { return static_cast<CellState>(state_[idx]); }
  CellState state(const Index3& c) const { return state(index(c)); }
  bool truth_occupied(std::size_t idx) const { return truth_[idx] != 0; }
  bool truth_occupied(const Index3& c) const { return truth_occupied(index(c)); }
  bool known_free(const Index3& c) const { return contains(c) && state(c) == CellState::kFree; }

  // Copies ground truth into the knowledge layer for an UNKNOWN cell.
  // Returns true iff the cell changed.
  bool reveal(std::size_t idx) {
    if (state_[idx] != static_cast<std::uint8_t>(CellState::kUnknown)) return false;
    state_[idx] = static_cast<std::uint8_t>(truth_[idx] ? CellState::kOccupied : CellState::kFree);
    return true;
  }

  std::size_t count(CellState s) const;
  std::size_t truth_occupied_count() const;
  const std::vector<std::uint8_t>& truth() const { return truth_; }

  // Drops all knowledge; used by scene tooling and tests.
  void forget_all();

 private:
  GridDims dims_;
  double resolution_ = 0.0;
  std::vector<std::uint8_t> truth_;
  std::vector<std::uint8_t> state_;
};

// Omnidirectional lidar-like sensor.
struct SensorModel {
  double range = 5.0;
  double vertical_half_fov = 30.0 * kPi / 180.0;
  double horizontal_fov = 2.0 * kPi;
  double angular_resolution = 2.0 * kPi / 180.0;

  void validate() const;
  // True iff the direction from `pose` to `target` lies inside the FoV.
  bool in_fov(const Pose& pose, const Vec3& target) const;
};

// Visits every voxel crossed by the segment a->b, in order, starting with the
// voxel of a; stops when the segment leaves the grid or `visit` returns false.
// Returns false iff `visit` stopped the walk.
template <typename Visit>
bool walk_segment(const VoxelGrid& grid, const Vec3& a, const Vec3& b, Visit&& visit);

// True iff no voxel on the segment is anything other than known FREE.
bool segment_known_free(const VoxelGrid& grid, const Vec3& a, const Vec3& b);

// True iff no OCCUPIED (planner-visible) voxel lies strictly between `from`
// and the target voxel.
bool line_of_sight_to_voxel(const VoxelGrid& grid, const Vec3& from, std::size_t target);

// Raycasts the sensor from `pose` and reveals voxels from ground truth.
// Returns the sorted indices whose state changed.
std::vector<std::size_t> sense(VoxelGrid& grid, const Pose& pose, const SensorModel& sensor);

// FREE voxels with at least one face-adjacent UNKNOWN voxel, ascending.
std::vector<std::size_t> detect_frontiers(const VoxelGrid& grid);
bool is_frontier(const VoxelGrid& grid, std::size_t idx);

struct FrontierCluster {
  int id = 0;
  std::vector<std::size_t> members;
  Vec3 centroid;
  Vec3 normal{0.0, 0.0, 1.0};
};

struct ClusterParams {
  std::size_t max_size = 30;
};

// Face-connected components of the frontier set, split by principal-axis
// bisection until each holds at most `max_size` voxels.
std::vector<FrontierCluster> cluster_frontiers(const VoxelGrid& grid,
                                               std::span<const std::size_t> frontier,
                                               const ClusterParams& params = {});

// Direction from the cluster centroid toward the mean of the FREE non-member
// voxels face-adjacent to the cluster. Zero when there are none.
Vec3 known_space_direction(const VoxelGrid& grid, const FrontierCluster& cluster);

struct GroundParams {
  double clearance = 0.5;           // meters of free space required from the ground voxel up
  double sensor_offset = 0.3;       // terrestrial sensor height above the ground voxel center
  int clearance_voxels(double resolution) const;
};

// FREE voxels supported by OCCUPIED (or the grid floor) with enough FREE
// voxels above them. Ascending indices.
std::vector<std::size_t> traversable_ground_voxels(const VoxelGrid& grid,
                                                   const GroundParams& params = {});
bool is_traversable_ground(const VoxelGrid& grid, const Index3& c, int clearance_voxels);

// Ground-truth FREE voxels 6-connected to `start` (truth layer only).
std::vector<std::uint8_t> truth_reachable_free(const VoxelGrid& grid, const Index3& start);

// ---------------------------------------------------------------------------
// Scene files.

class SceneError : public std::runtime_error {
 public:
  SceneError(const std::string& what, int line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// Raw scene: ground truth plus the robot start / home ground voxels and the
// JSON header text (kept so the file round-trips).
struct Scene {
  VoxelGrid grid;
  Index3 start;
  Index3 home;
  double start_yaw = 0.0;
  std::string header_json;  // full header object, canonical dump
};

Scene parse_scene(const std::string& text);
Scene read_scene_file(const std::string& path);
std::string format_scene(const Scene& scene);
void write_scene_file(const Scene& scene, const std::string& path);

// Parses a scene, validates the start, and performs the initial sensing from
// the start pose.
Scene load_scenario(const std::string& text, const SensorModel& sensor, const GroundParams& ground);

// Pose of a terrestrial robot resting on ground voxel `g`.
Pose terrestrial_pose(const VoxelGrid& grid, const Index3& g, double yaw, const GroundParams& ground);

// Reveals the robot's own voxel, and for a grounded robot the ground voxel and
// the support beneath it.
std::vector<std::size_t> reveal_footprint(VoxelGrid& grid, const Vec3& position,
                                          std::optional<Index3> ground_voxel);

// ---------------------------------------------------------------------------

template <typename Visit>
bool walk_segment(const VoxelGrid& grid, const Vec3& a, const Vec3& b, Visit&& visit) {
  const double res = grid.resolution();
  Index3 cur = grid.voxel_of(a);
  const Index3 last = grid.voxel_of(b);
  const Vec3 d = b - a;
  int step[3];
  double t_max[3];
  double t_delta[3];
  const double origin[3] = {a.x, a.y, a.z};
  const double dir[3] = {d.x, d.y, d.z};
  int* cell[3] = {&cur.x, &cur.y, &cur.z};
  for (int k = 0; k < 3; ++k) {
    if (dir[k] > 0.0) {
      step[k] = 1;
      t_max[k] = ((*cell[k] + 1) * res - origin[k]) / dir[k];
      t_delta[k] = res / dir[k];
    } else if (dir[k] < 0.0) {
      step[k] = -1;
      t_max[k] = (*cell[k] * res - origin[k]) / dir[k];
      t_delta[k] = -res / dir[k];
    } else {
      step[k] = 0;
      t_max[k] = kInf;
      t_delta[k] = kInf;
    }
  }
  while (true) {
    if (!grid.contains(cur)) return true;
    if (!visit(grid.index(cur))) return false;
    if (cur == last) return true;
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (t_max[axis] > 1.0) return true;
    *cell[axis] += step[axis];
    t_max[axis] += t_delta[axis];
  }
}

}  // namespace bmx

#endif  // BMX_WORLD_MODEL_HPP_

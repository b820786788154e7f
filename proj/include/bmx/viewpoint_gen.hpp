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

// Bimodal viewpoint generation: raw aerial / terrestrial candidates around a
// frontier cluster, and greedy coverage selection into an aerial-only set and
// a terrestrial-first hybrid set.

#ifndef BMX_VIEWPOINT_GEN_HPP_
#define BMX_VIEWPOINT_GEN_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmx/geometry.hpp"
#include "bmx/world_model.hpp"

namespace bmx {

enum class Modality { kTerrestrial, kAerial };
enum class Strategy { kAerial, kHybrid };

std::string_view to_string(Modality m);
std::string_view to_string(Strategy s);

struct Viewpoint {
  Pose pose;
  Modality modality = Modality::kAerial;
  Strategy strategy = Strategy::kAerial;
  int cluster_id = -1;
  int ig = 0;
  // Positions into the owning cluster's member list that this viewpoint sees.
  std::vector<int> visible;
};

struct SamplingParams {
  double d_min = 1.0;
  double d_max = 4.0;
  double azimuth_span = 120.0 * kPi / 180.0;
  int radial_samples = 3;
  int azimuth_samples = 7;
  std::vector<double> height_offsets{0.0, -0.75, 0.75};
  GroundParams ground;

  void validate(const SensorModel& sensor) const;
};

struct ViewpointGroup {
  int cluster_id = -1;
  std::vector<Viewpoint> as;  // aerial-only strategy, in selection order
  std::vector<Viewpoint> hs;  // terrestrial first, then aerial supplements
  Pose average;               // mean position, circular-mean yaw over as and hs
  std::vector<int> coverable; // member positions targeted by both strategies
  bool reachable = true;

  void update_average();
};

std::vector<Viewpoint> sample_raw_aerial(const FrontierCluster& cluster, const VoxelGrid& grid,
                                         const SamplingParams& params);
std::vector<Viewpoint> sample_raw_terrestrial(const FrontierCluster& cluster, const VoxelGrid& grid,
                                              const SamplingParams& params);

// Member positions of `cluster` seen from `vp`: within range, inside the
// FoV, and with no OCCUPIED voxel on the ray.
std::vector<int> visible_members(const Viewpoint& vp, const FrontierCluster& cluster,
                                 const VoxelGrid& grid, const SensorModel& sensor);
int visible_frontier_count(const Viewpoint& vp, const FrontierCluster& cluster,
                           const VoxelGrid& grid, const SensorModel& sensor);

// Greedy set cover over `target` (member positions). Picks the candidate
// with the largest number of still-uncovered targets; ties go to the one
// closer to `centroid`, then to the lower index. Stops when nothing adds
// coverage. Returns candidate indices in selection order; if `gains` is
// non-null it receives the marginal gain of each pick.
std::vector<std::size_t> greedy_cover(std::span<const Viewpoint> candidates,
                                      std::span<const int> target, const Vec3& centroid,
                                      std::vector<int>* gains = nullptr);

ViewpointGroup build_group(const FrontierCluster& cluster, const VoxelGrid& grid,
                           const SensorModel& sensor, const SamplingParams& params);

nlohmann::json groups_to_json(std::span<const ViewpointGroup> groups);

}  // namespace bmx

#endif  // BMX_VIEWPOINT_GEN_HPP_

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

#include "bmx/viewpoint_gen.hpp"

#include <algorithm>
#include <stdexcept>

namespace bmx {

std::string_view to_string(Modality m) {
  return m == Modality::kAerial ? "A" : "T";
}

std::string_view to_string(Strategy s) {
  return s == Strategy::kAerial ? "AS" : "HS";
}

void SamplingParams::validate(const SensorModel& sensor) const {
  if (!(d_min > 0.0 && d_min < d_max && d_max <= sensor.range))
    throw std::invalid_argument("sampling requires 0 < d_min < d_max <= sensor range");
  if (radial_samples < 1 || azimuth_samples < 1) throw std::invalid_argument("sample counts must be positive");
}

void ViewpointGroup::update_average() {
  Vec3 sum;
  double c = 0.0, s = 0.0;
  std::size_t n = 0;
  for (const auto* set : {&as, &hs}) {
    for (const Viewpoint& vp : *set) {
      sum += vp.pose.position;
      c += std::cos(vp.pose.yaw);
      s += std::sin(vp.pose.yaw);
      ++n;
    }
  }
  if (n == 0) return;
  average.position = sum / static_cast<double>(n);
  average.yaw = (std::abs(c) < 1e-12 && std::abs(s) < 1e-12) ? 0.0 : wrap_angle(std::atan2(s, c));
}

std::vector<Viewpoint> sample_raw_aerial(const FrontierCluster& cluster, const VoxelGrid& grid,
                                         const SamplingParams& params) {
  std::vector<Viewpoint> out;
  if (cluster.members.empty()) return out;
  const double horiz = std::hypot(cluster.normal.x, cluster.normal.y);
  const double center_az = horiz > 1e-6 ? std::atan2(cluster.normal.y, cluster.normal.x) : 0.0;
  // A near-vertical normal carries no preferred azimuth; sample the full ring.
  const bool full_ring = horiz < 0.2;
  for (double dz : params.height_offsets) {
    for (int ri = 0; ri < params.radial_samples; ++ri) {
      const double r = params.radial_samples == 1
                           ? params.d_min
                           : params.d_min + ri * (params.d_max - params.d_min) / (params.radial_samples - 1);
      for (int ai = 0; ai < params.azimuth_samples; ++ai) {
        double az;
        if (full_ring) {
          az = center_az + 2.0 * kPi * ai / params.azimuth_samples;
        } else if (params.azimuth_samples == 1) {
          az = center_az;
        } else {
          az = center_az - params.azimuth_span / 2.0 + ai * params.azimuth_span / (params.azimuth_samples - 1);
        }
        const Vec3 p = cluster.centroid + Vec3{r * std::cos(az), r * std::sin(az), dz};
        if (!grid.known_free(grid.voxel_of(p))) continue;
        Viewpoint vp;
        vp.pose = {p, heading_to(p, cluster.centroid)};
        vp.modality = Modality::kAerial;
        vp.cluster_id = cluster.id;
        out.push_back(std::move(vp));
      }
    }
  }
  return out;
}

std::vector<Viewpoint> sample_raw_terrestrial(const FrontierCluster& cluster, const VoxelGrid& grid,
                                              const SamplingParams& params) {
  std::vector<Viewpoint> out;
  if (cluster.members.empty()) return out;
  const double res = grid.resolution();
  const int clearance = params.ground.clearance_voxels(res);
  const Index3 c = grid.voxel_of(cluster.centroid);
  const int reach = static_cast<int>(std::ceil(params.d_max / res)) + 1;
  for (int z = 0; z < grid.dims().nz; ++z) {
    for (int y = c.y - reach; y <= c.y + reach; ++y) {
      for (int x = c.x - reach; x <= c.x + reach; ++x) {
        const Index3 g{x, y, z};
        if (!grid.contains(g)) continue;
        if (horizontal_distance(grid.center(g), cluster.centroid) > params.d_max) continue;
        if (!is_traversable_ground(grid, g, clearance)) continue;
        Viewpoint vp;
        const Vec3 p = grid.center(g) + Vec3{0.0, 0.0, params.ground.sensor_offset};
        vp.pose = {p, heading_to(p, cluster.centroid)};
        vp.modality = Modality::kTerrestrial;
        vp.strategy = Strategy::kHybrid;
        vp.cluster_id = cluster.id;
        out.push_back(std::move(vp));
      }
    }
  }
  return out;
}

std::vector<int> visible_members(const Viewpoint& vp, const FrontierCluster& cluster,
                                 const VoxelGrid& grid, const SensorModel& sensor) {
  std::vector<int> out;
  for (std::size_t i = 0; i < cluster.members.size(); ++i) {
    const std::size_t m = cluster.members[i];
    const Vec3 target = grid.center(m);
    if (distance(vp.pose.position, target) > sensor.range) continue;
    if (!sensor.in_fov(vp.pose, target)) continue;
    if (!line_of_sight_to_voxel(grid, vp.pose.position, m)) continue;
    out.push_back(static_cast<int>(i));
  }
  return out;
}

int visible_frontier_count(const Viewpoint& vp, const FrontierCluster& cluster,
                           const VoxelGrid& grid, const SensorModel& sensor) {
  return static_cast<int>(visible_members(vp, cluster, grid, sensor).size());
}

std::vector<std::size_t> greedy_cover(std::span<const Viewpoint> candidates,
                                      std::span<const int> target, const Vec3& centroid,
                                      std::vector<int>* gains) {
  int max_pos = -1;
  for (int t : target) max_pos = std::max(max_pos, t);
  for (const Viewpoint& c : candidates)
    for (int v : c.visible) max_pos = std::max(max_pos, v);
  // 1 = still to cover.
  std::vector<std::uint8_t> open(static_cast<std::size_t>(max_pos + 1), 0);
  for (int t : target) open[t] = 1;

  std::vector<std::size_t> picked;
  if (gains) gains->clear();
  while (true) {
    int best_gain = 0;
    std::size_t best = candidates.size();
    double best_dist = kInf;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      int gain = 0;
      for (int v : candidates[i].visible) gain += open[v];
      if (gain == 0) continue;
      const double d = distance(candidates[i].pose.position, centroid);
      if (gain > best_gain || (gain == best_gain && d < best_dist)) {
        best_gain = gain;
        best = i;
        best_dist = d;
      }
    }
    if (best == candidates.size()) break;
    for (int v : candidates[best].visible) open[v] = 0;
    picked.push_back(best);
    if (gains) gains->push_back(best_gain);
  }
  return picked;
}

ViewpointGroup build_group(const FrontierCluster& cluster, const VoxelGrid& grid,
                           const SensorModel& sensor, const SamplingParams& params) {
  ViewpointGroup group;
  group.cluster_id = cluster.id;
  std::vector<Viewpoint> aerial = sample_raw_aerial(cluster, grid, params);
  std::vector<Viewpoint> ground = sample_raw_terrestrial(cluster, grid, params);
  for (auto* set : {&aerial, &ground}) {
    for (Viewpoint& vp : *set) {
      vp.visible = visible_members(vp, cluster, grid, sensor);
      vp.ig = static_cast<int>(vp.visible.size());
    }
  }

  // Aerial candidates are the universal fallback of both strategies, so the
  // coverage target is whatever they can see.
  std::vector<std::uint8_t> seen(cluster.members.size(), 0);
  for (const Viewpoint& vp : aerial)
    for (int v : vp.visible) seen[v] = 1;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) group.coverable.push_back(static_cast<int>(i));
  if (group.coverable.empty()) {
    group.reachable = false;
    return group;
  }

  for (std::size_t i : greedy_cover(aerial, group.coverable, cluster.centroid)) {
    Viewpoint vp = aerial[i];
    vp.strategy = Strategy::kAerial;
    group.as.push_back(std::move(vp));
  }

  std::vector<std::uint8_t> covered(cluster.members.size(), 0);
  for (std::size_t i : greedy_cover(ground, group.coverable, cluster.centroid)) {
    Viewpoint vp = ground[i];
    vp.strategy = Strategy::kHybrid;
    for (int v : vp.visible) covered[v] = 1;
    group.hs.push_back(std::move(vp));
  }
  std::vector<int> residual;
  for (int t : group.coverable)
    if (!covered[t]) residual.push_back(t);
  if (!residual.empty()) {
    for (std::size_t i : greedy_cover(aerial, residual, cluster.centroid)) {
      Viewpoint vp = aerial[i];
      vp.strategy = Strategy::kHybrid;
      group.hs.push_back(std::move(vp));
    }
  }
  group.update_average();
  return group;
}

nlohmann::json groups_to_json(std::span<const ViewpointGroup> groups) {
  nlohmann::json out = nlohmann::json::array();
  for (const ViewpointGroup& g : groups) {
    nlohmann::json jg;
    jg["cluster_id"] = g.cluster_id;
    jg["reachable"] = g.reachable;
    jg["coverable"] = g.coverable;
    jg["average"] = {{"position", {g.average.position.x, g.average.position.y, g.average.position.z}},
                     {"yaw", g.average.yaw}};
    for (const auto& [key, set] : {std::pair{"as", &g.as}, std::pair{"hs", &g.hs}}) {
      nlohmann::json arr = nlohmann::json::array();
      for (const Viewpoint& vp : *set) {
        arr.push_back({{"position", {vp.pose.position.x, vp.pose.position.y, vp.pose.position.z}},
                       {"yaw", vp.pose.yaw},
                       {"modality", to_string(vp.modality)},
                       {"strategy", to_string(vp.strategy)},
                       {"ig", vp.ig},
                       {"visible", vp.visible}});
      }
      jg[key] = std::move(arr);
    }
    out.push_back(std::move(jg));
  }
  return out;
}

}  // namespace bmx

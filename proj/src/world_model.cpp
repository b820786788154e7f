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

#include "bmx/world_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace bmx {
namespace {

constexpr Index3 kFaceNeighbors[6] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                      {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};

struct Pca {
  Vec3 mean;
  Vec3 axes[3];  // ascending eigenvalue order
  double eigenvalues[3] = {0.0, 0.0, 0.0};
};

Pca principal_components(const VoxelGrid& grid, std::span<const std::size_t> members) {
  Pca pca;
  for (std::size_t m : members) pca.mean += grid.center(m);
  pca.mean = pca.mean / static_cast<double>(members.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t m : members) {
    const Vec3 d = grid.center(m) - pca.mean;
    const Eigen::Vector3d v(d.x, d.y, d.z);
    cov += v * v.transpose();
  }
  cov /= static_cast<double>(members.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  for (int k = 0; k < 3; ++k) {
    const Eigen::Vector3d a = solver.eigenvectors().col(k);
    pca.axes[k] = {a.x(), a.y(), a.z()};
    pca.eigenvalues[k] = solver.eigenvalues()(k);
  }
  return pca;
}

void split_cluster(const VoxelGrid& grid, std::vector<std::size_t> members, std::size_t max_size,
                   std::vector<std::vector<std::size_t>>& out) {
  if (members.size() <= max_size) {
    out.push_back(std::move(members));
    return;
  }
  const Pca pca = principal_components(grid, members);
  const Vec3 axis = pca.axes[2];
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(members.size());
  for (std::size_t m : members) keyed.emplace_back(dot(grid.center(m) - pca.mean, axis), m);
  std::sort(keyed.begin(), keyed.end());
  const std::size_t half = keyed.size() / 2;
  std::vector<std::size_t> lo, hi;
  for (std::size_t i = 0; i < keyed.size(); ++i) (i < half ? lo : hi).push_back(keyed[i].second);
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());
  split_cluster(grid, std::move(lo), max_size, out);
  split_cluster(grid, std::move(hi), max_size, out);
}

Vec3 normalized_or(const Vec3& v, const Vec3& fallback) {
  const double n = norm(v);
  return n > 1e-12 ? v / n : fallback;
}

[[noreturn]] void scene_error(const std::string& msg, int line, const std::string& field) {
  throw SceneError("scene line " + std::to_string(line) + ": " + msg, line, field);
}

}  // namespace

VoxelGrid::VoxelGrid(GridDims dims, double resolution, std::vector<std::uint8_t> occupied_truth)
    : dims_(dims), resolution_(resolution), truth_(std::move(occupied_truth)) {
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) throw std::invalid_argument("grid dims must be positive");
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  const std::size_t n = static_cast<std::size_t>(dims.nx) * dims.ny * dims.nz;
  if (truth_.size() != n) throw std::invalid_argument("ground truth size does not match dims");
  state_.assign(n, static_cast<std::uint8_t>(CellState::kUnknown));
}

std::size_t VoxelGrid::count(CellState s) const {
  return static_cast<std::size_t>(
      std::count(state_.begin(), state_.end(), static_cast<std::uint8_t>(s)));
}

std::size_t VoxelGrid::truth_occupied_count() const {
  return static_cast<std::size_t>(std::count(truth_.begin(), truth_.end(), std::uint8_t{1}));
}

void VoxelGrid::forget_all() {
  std::fill(state_.begin(), state_.end(), static_cast<std::uint8_t>(CellState::kUnknown));
}

void SensorModel::validate() const {
  if (!(range > 0.0)) throw std::invalid_argument("sensor range must be positive");
  if (!(angular_resolution > 0.0)) throw std::invalid_argument("sensor angular resolution must be positive");
  const double steps = 2.0 * kPi / angular_resolution;
  if (std::abs(steps - std::round(steps)) > 1e-6)
    throw std::invalid_argument("sensor angular resolution must divide 2*pi");
  if (vertical_half_fov < 0.0 || vertical_half_fov > kPi / 2.0)
    throw std::invalid_argument("vertical half fov out of range");
}

bool SensorModel::in_fov(const Pose& pose, const Vec3& target) const {
  const Vec3 d = target - pose.position;
  const double horiz = std::hypot(d.x, d.y);
  const double elevation = std::atan2(d.z, horiz);
  if (std::abs(elevation) > vertical_half_fov + 1e-9) return false;
  if (horizontal_fov >= 2.0 * kPi - 1e-9) return true;
  if (horiz < 1e-12) return true;
  return yaw_difference(std::atan2(d.y, d.x), pose.yaw) <= horizontal_fov / 2.0 + 1e-9;
}

bool segment_known_free(const VoxelGrid& grid, const Vec3& a, const Vec3& b) {
  if (!grid.contains(a) || !grid.contains(b)) return false;
  return walk_segment(grid, a, b,
                      [&](std::size_t idx) { return grid.state(idx) == CellState::kFree; });
}

bool line_of_sight_to_voxel(const VoxelGrid& grid, const Vec3& from, std::size_t target) {
  if (!grid.contains(from)) return false;
  const Vec3 to = grid.center(target);
  bool reached = false;
  walk_segment(grid, from, to, [&](std::size_t idx) {
    if (idx == target) {
      reached = true;
      return false;
    }
    return grid.state(idx) != CellState::kOccupied;
  });
  return reached;
}

std::vector<std::size_t> sense(VoxelGrid& grid, const Pose& pose, const SensorModel& sensor) {
  if (!grid.contains(pose.position)) throw std::domain_error("sensor pose outside grid");
  if (grid.truth_occupied(grid.index(grid.voxel_of(pose.position))))
    throw std::domain_error("sensor pose inside an occupied voxel");

  std::vector<std::size_t> changed;
  const std::size_t own = grid.index(grid.voxel_of(pose.position));
  if (grid.reveal(own)) changed.push_back(own);

  const double res = sensor.angular_resolution;
  const bool full = sensor.horizontal_fov >= 2.0 * kPi - 1e-9;
  const int n_az = full ? static_cast<int>(std::lround(2.0 * kPi / res))
                        : static_cast<int>(std::floor(sensor.horizontal_fov / res + 1e-9)) + 1;
  const double az0 = full ? 0.0 : pose.yaw - sensor.horizontal_fov / 2.0;
  const int n_el = static_cast<int>(std::floor(2.0 * sensor.vertical_half_fov / res + 1e-9)) + 1;

  for (int i = 0; i < n_az; ++i) {
    const double az = az0 + i * res;
    const double ca = std::cos(az), sa = std::sin(az);
    for (int j = 0; j < n_el; ++j) {
      const double el = -sensor.vertical_half_fov + j * res;
      const double ce = std::cos(el);
      const Vec3 dir{ca * ce, sa * ce, std::sin(el)};
      const Vec3 end = pose.position + dir * sensor.range;
      walk_segment(grid, pose.position, end, [&](std::size_t idx) {
        if (grid.reveal(idx)) changed.push_back(idx);
        return !grid.truth_occupied(idx);
      });
    }
  }
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  return changed;
}

bool is_frontier(const VoxelGrid& grid, std::size_t idx) {
  if (grid.state(idx) != CellState::kFree) return false;
  const Index3 c = grid.coords(idx);
  for (const Index3& d : kFaceNeighbors) {
    const Index3 n = c + d;
    if (grid.contains(n) && grid.state(n) == CellState::kUnknown) return true;
  }
  return false;
}

std::vector<std::size_t> detect_frontiers(const VoxelGrid& grid) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (is_frontier(grid, i)) out.push_back(i);
  return out;
}

Vec3 known_space_direction(const VoxelGrid& grid, const FrontierCluster& cluster) {
  std::vector<std::size_t> sorted = cluster.members;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> neighbors;
  for (std::size_t m : sorted) {
    const Index3 c = grid.coords(m);
    for (const Index3& d : kFaceNeighbors) {
      const Index3 n = c + d;
      if (!grid.contains(n) || grid.state(n) != CellState::kFree) continue;
      const std::size_t ni = grid.index(n);
      if (std::binary_search(sorted.begin(), sorted.end(), ni)) continue;
      neighbors.push_back(ni);
    }
  }
  std::sort(neighbors.begin(), neighbors.end());
  neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
  if (neighbors.empty()) return {};
  Vec3 mean;
  for (std::size_t n : neighbors) mean += grid.center(n);
  return mean / static_cast<double>(neighbors.size()) - cluster.centroid;
}

std::vector<FrontierCluster> cluster_frontiers(const VoxelGrid& grid,
                                               std::span<const std::size_t> frontier,
                                               const ClusterParams& params) {
  if (params.max_size == 0) throw std::invalid_argument("cluster max size must be positive");
  std::vector<std::size_t> sorted(frontier.begin(), frontier.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  // 0 = not frontier, 1 = unvisited frontier, 2 = visited.
  std::vector<std::uint8_t> mark(grid.size(), 0);
  for (std::size_t f : sorted) mark[f] = 1;

  std::vector<std::vector<std::size_t>> parts;
  for (std::size_t seed : sorted) {
    if (mark[seed] != 1) continue;
    std::vector<std::size_t> component;
    std::deque<std::size_t> queue{seed};
    mark[seed] = 2;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      component.push_back(cur);
      const Index3 c = grid.coords(cur);
      for (const Index3& d : kFaceNeighbors) {
        const Index3 n = c + d;
        if (!grid.contains(n)) continue;
        const std::size_t ni = grid.index(n);
        if (mark[ni] != 1) continue;
        mark[ni] = 2;
        queue.push_back(ni);
      }
    }
    std::sort(component.begin(), component.end());
    split_cluster(grid, std::move(component), params.max_size, parts);
  }

  std::vector<FrontierCluster> clusters;
  clusters.reserve(parts.size());
  for (auto& members : parts) {
    FrontierCluster cl;
    cl.id = static_cast<int>(clusters.size());
    cl.members = std::move(members);
    const Pca pca = principal_components(grid, cl.members);
    cl.centroid = pca.mean;
    const Vec3 known = known_space_direction(grid, cl);
    const double tiny = 1e-6 * grid.resolution() * grid.resolution();
    Vec3 n;
    if (cl.members.size() >= 3 && pca.eigenvalues[1] > tiny) {
      n = pca.axes[0];
    } else if (cl.members.size() >= 2 && pca.eigenvalues[2] > tiny) {
      const Vec3 line = pca.axes[2];
      n = normalized_or(known - line * dot(known, line), {0.0, 0.0, 1.0});
    } else {
      n = normalized_or(known, {0.0, 0.0, 1.0});
    }
    n = normalized_or(n, {0.0, 0.0, 1.0});
    if (dot(n, known) < 0.0) n = n * -1.0;
    cl.normal = n;
    clusters.push_back(std::move(cl));
  }
  return clusters;
}

int GroundParams::clearance_voxels(double resolution) const {
  const int by_height = static_cast<int>(std::ceil(clearance / resolution - 1e-9));
  const int sensor_layer = static_cast<int>(std::floor((0.5 * resolution + sensor_offset) / resolution));
  return std::max({1, by_height, sensor_layer + 1});
}

bool is_traversable_ground(const VoxelGrid& grid, const Index3& c, int clearance_voxels) {
  if (!grid.contains(c) || grid.state(c) != CellState::kFree) return false;
  if (c.z > 0 && grid.state(Index3{c.x, c.y, c.z - 1}) != CellState::kOccupied) return false;
  for (int k = 1; k < clearance_voxels; ++k) {
    const Index3 up{c.x, c.y, c.z + k};
    if (up.z >= grid.dims().nz || grid.state(up) != CellState::kFree) return false;
  }
  return true;
}

std::vector<std::size_t> traversable_ground_voxels(const VoxelGrid& grid, const GroundParams& params) {
  const int clearance = params.clearance_voxels(grid.resolution());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (is_traversable_ground(grid, grid.coords(i), clearance)) out.push_back(i);
  return out;
}

std::vector<std::uint8_t> truth_reachable_free(const VoxelGrid& grid, const Index3& start) {
  std::vector<std::uint8_t> seen(grid.size(), 0);
  if (!grid.contains(start) || grid.truth_occupied(start)) return seen;
  std::deque<std::size_t> queue{grid.index(start)};
  seen[grid.index(start)] = 1;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const Index3 c = grid.coords(cur);
    for (const Index3& d : kFaceNeighbors) {
      const Index3 n = c + d;
      if (!grid.contains(n)) continue;
      const std::size_t ni = grid.index(n);
      if (seen[ni] || grid.truth_occupied(ni)) continue;
      seen[ni] = 1;
      queue.push_back(ni);
    }
  }
  return seen;
}

// ---------------------------------------------------------------------------
// Scene files: a JSON header object followed by `layer <z>` blocks of ny rows
// with nx characters each ('#' occupied, '.' free). Row r holds y = r.

Scene parse_scene(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    lines.push_back(l);
  }
  std::size_t first_layer = 0;
  while (first_layer < lines.size() && lines[first_layer].rfind("layer", 0) != 0) ++first_layer;
  std::string header_text;
  for (std::size_t i = 0; i < first_layer; ++i) header_text += lines[i] + "\n";

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::parse_error& e) {
    scene_error(std::string("malformed header: ") + e.what(), 1, "header");
  }
  if (!header.is_object()) scene_error("header must be a JSON object", 1, "header");

  auto require = [&](const char* field) -> const nlohmann::json& {
    if (!header.contains(field)) scene_error(std::string("missing field '") + field + "'", 1, field);
    return header.at(field);
  };
  auto int_triple = [&](const char* field) {
    const auto& v = require(field);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number_integer() || !v[1].is_number_integer() ||
        !v[2].is_number_integer())
      scene_error(std::string("field '") + field + "' must be three integers", 1, field);
    return Index3{v[0].get<int>(), v[1].get<int>(), v[2].get<int>()};
  };

  const auto& res_json = require("resolution");
  if (!res_json.is_number() || !(res_json.get<double>() > 0.0))
    scene_error("field 'resolution' must be a positive number", 1, "resolution");
  const double resolution = res_json.get<double>();
  const Index3 d = int_triple("dims");
  if (d.x <= 0 || d.y <= 0 || d.z <= 0) scene_error("field 'dims' must be positive", 1, "dims");
  const Index3 start = int_triple("start");
  const Index3 home = header.contains("home") ? int_triple("home") : start;
  double start_yaw = 0.0;
  if (header.contains("start_yaw")) {
    if (!header["start_yaw"].is_number()) scene_error("field 'start_yaw' must be a number", 1, "start_yaw");
    start_yaw = header["start_yaw"].get<double>();
  }

  const GridDims dims{d.x, d.y, d.z};
  std::vector<std::uint8_t> truth(static_cast<std::size_t>(d.x) * d.y * d.z, 0);
  std::vector<bool> layer_seen(d.z, false);
  std::size_t li = first_layer;
  while (li < lines.size()) {
    const int line_no = static_cast<int>(li) + 1;
    if (lines[li].empty()) {
      ++li;
      continue;
    }
    std::istringstream ls(lines[li]);
    std::string tag;
    int z = -1;
    ls >> tag >> z;
    if (tag != "layer" || ls.fail()) scene_error("expected 'layer <z>'", line_no, "layer");
    if (z < 0 || z >= d.z) scene_error("layer index out of range", line_no, "layer");
    if (layer_seen[z]) scene_error("duplicate layer", line_no, "layer");
    layer_seen[z] = true;
    ++li;
    for (int y = 0; y < d.y; ++y, ++li) {
      if (li >= lines.size()) scene_error("truncated layer", static_cast<int>(li) + 1, "layer");
      const std::string& row = lines[li];
      if (static_cast<int>(row.size()) != d.x)
        scene_error("row width does not match dims", static_cast<int>(li) + 1, "layer");
      for (int x = 0; x < d.x; ++x) {
        const char ch = row[x];
        if (ch != '#' && ch != '.') scene_error("unexpected cell character", static_cast<int>(li) + 1, "layer");
        truth[(static_cast<std::size_t>(z) * d.y + y) * d.x + x] = ch == '#' ? 1 : 0;
      }
    }
  }
  for (int z = 0; z < d.z; ++z)
    if (!layer_seen[z]) scene_error("missing layer " + std::to_string(z), static_cast<int>(lines.size()), "layer");

  Scene scene;
  scene.grid = VoxelGrid(dims, resolution, std::move(truth));
  scene.start = start;
  scene.home = home;
  scene.start_yaw = start_yaw;
  scene.header_json = header.dump(2);
  return scene;
}

std::string format_scene(const Scene& scene) {
  std::ostringstream out;
  out << scene.header_json << "\n";
  const GridDims& d = scene.grid.dims();
  for (int z = 0; z < d.nz; ++z) {
    out << "layer " << z << "\n";
    for (int y = 0; y < d.ny; ++y) {
      std::string row(d.nx, '.');
      for (int x = 0; x < d.nx; ++x)
        if (scene.grid.truth_occupied(Index3{x, y, z})) row[x] = '#';
      out << row << "\n";
    }
  }
  return out.str();
}

Scene read_scene_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SceneError("cannot open scene file " + path, 0, "path");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scene(ss.str());
}

void write_scene_file(const Scene& scene, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw SceneError("cannot write scene file " + path, 0, "path");
  f << format_scene(scene);
}

Pose terrestrial_pose(const VoxelGrid& grid, const Index3& g, double yaw, const GroundParams& ground) {
  return {grid.center(g) + Vec3{0.0, 0.0, ground.sensor_offset}, yaw};
}

std::vector<std::size_t> reveal_footprint(VoxelGrid& grid, const Vec3& position,
                                          std::optional<Index3> ground_voxel) {
  std::vector<std::size_t> changed;
  auto touch = [&](const Index3& c) {
    if (grid.contains(c) && grid.reveal(grid.index(c))) changed.push_back(grid.index(c));
  };
  touch(grid.voxel_of(position));
  if (ground_voxel) {
    const Index3 g = *ground_voxel;
    for (int z = g.z; z <= grid.voxel_of(position).z; ++z) touch({g.x, g.y, z});
    if (g.z > 0) touch({g.x, g.y, g.z - 1});
  }
  return changed;
}

Scene load_scenario(const std::string& text, const SensorModel& sensor, const GroundParams& ground) {
  Scene scene = parse_scene(text);
  VoxelGrid& grid = scene.grid;
  auto check_ground = [&](const Index3& c, const char* field) {
    if (!grid.contains(c)) scene_error(std::string(field) + " outside the grid", 1, field);
    if (grid.truth_occupied(c)) scene_error(std::string(field) + " inside an occupied voxel", 1, field);
    if (c.z > 0 && !grid.truth_occupied(Index3{c.x, c.y, c.z - 1}))
      scene_error(std::string(field) + " is not supported by ground", 1, field);
    const Pose p = terrestrial_pose(grid, c, 0.0, ground);
    if (!grid.contains(p.position) || grid.truth_occupied(grid.index(grid.voxel_of(p.position))))
      scene_error(std::string(field) + " has no sensor clearance", 1, field);
  };
  check_ground(scene.start, "start");
  check_ground(scene.home, "home");
  sensor.validate();
  const Pose pose = terrestrial_pose(grid, scene.start, scene.start_yaw, ground);
  reveal_footprint(grid, pose.position, scene.start);
  sense(grid, pose, sensor);
  return scene;
}

}  // namespace bmx

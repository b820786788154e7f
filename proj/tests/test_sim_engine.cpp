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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>

#include "bmx/scenes.hpp"
#include "bmx/sim_engine.hpp"
#include "support.hpp"

using namespace bmx;
using bmx::testing::make_grid;
using bmx::testing::reveal_all;
using doctest::Approx;

namespace {

RobotState airborne(const Vec3& p) {
  RobotState r;
  r.position = p;
  r.modality = Modality::kAerial;
  r.home = p;
  return r;
}

RobotState grounded(const VoxelGrid& g, Index3 c, const GroundParams& gp = {}) {
  RobotState r;
  r.position = terrestrial_pose(g, c, 0.0, gp).position;
  r.ground = c;
  r.home = r.position;
  return r;
}

std::string compress(const std::vector<Waypoint>& w) {
  std::string s;
  for (const Waypoint& p : w) {
    const char c = p.modality == Modality::kAerial ? 'A' : 'T';
    if (s.empty() || s.back() != c) s += c;
  }
  return s;
}

// 8-connected planar Dijkstra over ground voxels of one layer.
double floor_oracle(const VoxelGrid& g, Index3 a, Index3 b, int clearance) {
  const GridDims d = g.dims();
  std::vector<double> dist(g.size(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[g.index(a)] = 0.0;
  open.emplace(0.0, g.index(a));
  auto ok = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < d.nx && y < d.ny && is_traversable_ground(g, {x, y, a.z}, clearance);
  };
  while (!open.empty()) {
    auto [du, u] = open.top();
    open.pop();
    if (du > dist[u]) continue;
    const Index3 c = g.coords(u);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if ((!dx && !dy) || !ok(c.x + dx, c.y + dy)) continue;
        if (dx && dy && (!ok(c.x + dx, c.y) || !ok(c.x, c.y + dy))) continue;
        const std::size_t v = g.index(Index3{c.x + dx, c.y + dy, a.z});
        const double nd = du + g.resolution() * std::hypot(dx, dy);
        if (nd < dist[v]) {
          dist[v] = nd;
          open.emplace(nd, v);
        }
      }
  }
  return dist[g.index(b)];
}

// Straight aerial leg split into lattice-sized steps, as the planner emits.
BimodalPath aerial_steps(const Vec3& from, const Vec3& to, double step = 0.25) {
  BimodalPath p;
  const int n = static_cast<int>(std::ceil(distance(from, to) / step - 1e-9));
  for (int k = 1; k <= n; ++k)
    p.waypoints.push_back({from + (to - from) * (static_cast<double>(k) / n), Modality::kAerial, std::nullopt,
                           std::nullopt});
  return p;
}

ExplorationConfig quick_config(double energy, double time) {
  ExplorationConfig c;
  c.energy_budget = energy;
  c.time_budget = time;
  c.search.iterations = 150;
  return c;
}

}  // namespace

TEST_CASE("budget ledger is exact in micro-units") {
  BudgetState b(100.0, 50.0);
  const CostParams c;
  const TimeEnergy te = b.deduct(2.0, Modality::kAerial, c);
  CHECK(te.time == 2.0);
  CHECK(te.energy == 14.0);
  b.deduct(0.1, Modality::kTerrestrial, c);
  b.deduct(0.2, Modality::kTerrestrial, c);
  CHECK(b.time_used_units() == 2300000);
  CHECK(b.energy_used_units() == 14300000);
  CHECK(b.time_in(Modality::kTerrestrial) == Approx(0.3));
  CHECK(b.energy_remaining() == Approx(85.7));
  CHECK_THROWS_AS(BudgetState(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("execute: straight aerial leg") {
  VoxelGrid g = make_grid({20, 20, 8}, 0.25);
  reveal_all(g);
  RobotState r = airborne({1.0, 2.5, 1.0});
  BudgetState b(100.0, 100.0);
  TopoGraph topo;
  const BimodalPath p = aerial_steps(r.position, {3.0, 2.5, 1.0});
  const ExecutionResult res = execute(p, r, b, g, SensorModel{}, topo, CostParams{});
  CHECK(res.status == ExecutionResult::Status::kArrived);
  CHECK(b.time_used() == Approx(2.0));
  CHECK(b.energy_used() == Approx(14.0));
  CHECK(b.time_in(Modality::kAerial) == Approx(2.0));
  CHECK(res.distance == Approx(2.0));
  CHECK(distance(r.position, {3.0, 2.5, 1.0}) < 1e-12);
  CHECK(r.modality == Modality::kAerial);
  CHECK(res.senses == 5);
  CHECK(topo.nodes().size() == 4);
}

TEST_CASE("execute: empty path senses once without consuming") {
  VoxelGrid g = make_grid({20, 20, 8}, 0.25);
  RobotState r = airborne({2.5, 2.5, 1.0});
  BudgetState b(10.0, 10.0);
  TopoGraph topo;
  const ExecutionResult res = execute(BimodalPath{}, r, b, g, SensorModel{}, topo, CostParams{});
  CHECK(res.status == ExecutionResult::Status::kArrived);
  CHECK(res.senses == 1);
  CHECK_FALSE(res.revealed.empty());
  CHECK(b.energy_used_units() == 0);
  CHECK(b.time_used_units() == 0);
}

TEST_CASE("execute: partial move when energy runs out") {
  VoxelGrid g = make_grid({20, 20, 8}, 0.25);
  reveal_all(g);
  RobotState r = airborne({1.0, 2.5, 1.0});
  BudgetState b(7.0, 100.0);
  TopoGraph topo;
  BimodalPath p;
  p.waypoints.push_back({{3.0, 2.5, 1.0}, Modality::kAerial, std::nullopt, std::nullopt});
  const ExecutionResult res = execute(p, r, b, g, SensorModel{}, topo, CostParams{});
  CHECK(res.status == ExecutionResult::Status::kBudgetExhausted);
  CHECK(b.energy_remaining() == Approx(0.0).epsilon(1e-6));
  CHECK(r.position.x == Approx(2.0).epsilon(1e-5));
}

TEST_CASE("execute: newly sensed obstacle aborts the remaining path") {
  // Wall at x voxel 12 (3.0 m .. 3.25 m), initially unknown.
  VoxelGrid g = make_grid({24, 20, 8}, 0.25, [](int x, int, int) { return x == 12; });
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.truth_occupied(i)) g.reveal(i);
  RobotState r = airborne({1.0, 2.5, 1.0});
  BudgetState b(100.0, 100.0);
  TopoGraph topo;
  BimodalPath p;
  p.waypoints.push_back({{2.0, 2.5, 1.0}, Modality::kAerial, std::nullopt, std::nullopt});
  p.waypoints.push_back({{4.0, 2.5, 1.0}, Modality::kAerial, std::nullopt, std::nullopt});
  const ExecutionResult res = execute(p, r, b, g, SensorModel{}, topo, CostParams{});
  CHECK(res.status == ExecutionResult::Status::kAborted);
  CHECK(r.position == Vec3{2.0, 2.5, 1.0});
  CHECK(b.energy_used() == Approx(7.0));
  CHECK(g.state(g.voxel_of({3.1, 2.5, 1.0})) == CellState::kOccupied);
}

TEST_CASE("execute: stop callback ends early") {
  VoxelGrid g = make_grid({40, 8, 8}, 0.25);
  reveal_all(g);
  RobotState r = airborne({0.5, 1.0, 1.0});
  BudgetState b(100.0, 100.0);
  TopoGraph topo;
  const BimodalPath p = aerial_steps(r.position, {9.0, 1.0, 1.0});
  int polls = 0;
  const ExecutionResult res =
      execute(p, r, b, g, SensorModel{}, topo, CostParams{}, {}, [&] { return ++polls >= 3; });
  CHECK(res.status == ExecutionResult::Status::kStopped);
  CHECK(polls == 3);
  CHECK(r.position.x == Approx(2.0));
  CHECK(b.time_used() == Approx(r.position.x - 0.5));
}

TEST_CASE("bimodal_path: open space goes aerial") {
  VoxelGrid g = make_grid({20, 20, 12}, 0.25);
  reveal_all(g);
  const RobotState r = airborne(g.center(Index3{2, 2, 6}));
  const Pose goal{g.center(Index3{14, 10, 6}), 1.0};
  const auto path = bimodal_path(g, r, goal, Modality::kAerial, GroundParams{}, CostParams{});
  REQUIRE(path);
  CHECK(compress(path->waypoints) == "A");
  CHECK(path->waypoints.back().position == goal.position);
  CHECK(path->waypoints.back().yaw == 1.0);
  CHECK(path->search_cost >= distance(r.position, goal.position) - 1e-9);
  CHECK(path->search_cost <= 1.09 * distance(r.position, goal.position));
}

TEST_CASE("bimodal_path: flat floor stays terrestrial and matches a planar oracle") {
  VoxelGrid g = make_grid({24, 16, 8}, 0.25, [](int x, int y, int z) {
    return z == 0 || (x == 10 && y < 11 && z <= 4);
  });
  reveal_all(g);
  const GroundParams gp;
  const Index3 a{2, 2, 1}, goal_v{20, 3, 1};
  const RobotState r = grounded(g, a, gp);
  const Pose goal = terrestrial_pose(g, goal_v, 0.0, gp);
  const auto path = bimodal_path(g, r, goal, Modality::kTerrestrial, gp, CostParams{});
  REQUIRE(path);
  CHECK(compress(path->waypoints) == "T");
  const double oracle = floor_oracle(g, a, goal_v, gp.clearance_voxels(g.resolution()));
  REQUIRE(oracle < kInf);
  CHECK(path->search_cost == Approx(oracle));
  for (const Waypoint& w : path->waypoints) CHECK(w.ground);
  const TimeEnergy te = path_consumption(*path, r, CostParams{});
  CHECK(te.time == Approx(oracle / 0.5));
  CHECK(te.energy == Approx(oracle / 0.5));
}

TEST_CASE("bimodal_path: raised platform needs a T-A-T path") {
  const Scene s = parse_scene(two_level_scene());
  VoxelGrid g = s.grid;
  reveal_all(g);
  const GroundParams gp;
  const RobotState r = grounded(g, s.start, gp);
  const Index3 top{22, 8, 2};
  REQUIRE(is_traversable_ground(g, top, gp.clearance_voxels(g.resolution())));
  const auto path = bimodal_path(g, r, terrestrial_pose(g, top, 0.0, gp), Modality::kTerrestrial, gp, CostParams{});
  REQUIRE(path);
  CHECK(compress(path->waypoints) == "TAT");
  CHECK(path->waypoints.back().ground == top);

  SUBCASE("an unknown goal has no path") {
    VoxelGrid fresh = s.grid;
    CHECK_FALSE(bimodal_path(fresh, r, terrestrial_pose(g, top, 0.0, gp), Modality::kTerrestrial, gp, CostParams{}));
  }
}

TEST_CASE("exploration of a tiny room completes at home") {
  const Scene s = load_scenario(room_scene(8, 8, 4, 0.5, 2000.0, 2000.0), SensorModel{}, GroundParams{});
  const ExplorationResult res = run_exploration(s, quick_config(2000.0, 2000.0));
  CHECK(res.summary.status == RunStatus::kSuccess);
  CHECK(res.summary.at_home);
  CHECK(res.summary.coverage >= 0.99);
  CHECK(classify_log(res.log, terrestrial_pose(s.grid, s.home, 0.0, GroundParams{}).position) == RunStatus::kSuccess);
}

TEST_CASE("zero energy returns home immediately") {
  const Scene s = load_scenario(room_scene(8, 8, 4, 0.5, 0.0, 100.0), SensorModel{}, GroundParams{});
  const ExplorationResult res = run_exploration(s, quick_config(0.0, 100.0));
  CHECK(res.summary.status == RunStatus::kSuccess);
  CHECK(res.summary.energy_used == 0.0);
  CHECK(res.summary.distance == 0.0);
  CHECK(res.log.records.size() >= 1);
}

TEST_CASE("property: budgets are conserved and runs are deterministic") {
  const Scene s = load_scenario(office_scene(), SensorModel{}, GroundParams{});
  const ExplorationConfig cfg = quick_config(300.0, 200.0);
  const ExplorationResult a = run_exploration(s, cfg);
  const ExplorationResult b = run_exploration(s, cfg);
  CHECK(a.log.to_csv() == b.log.to_csv());
  CHECK(trace_to_json(a.trace) == trace_to_json(b.trace));

  const ExplorationSummary& m = a.summary;
  CHECK(m.energy_used + m.energy_remaining == Approx(300.0).epsilon(1e-9));
  CHECK(m.time_used + m.time_remaining == Approx(200.0).epsilon(1e-9));
  CHECK(m.time_terrestrial + m.time_aerial == Approx(m.time_used).epsilon(1e-9));
  CHECK(m.energy_used == Approx(1.0 * m.time_terrestrial + 7.0 * m.time_aerial).epsilon(1e-6));
  CHECK(m.energy_remaining >= 0.0);
  if (m.time_aerial > 0.0) CHECK(*m.modality_ratio == Approx(m.time_terrestrial / m.time_aerial));

  double prev_e = kInf, prev_t = -1.0, prev_cov = -1.0;
  for (const MetricsRecord& r : a.log.records) {
    CHECK(r.energy_remaining <= prev_e + 1e-9);
    CHECK(r.sim_time >= prev_t - 1e-9);
    CHECK(r.coverage >= prev_cov - 1e-9);
    CHECK(r.coverage <= 1.0 + 1e-9);
    prev_e = r.energy_remaining;
    prev_t = r.sim_time;
    prev_cov = r.coverage;
  }
  CHECK(a.log.records.back().energy_remaining == Approx(m.energy_remaining).epsilon(1e-6));
}

TEST_CASE("metrics CSV round trip and log classification") {
  MetricsLog log;
  log.records.push_back({0, 0.0, 0.1, 10.0, 5.0, Modality::kTerrestrial, {1.0, 1.0, 0.55}});
  log.records.push_back({1, 2.5, 0.4, 3.25, 2.5, Modality::kAerial, {2.0, 1.0, 1.5}});
  const MetricsLog back = MetricsLog::from_csv(log.to_csv());
  REQUIRE(back.records.size() == 2);
  CHECK(back.to_csv() == log.to_csv());
  CHECK(back.records[1].modality == Modality::kAerial);
  CHECK(back.records[1].energy_remaining == 3.25);
  CHECK(classify_log(back, {2.0, 1.0, 1.5}) == RunStatus::kSuccess);
  CHECK(classify_log(back, {1.0, 1.0, 0.55}) == RunStatus::kFailure);
  log.records.back().energy_remaining = -0.5;
  CHECK(classify_log(log, {2.0, 1.0, 1.5}) == RunStatus::kFailure);
  CHECK(classify_log(MetricsLog{}, {0, 0, 0}) == RunStatus::kFailure);
  CHECK(exit_code(RunStatus::kSuccess) == 0);
  CHECK(exit_code(RunStatus::kFailure) == 2);
  CHECK_THROWS(MetricsLog::from_csv("h\n1,2,3\n"));
}

TEST_CASE("unreachable home is a scene error") {
  const std::string text = SceneBuilder({16, 8, 4}, 0.5)
                               .box({8, 0, 0}, {8, 7, 3})
                               .start({2, 2, 0})
                               .home({12, 2, 0})
                               .text();
  const Scene s = load_scenario(text, SensorModel{}, GroundParams{});
  CHECK_THROWS_AS(run_exploration(s, quick_config(100.0, 100.0)), SceneError);
}

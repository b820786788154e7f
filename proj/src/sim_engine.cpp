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

#include "bmx/sim_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>

#include "bmx/grid_search.hpp"

namespace bmx {

std::int64_t BudgetState::to_units(double v) { return std::llround(v * kScale); }

BudgetState::BudgetState(double energy_all, double time_all)
    : energy_all_(to_units(energy_all)), time_all_(to_units(time_all)) {
  if (energy_all < 0.0 || time_all < 0.0) throw std::invalid_argument("budgets must be non-negative");
}

TimeEnergy BudgetState::deduct(double time, Modality m, const CostParams& costs) {
  const std::int64_t t = to_units(time);
  const std::int64_t e = to_units(costs.power(cost_mode(m)) * time);
  time_used_ += t;
  energy_used_ += e;
  (m == Modality::kAerial ? time_aerial_ : time_terrestrial_) += t;
  return {from_units(t), from_units(e)};
}

namespace {

constexpr std::array<std::array<int, 2>, 8> kPlanar = {
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

Index3 ground_voxel_below(const VoxelGrid& grid, const Vec3& p, const GroundParams& ground) {
  return grid.voxel_of(p - Vec3{0.0, 0.0, ground.sensor_offset});
}

}  // namespace

std::optional<BimodalPath> bimodal_path(const VoxelGrid& grid, const RobotState& from, const Pose& goal,
                                        Modality goal_modality, const GroundParams& ground,
                                        const CostParams& costs) {
  const int clearance = ground.clearance_voxels(grid.resolution());
  const double res = grid.resolution();
  const double air_weight =
      goal_modality == Modality::kAerial ? 1.0 : costs.p_aerial / costs.p_terrestrial;
  auto grounded_ok = [&](const Index3& c) { return is_traversable_ground(grid, c, clearance); };
  auto state_position = [&](std::size_t s) {
    const Vec3 c = grid.center(s / 2);
    return (s & 1u) ? c + Vec3{0.0, 0.0, ground.sensor_offset} : c;
  };

  std::size_t start;
  if (from.ground) {
    if (!grounded_ok(*from.ground)) return std::nullopt;
    start = grid.index(*from.ground) * 2 + 1;
  } else {
    const Index3 v = grid.voxel_of(from.position);
    if (!grid.known_free(v)) return std::nullopt;
    start = grid.index(v) * 2;
  }
  std::size_t target;
  if (goal_modality == Modality::kAerial) {
    const Index3 v = grid.voxel_of(goal.position);
    if (!grid.known_free(v)) return std::nullopt;
    target = grid.index(v) * 2;
  } else {
    const Index3 g = ground_voxel_below(grid, goal.position, ground);
    if (!grounded_ok(g)) return std::nullopt;
    target = grid.index(g) * 2 + 1;
  }
  const Vec3 target_pos = state_position(target);

  const std::size_t n = grid.size() * 2;
  std::vector<double> g(n, kInf);
  std::vector<std::size_t> parent(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  g[start] = 0.0;
  open.emplace(distance(state_position(start), target_pos), start);
  auto relax = [&](std::size_t u, std::size_t v, double c) {
    if (g[u] + c < g[v]) {
      g[v] = g[u] + c;
      parent[v] = u;
      open.emplace(g[v] + distance(state_position(v), target_pos), v);
    }
  };
  while (!open.empty()) {
    const auto [f, u] = open.top();
    open.pop();
    if (f - distance(state_position(u), target_pos) > g[u] + 1e-9) continue;
    if (u == target) break;
    const Index3 c = grid.coords(u / 2);
    if (u & 1u) {
      for (const auto& d : kPlanar) {
        const Index3 nb{c.x + d[0], c.y + d[1], c.z};
        if (!grounded_ok(nb)) continue;
        if (d[0] != 0 && d[1] != 0 &&
            (!grounded_ok({c.x + d[0], c.y, c.z}) || !grounded_ok({c.x, c.y + d[1], c.z})))
          continue;
        relax(u, grid.index(nb) * 2 + 1, res * std::hypot(d[0], d[1]));
      }
      relax(u, u - 1, air_weight * ground.sensor_offset);
    } else {
      for (const Index3& d : lattice_moves()) {
        if (!move_clear(grid, c, d)) continue;
        const double len = res * std::sqrt(double(d.x * d.x + d.y * d.y + d.z * d.z));
        relax(u, grid.index(c + d) * 2, air_weight * len);
      }
      if (grounded_ok(c)) relax(u, u + 1, air_weight * ground.sensor_offset);
    }
  }
  if (!(g[target] < kInf)) return std::nullopt;

  std::vector<std::size_t> states;
  for (std::size_t s = target; s != n; s = parent[s]) states.push_back(s);
  std::reverse(states.begin(), states.end());

  BimodalPath path;
  path.search_cost = g[target];
  if (!from.ground && from.position != state_position(start))
    path.waypoints.push_back({state_position(start), Modality::kAerial, std::nullopt, std::nullopt});
  for (std::size_t i = 1; i < states.size(); ++i) {
    const std::size_t a = states[i - 1], b = states[i];
    Waypoint w;
    w.position = state_position(b);
    w.modality = (a & 1u) && (b & 1u) ? Modality::kTerrestrial : Modality::kAerial;
    if (b & 1u) w.ground = grid.coords(b / 2);
    path.waypoints.push_back(w);
  }
  if (goal_modality == Modality::kAerial) {
    if (path.waypoints.empty() || path.waypoints.back().position != goal.position || from.ground)
      path.waypoints.push_back({goal.position, Modality::kAerial, std::nullopt, goal.yaw});
    else
      path.waypoints.back().yaw = goal.yaw;
  } else {
    if (path.waypoints.empty())
      path.waypoints.push_back(
          {goal.position, Modality::kTerrestrial, ground_voxel_below(grid, goal.position, ground), goal.yaw});
    else {
      path.waypoints.back().position = goal.position;
      path.waypoints.back().yaw = goal.yaw;
    }
  }
  return path;
}

TimeEnergy path_consumption(const BimodalPath& path, const RobotState& from, const CostParams& costs) {
  TimeEnergy total;
  Vec3 pos = from.position;
  double yaw = from.yaw;
  for (const Waypoint& w : path.waypoints) {
    const double dyaw = w.yaw ? yaw_difference(yaw, *w.yaw) : 0.0;
    const CostMode m = cost_mode(w.modality);
    const double t = time_from_length(distance(pos, w.position), dyaw, m, costs);
    total.time += t;
    total.energy += costs.power(m) * t;
    pos = w.position;
    if (w.yaw) yaw = *w.yaw;
  }
  return total;
}

ExecutionResult execute(const BimodalPath& path, RobotState& robot, BudgetState& budget, VoxelGrid& grid,
                        const SensorModel& sensor, TopoGraph& topo, const CostParams& costs,
                        const ExecutionParams& params, const std::function<bool()>& stop) {
  ExecutionResult out;
  double since_sense = 0.0, since_record = 0.0;
  auto do_sense = [&] {
    for (std::size_t i : reveal_footprint(grid, robot.position, robot.ground)) out.revealed.push_back(i);
    for (std::size_t i : sense(grid, {robot.position, robot.yaw}, sensor)) out.revealed.push_back(i);
    ++out.senses;
    since_sense = 0.0;
  };
  for (const Waypoint& w : path.waypoints) {
    const bool blocked = !walk_segment(grid, robot.position, w.position, [&](std::size_t i) {
      return grid.state(i) != CellState::kOccupied;
    });
    if (blocked) {
      out.status = ExecutionResult::Status::kAborted;
      return out;
    }
    const double len = distance(robot.position, w.position);
    const double dyaw = w.yaw ? yaw_difference(robot.yaw, *w.yaw) : 0.0;
    const CostMode m = cost_mode(w.modality);
    const double t = time_from_length(len, dyaw, m, costs);
    const std::int64_t need = BudgetState::to_units(costs.power(m) * t);
    if (need > budget.energy_remaining_units()) {
      const double frac = static_cast<double>(budget.energy_remaining_units()) / static_cast<double>(need);
      budget.deduct(budget.energy_remaining() / costs.power(m), w.modality, costs);
      robot.position = robot.position + (w.position - robot.position) * frac;
      robot.ground.reset();
      robot.modality = w.modality;
      out.distance += len * frac;
      out.status = ExecutionResult::Status::kBudgetExhausted;
      return out;
    }
    budget.deduct(t, w.modality, costs);
    robot.position = w.position;
    if (w.yaw) robot.yaw = *w.yaw;
    robot.ground = w.ground;
    robot.modality = w.ground ? Modality::kTerrestrial : Modality::kAerial;
    out.distance += len;
    since_sense += len;
    since_record += len;
    if (since_record >= params.record_interval - 1e-12) {
      topo.record_position(robot.position, grid);
      since_record = 0.0;
    }
    if (since_sense >= params.sense_interval - 1e-12) {
      do_sense();
      if (stop && stop()) {
        out.status = ExecutionResult::Status::kStopped;
        return out;
      }
    }
  }
  topo.record_position(robot.position, grid);
  do_sense();
  out.status = ExecutionResult::Status::kArrived;
  return out;
}

void ExplorationConfig::apply_json(const nlohmann::json& j) {
  if (j.contains("budgets")) {
    const auto& b = j.at("budgets");
    energy_budget = b.value("energy", energy_budget);
    time_budget = b.value("time", time_budget);
  }
  if (j.contains("costs")) {
    nlohmann::json merged = costs.to_json();
    merged.update(j.at("costs"));
    costs = CostParams::from_json(merged);
  }
  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    search.iterations = p.value("iterations", search.iterations);
    search.child_distance = p.value("child_distance", search.child_distance);
    search.gamma_ig = p.value("gamma_ig", search.gamma_ig);
    search.epsilon = p.value("epsilon", search.epsilon);
    search.seed = p.value("seed", search.seed);
    search.table_limit = p.value("table_limit", search.table_limit);
    penalty.a1 = p.value("a1", penalty.a1);
    penalty.b1 = p.value("b1", penalty.b1);
    penalty.a2 = p.value("a2", penalty.a2);
    penalty.b2 = p.value("b2", penalty.b2);
  }
  if (j.contains("limits")) {
    const auto& l = j.at("limits");
    max_cycles = l.value("max_cycles", max_cycles);
    replan_resolved_fraction = l.value("replan_resolved_fraction", replan_resolved_fraction);
    home_reserve = l.value("home_reserve", home_reserve);
  }
}

nlohmann::json ExplorationConfig::to_json() const {
  return {{"budgets", {{"energy", energy_budget}, {"time", time_budget}}},
          {"costs", costs.to_json()},
          {"planner",
           {{"iterations", search.iterations},
            {"child_distance", search.child_distance},
            {"gamma_ig", search.gamma_ig},
            {"epsilon", search.epsilon},
            {"seed", search.seed},
            {"table_limit", search.table_limit},
            {"a1", penalty.a1},
            {"b1", penalty.b1},
            {"a2", penalty.a2},
            {"b2", penalty.b2}}},
          {"limits",
           {{"max_cycles", max_cycles},
            {"replan_resolved_fraction", replan_resolved_fraction},
            {"home_reserve", home_reserve}}}};
}

void ExplorationConfig::validate() const {
  sensor.validate();
  sampling.validate(sensor);
  costs.validate();
  search.validate();
  if (energy_budget < 0.0 || time_budget < 0.0) throw std::invalid_argument("budgets must be non-negative");
  PenaltyParams p = penalty;
  p.energy_budget = p.time_budget = 1.0;
  p.validate();
  if (max_cycles < 1) throw std::invalid_argument("max_cycles must be positive");
}

std::string MetricsLog::to_csv() const {
  std::string out = "cycle,sim_time_s,coverage_ratio,E_remaining,T_remaining,modality,x,y,z\n";
  char buf[256];
  for (const MetricsRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%s,%.6f,%.6f,%.6f\n", r.cycle, r.sim_time, r.coverage,
                  r.energy_remaining, r.time_remaining, std::string(to_string(r.modality)).c_str(), r.position.x,
                  r.position.y, r.position.z);
    out += buf;
  }
  return out;
}

MetricsLog MetricsLog::from_csv(const std::string& text) {
  MetricsLog log;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw std::runtime_error("malformed metrics row: " + line);
    MetricsRecord r;
    r.cycle = std::stoi(f[0]);
    r.sim_time = std::stod(f[1]);
    r.coverage = std::stod(f[2]);
    r.energy_remaining = std::stod(f[3]);
    r.time_remaining = std::stod(f[4]);
    r.modality = f[5] == "A" ? Modality::kAerial : Modality::kTerrestrial;
    r.position = {std::stod(f[6]), std::stod(f[7]), std::stod(f[8])};
    log.records.push_back(r);
  }
  return log;
}

RunStatus classify_log(const MetricsLog& log, const Vec3& home) {
  if (log.records.empty()) return RunStatus::kFailure;
  const MetricsRecord& last = log.records.back();
  if (last.energy_remaining < 0.0) return RunStatus::kFailure;
  return distance(last.position, home) <= 1e-5 ? RunStatus::kSuccess : RunStatus::kFailure;
}

int exit_code(RunStatus s) { return s == RunStatus::kSuccess ? 0 : 2; }

std::string_view to_string(RunStatus s) { return s == RunStatus::kSuccess ? "success" : "failure"; }

nlohmann::json ExplorationSummary::to_json() const {
  nlohmann::json j = {{"status", to_string(status)},
                      {"reason", reason},
                      {"cycles", cycles},
                      {"sim_time_s", sim_time},
                      {"E_used", energy_used},
                      {"T_used", time_used},
                      {"E_remaining", energy_remaining},
                      {"T_remaining", time_remaining},
                      {"time_terrestrial_s", time_terrestrial},
                      {"time_aerial_s", time_aerial},
                      {"coverage_ratio", coverage},
                      {"at_home", at_home},
                      {"time_overrun", time_overrun},
                      {"distance_m", distance}};
  j["modality_ratio"] = modality_ratio ? nlohmann::json(*modality_ratio) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json trace_to_json(const std::vector<CycleTrace>& trace) {
  nlohmann::json arr = nlohmann::json::array();
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  for (const CycleTrace& t : trace) {
    arr.push_back({{"cycle", t.cycle},
                   {"energy_fraction", t.energy_fraction},
                   {"time_fraction", t.time_fraction},
                   {"robot_z", t.robot_z},
                   {"groups", t.groups},
                   {"candidates", t.candidates},
                   {"decision", t.decision},
                   {"goal_modality", t.goal_modality ? nlohmann::json(to_string(*t.goal_modality))
                                                     : nlohmann::json(nullptr)},
                   {"aerial_reward", opt(t.aerial_reward)},
                   {"terrestrial_reward", opt(t.terrestrial_reward)},
                   {"iterations", t.iterations},
                   {"tree_size", t.tree_size}});
  }
  return arr;
}

namespace {

std::uint64_t cycle_seed(std::uint64_t seed, int cycle) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(cycle + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

ExplorationResult run_exploration(const Scene& scene, const ExplorationConfig& config) {
  config.validate();
  ExplorationResult res;
  VoxelGrid grid = scene.grid;
  const GroundParams& gp = config.ground;
  const CostParams& costs = config.costs;

  const std::vector<std::uint8_t> reach = truth_reachable_free(grid, scene.start);
  if (!reach[grid.index(scene.home)]) throw SceneError("home unreachable from start", 1, "home");
  std::size_t reachable_count = 0;
  for (std::uint8_t r : reach) reachable_count += r;

  RobotState robot;
  const Pose start = terrestrial_pose(grid, scene.start, scene.start_yaw, gp);
  robot.position = start.position;
  robot.yaw = start.yaw;
  robot.ground = scene.start;
  robot.home = terrestrial_pose(grid, scene.home, 0.0, gp).position;

  BudgetState budget(config.energy_budget, config.time_budget);
  TopoGraph topo(config.topo);
  topo.record_position(robot.position, grid);
  std::vector<std::uint8_t> attempted(grid.size(), 0);
  double distance_total = 0.0;

  auto coverage = [&] {
    std::size_t known = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (reach[i] && grid.state(i) == CellState::kFree) ++known;
    return reachable_count ? static_cast<double>(known) / static_cast<double>(reachable_count) : 1.0;
  };
  auto record = [&](int cycle) {
    MetricsRecord r;
    r.cycle = cycle;
    r.sim_time = budget.time_used();
    r.coverage = coverage();
    r.energy_remaining = budget.energy_remaining();
    r.time_remaining = budget.time_remaining();
    r.modality = robot.modality;
    r.position = robot.position;
    res.log.records.push_back(r);
  };
  record(0);

  std::string reason;
  bool exhausted = false;
  auto go_home = [&]() {
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (distance(robot.position, robot.home) <= 1e-9) return;
      auto path = bimodal_path(grid, robot, {robot.home, robot.yaw}, Modality::kTerrestrial, gp, costs);
      if (!path) {
        reason += reason.empty() ? "home_unreachable" : "+home_unreachable";
        return;
      }
      const ExecutionResult ex = execute(*path, robot, budget, grid, config.sensor, topo, costs, config.execution);
      distance_total += ex.distance;
      if (ex.status == ExecutionResult::Status::kBudgetExhausted) {
        exhausted = true;
        reason += "+energy_exhausted";
        return;
      }
    }
  };

  PenaltyParams penalty = config.penalty;
  penalty.energy_budget = std::max(config.energy_budget, 1e-9);
  penalty.time_budget = std::max(config.time_budget, 1e-9);

  int cycle = 0;
  while (true) {
    ++cycle;
    if (cycle > config.max_cycles) {
      reason = "cycle_limit";
      break;
    }
    if (budget.energy_remaining() <= 0.0 || budget.time_remaining() <= 0.0) {
      reason = "budget_spent";
      break;
    }
    std::vector<std::size_t> frontier;
    for (std::size_t i : detect_frontiers(grid))
      if (!attempted[i]) frontier.push_back(i);
    const std::vector<FrontierCluster> clusters = cluster_frontiers(grid, frontier, config.clusters);
    std::vector<ViewpointGroup> groups;
    std::vector<const FrontierCluster*> group_cluster;
    for (const FrontierCluster& c : clusters) {
      ViewpointGroup g = build_group(c, grid, config.sensor, config.sampling);
      if (!g.reachable) {
        for (std::size_t m : c.members) attempted[m] = 1;
        continue;
      }
      groups.push_back(std::move(g));
      group_cluster.push_back(&c);
    }

    CycleTrace tr;
    tr.cycle = cycle;
    tr.energy_fraction = config.energy_budget > 0 ? budget.energy_remaining() / config.energy_budget : 0.0;
    tr.time_fraction = config.time_budget > 0 ? budget.time_remaining() / config.time_budget : 0.0;
    tr.robot_z = robot.position.z;
    tr.groups = static_cast<int>(groups.size());
    if (groups.empty()) {
      reason = "complete";
      tr.decision = "complete";
      res.trace.push_back(tr);
      res.planner_wall_ms.push_back(0.0);
      break;
    }

    CachedPathEstimator estimator(topo, grid);
    std::vector<std::pair<int, int>> source;
    PlanningProblem problem = PlanningProblem::from_groups(
        groups, {robot.position, robot.yaw}, robot.home, budget.energy_remaining(), budget.time_remaining(), costs,
        penalty, [&estimator](const Vec3& a, const Vec3& b) { return estimator(a, b); }, &source);
    tr.candidates = static_cast<int>(problem.candidates.size());
    SearchConfig sc = config.search;
    sc.seed = cycle_seed(config.search.seed, cycle);

    const auto t0 = std::chrono::steady_clock::now();
    BmMcts mcts(problem, sc);
    const SearchResult sr = mcts.search();
    const auto t1 = std::chrono::steady_clock::now();
    res.planner_wall_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    tr.iterations = sr.iterations;
    tr.tree_size = sr.tree_size;
    double sum_a = 0, sum_t = 0;
    int cnt_a = 0, cnt_t = 0;
    for (const ChildStat& st : sr.root_children) {
      if (!st.modality || st.pruned || !(st.score < kInf)) continue;
      if (*st.modality == Modality::kAerial) {
        sum_a -= st.score;
        ++cnt_a;
      } else {
        sum_t -= st.score;
        ++cnt_t;
      }
    }
    if (cnt_a) tr.aerial_reward = sum_a / cnt_a;
    if (cnt_t) tr.terrestrial_reward = sum_t / cnt_t;

    if (sr.kind != SearchResult::Kind::kGoal) {
      reason = sr.kind == SearchResult::Kind::kComplete ? "complete" : "planner_home";
      tr.decision = "home";
      res.trace.push_back(tr);
      break;
    }
    const Candidate goal = problem.candidates[sr.goal];
    const auto [gi, k] = source[sr.goal];
    const ViewpointGroup& grp = groups[gi];
    const Viewpoint& vp = k < static_cast<int>(grp.as.size()) ? grp.as[k] : grp.hs[k - grp.as.size()];
    const FrontierCluster& cluster = *group_cluster[gi];
    tr.goal_modality = goal.modality;

    auto path = bimodal_path(grid, robot, goal.pose, goal.modality, gp, costs);
    if (!path) {
      for (int v : vp.visible) attempted[cluster.members[v]] = 1;
      tr.decision = "unreachable";
      res.trace.push_back(tr);
      record(cycle);
      continue;
    }
    const TimeEnergy out_cost = path_consumption(*path, robot, costs);
    RobotState at_goal = robot;
    at_goal.position = goal.pose.position;
    at_goal.yaw = goal.pose.yaw;
    at_goal.ground = path->waypoints.back().ground;
    at_goal.modality = goal.modality;
    auto back = bimodal_path(grid, at_goal, {robot.home, goal.pose.yaw}, Modality::kTerrestrial, gp, costs);
    const double back_energy = back ? path_consumption(*back, at_goal, costs).energy : kInf;
    if (out_cost.energy + config.home_reserve * back_energy > budget.energy_remaining()) {
      reason = "return_guard";
      tr.decision = "guard";
      res.trace.push_back(tr);
      break;
    }
    tr.decision = "goal";
    res.trace.push_back(tr);

    std::vector<std::size_t> targets;
    for (int v : vp.visible) targets.push_back(cluster.members[v]);
    const std::size_t limit = static_cast<std::size_t>(config.replan_resolved_fraction * targets.size());
    auto stop = [&] {
      std::size_t resolved = 0;
      for (std::size_t t : targets)
        if (!is_frontier(grid, t)) ++resolved;
      return resolved > limit;
    };
    const ExecutionResult ex = execute(*path, robot, budget, grid, config.sensor, topo, costs, config.execution, stop);
    distance_total += ex.distance;
    if (ex.status == ExecutionResult::Status::kBudgetExhausted) {
      exhausted = true;
      reason = "energy_exhausted";
      record(cycle);
      break;
    }
    if (ex.status == ExecutionResult::Status::kArrived)
      for (std::size_t t : targets) attempted[t] = 1;
    record(cycle);
  }

  if (!exhausted) {
    go_home();
    record(cycle);
  }

  ExplorationSummary& s = res.summary;
  s.reason = reason;
  s.cycles = cycle;
  s.sim_time = budget.time_used();
  s.energy_used = budget.energy_used();
  s.time_used = budget.time_used();
  s.energy_remaining = budget.energy_remaining();
  s.time_remaining = budget.time_remaining();
  s.time_terrestrial = budget.time_in(Modality::kTerrestrial);
  s.time_aerial = budget.time_in(Modality::kAerial);
  if (s.time_aerial > 0.0) s.modality_ratio = s.time_terrestrial / s.time_aerial;
  s.coverage = coverage();
  s.at_home = distance(robot.position, robot.home) <= 1e-9;
  s.time_overrun = s.time_remaining < 0.0;
  s.distance = distance_total;
  s.status = s.at_home && budget.energy_remaining_units() >= 0 ? RunStatus::kSuccess : RunStatus::kFailure;
  return res;
}

}  // namespace bmx

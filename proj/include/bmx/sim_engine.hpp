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

// Closed-loop exploration with a kinematic bimodal point robot.

#ifndef BMX_SIM_ENGINE_HPP_
#define BMX_SIM_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmx/bm_mcts.hpp"
#include "bmx/topo_graph.hpp"
#include "bmx/world_model.hpp"

namespace bmx {

// Budget ledger in integer micro-units so that sums are exact.
class BudgetState {
 public:
  static constexpr double kScale = 1e6;
  static std::int64_t to_units(double v);
  static double from_units(std::int64_t u) { return static_cast<double>(u) / kScale; }

  BudgetState() = default;
  BudgetState(double energy_all, double time_all);

  // Records one motion segment; returns the deducted {time, energy}.
  TimeEnergy deduct(double time, Modality m, const CostParams& costs);

  double energy_all() const { return from_units(energy_all_); }
  double time_all() const { return from_units(time_all_); }
  double energy_used() const { return from_units(energy_used_); }
  double time_used() const { return from_units(time_used_); }
  double energy_remaining() const { return from_units(energy_all_ - energy_used_); }
  double time_remaining() const { return from_units(time_all_ - time_used_); }
  double time_in(Modality m) const {
    return from_units(m == Modality::kAerial ? time_aerial_ : time_terrestrial_);
  }
  std::int64_t energy_used_units() const { return energy_used_; }
  std::int64_t time_used_units() const { return time_used_; }
  std::int64_t energy_remaining_units() const { return energy_all_ - energy_used_; }

 private:
  std::int64_t energy_all_ = 0;
  std::int64_t time_all_ = 0;
  std::int64_t energy_used_ = 0;
  std::int64_t time_used_ = 0;
  std::int64_t time_terrestrial_ = 0;
  std::int64_t time_aerial_ = 0;
};

struct RobotState {
  Vec3 position;
  double yaw = 0.0;
  Modality modality = Modality::kTerrestrial;
  std::optional<Index3> ground;  // set iff grounded
  Vec3 home;
};

struct Waypoint {
  Vec3 position;
  Modality modality = Modality::kAerial;  // of the segment ending here
  std::optional<Index3> ground;           // ground voxel for terrestrial waypoints
  std::optional<double> yaw;              // heading to reach on this segment
};

struct BimodalPath {
  std::vector<Waypoint> waypoints;
  double search_cost = 0.0;
};

// A* over (voxel, grounded) states in known FREE space toward a goal pose
// of the given modality. Empty when no path exists.
std::optional<BimodalPath> bimodal_path(const VoxelGrid& grid, const RobotState& from, const Pose& goal,
                                        Modality goal_modality, const GroundParams& ground,
                                        const CostParams& costs);

// Time and energy the path would consume, including the final yaw slew.
TimeEnergy path_consumption(const BimodalPath& path, const RobotState& from, const CostParams& costs);

struct ExecutionParams {
  double sense_interval = 0.5;
  double record_interval = 0.25;
};

struct ExecutionResult {
  enum class Status { kArrived, kAborted, kStopped, kBudgetExhausted };
  Status status = Status::kArrived;
  double distance = 0.0;
  int senses = 0;
  std::vector<std::size_t> revealed;
};

// Moves the robot along `path`, deducting budget segment by segment.
// `stop` is polled after each sensing event; returning true ends execution
// early with kStopped.
ExecutionResult execute(const BimodalPath& path, RobotState& robot, BudgetState& budget, VoxelGrid& grid,
                        const SensorModel& sensor, TopoGraph& topo, const CostParams& costs,
                        const ExecutionParams& params = {},
                        const std::function<bool()>& stop = nullptr);

struct ExplorationConfig {
  SensorModel sensor;
  GroundParams ground;
  SamplingParams sampling;
  ClusterParams clusters;
  TopoParams topo;
  CostParams costs;
  double energy_budget = 1000.0;
  double time_budget = 600.0;
  PenaltyParams penalty;  // budgets are copied from above at run time
  SearchConfig search;
  ExecutionParams execution;
  double replan_resolved_fraction = 0.3;
  double home_reserve = 1.05;
  int max_cycles = 400;

  // Applies optional "budgets", "costs", "planner" and "limits" blocks.
  void apply_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct MetricsRecord {
  int cycle = 0;
  double sim_time = 0.0;
  double coverage = 0.0;
  double energy_remaining = 0.0;
  double time_remaining = 0.0;
  Modality modality = Modality::kTerrestrial;
  Vec3 position;
};

struct MetricsLog {
  std::vector<MetricsRecord> records;
  std::string to_csv() const;
  static MetricsLog from_csv(const std::string& text);
};

// Planner observations for one control cycle.
struct CycleTrace {
  int cycle = 0;
  double energy_fraction = 0.0;  // remaining / all
  double time_fraction = 0.0;
  double robot_z = 0.0;
  int groups = 0;
  int candidates = 0;
  std::string decision;  // "goal", "home", "complete", "guard"
  std::optional<Modality> goal_modality;
  std::optional<double> aerial_reward;        // mean -G over aerial root children
  std::optional<double> terrestrial_reward;   // mean -G over terrestrial root children
  int iterations = 0;
  std::size_t tree_size = 0;
};

enum class RunStatus { kSuccess, kFailure };

struct ExplorationSummary {
  RunStatus status = RunStatus::kFailure;
  std::string reason;
  int cycles = 0;
  double sim_time = 0.0;
  double energy_used = 0.0;
  double time_used = 0.0;
  double energy_remaining = 0.0;
  double time_remaining = 0.0;
  double time_terrestrial = 0.0;
  double time_aerial = 0.0;
  std::optional<double> modality_ratio;  // ground time / air time
  double coverage = 0.0;
  bool at_home = false;
  bool time_overrun = false;
  double distance = 0.0;

  nlohmann::json to_json() const;
};

struct ExplorationResult {
  MetricsLog log;
  ExplorationSummary summary;
  std::vector<CycleTrace> trace;
  std::vector<double> planner_wall_ms;  // kept apart from the log
};

// Status implied by the log alone: success iff the last record is at home
// with non-negative energy.
RunStatus classify_log(const MetricsLog& log, const Vec3& home);
int exit_code(RunStatus s);
std::string_view to_string(RunStatus s);

// `scene` must come from load_scenario (start already sensed).
ExplorationResult run_exploration(const Scene& scene, const ExplorationConfig& config);

nlohmann::json trace_to_json(const std::vector<CycleTrace>& trace);

}  // namespace bmx

#endif  // BMX_SIM_ENGINE_HPP_

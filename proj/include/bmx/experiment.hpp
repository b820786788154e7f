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

// Batch experiments: settings x seeds, per-run artifacts, aggregate table.

#ifndef BMX_EXPERIMENT_HPP_
#define BMX_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmx/sim_engine.hpp"

namespace bmx {

inline constexpr int kExitScenarioError = 3;

struct RunSetting {
  std::optional<double> energy;
  std::optional<double> time;
  std::optional<int> iterations;
  std::string label() const;
};

struct ExperimentSpec {
  std::string scenario;  // path to a scene file
  nlohmann::json overrides = nlohmann::json::object();  // same blocks as the scene header
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::pair<double, double>> budgets;  // sweep axis (energy, time)
  std::vector<int> iterations;                     // sweep axis
  std::string out_dir = "out";
  bool sweep = false;

  // Relative scenario paths resolve against `base_dir`.
  static ExperimentSpec from_json(const nlohmann::json& j, const std::string& base_dir = "");
  void validate() const;
  std::vector<RunSetting> settings() const;
};

struct PreparedRun {
  Scene scene;
  ExplorationConfig config;
};

// Header blocks first, then `overrides`, then the explicit setting.
PreparedRun prepare_run(const std::string& scene_text, const nlohmann::json& overrides, const RunSetting& setting,
                        std::uint64_t seed);

struct RunArtifacts {
  std::string run_id;
  nlohmann::json summary;  // summary fields plus setting and seed
  std::string csv;
  nlohmann::json trace;
  nlohmann::json timing;
};

RunArtifacts run_one(const PreparedRun& run, const RunSetting& setting, std::uint64_t seed);

// Pure fold over per-run summary objects, grouped by setting label.
nlohmann::json aggregate(const std::vector<nlohmann::json>& summaries);
std::string aggregate_csv(const nlohmann::json& table);

// Reads every *.summary.json in `dir` and aggregates them.
nlohmann::json aggregate_directory(const std::string& dir);

// Executes every (setting x seed) pair, writes artifacts under out_dir,
// and returns the worst exit code.
int run_experiment(const ExperimentSpec& spec, std::ostream& log);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

}  // namespace bmx

#endif  // BMX_EXPERIMENT_HPP_

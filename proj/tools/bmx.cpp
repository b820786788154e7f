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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "bmx/experiment.hpp"
#include "bmx/scenes.hpp"

namespace {

int cmd_explore(const std::string& scenario, std::optional<double> energy, std::optional<double> time,
                std::optional<int> iters, std::uint64_t seed, const std::string& out) {
  bmx::ExperimentSpec spec;
  spec.scenario = scenario;
  spec.seeds = {seed};
  spec.out_dir = out;
  if (energy || time) {
    // A single explicit setting; missing halves come from the scene header.
    bmx::RunSetting s;
    s.energy = energy;
    s.time = time;
    s.iterations = iters;
    std::ifstream f(scenario);
    if (!f) {
      std::cerr << "error: cannot open scenario " << scenario << "\n";
      return bmx::kExitScenarioError;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    try {
      const bmx::PreparedRun run = bmx::prepare_run(ss.str(), nlohmann::json::object(), s, seed);
      const bmx::RunArtifacts a = bmx::run_one(run, s, seed);
      std::filesystem::create_directories(out);
      const std::string base = (std::filesystem::path(out) / a.run_id).string();
      std::ofstream(base + ".csv", std::ios::binary) << a.csv;
      std::ofstream(base + ".summary.json") << a.summary.dump(2) << "\n";
      std::ofstream(base + ".trace.json") << a.trace.dump(1) << "\n";
      std::ofstream(base + ".timing.json") << a.timing.dump(2) << "\n";
      std::cout << a.summary.dump(2) << "\n";
      return a.summary.at("status") == "success" ? 0 : 2;
    } catch (const bmx::SceneError& e) {
      std::cerr << "error: " << e.what() << " (line " << e.line() << ", field " << e.field() << ")\n";
      return bmx::kExitScenarioError;
    }
  }
  spec.sweep = false;
  if (iters) spec.iterations = {*iters};
  return bmx::run_experiment(spec, std::cout);
}

int cmd_sweep(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "error: cannot open sweep spec " << path << "\n";
    return bmx::kExitScenarioError;
  }
  bmx::ExperimentSpec spec;
  try {
    spec = bmx::ExperimentSpec::from_json(nlohmann::json::parse(f),
                                          std::filesystem::path(path).parent_path().string());
  } catch (const std::exception& e) {
    std::cerr << "error: invalid sweep spec: " << e.what() << "\n";
    return bmx::kExitScenarioError;
  }
  return bmx::run_experiment(spec, std::cout);
}

int cmd_make_scene(const std::string& name, const std::string& out) {
  std::string text;
  if (name == "office") text = bmx::office_scene();
  else if (name == "corridor") text = bmx::corridor_scene();
  else if (name == "two_level") text = bmx::two_level_scene();
  else if (name == "room") text = bmx::room_scene(16, 16, 4, 0.5, 2000.0, 2000.0);
  else {
    std::cerr << "error: unknown scene '" << name << "'\n";
    return bmx::kExitScenarioError;
  }
  std::ofstream(out) << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimodal exploration planner"};
  app.require_subcommand(1);

  std::string scenario, out = "out";
  std::optional<double> energy, time;
  std::optional<int> iters;
  std::uint64_t seed = 0;
  auto* explore = app.add_subcommand("explore", "Run one exploration");
  explore->add_option("scenario", scenario, "Scene file")->required();
  explore->add_option("--energy", energy, "Energy budget");
  explore->add_option("--time", time, "Time budget in seconds");
  explore->add_option("--iters", iters, "Iteration threshold");
  explore->add_option("--seed", seed, "Planner seed");
  explore->add_option("--out", out, "Output directory");

  std::string spec_path;
  auto* sweep = app.add_subcommand("sweep", "Run a batch from a JSON spec");
  sweep->add_option("spec", spec_path, "Sweep spec (JSON)")->required();

  std::string scene_name, scene_out;
  auto* make = app.add_subcommand("make-scene", "Write a built-in scene");
  make->add_option("name", scene_name, "office | corridor | two_level | room")->required();
  make->add_option("output", scene_out, "Destination file")->required();

  std::string agg_dir;
  auto* agg = app.add_subcommand("aggregate", "Recompute the aggregate table from run files");
  agg->add_option("dir", agg_dir, "Directory with *.summary.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : bmx::kExitScenarioError;
  }
  try {
    if (*explore) return cmd_explore(scenario, energy, time, iters, seed, out);
    if (*sweep) return cmd_sweep(spec_path);
    if (*make) return cmd_make_scene(scene_name, scene_out);
    if (*agg) {
      std::cout << bmx::aggregate_csv(bmx::aggregate_directory(agg_dir));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bmx::kExitScenarioError;
  }
  return 0;
}

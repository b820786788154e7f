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

// Python extension: thin wrappers that move structured data as JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bmx/bm_mcts.hpp"
#include "bmx/cost_model.hpp"
#include "bmx/experiment.hpp"
#include "bmx/grouped_tsp.hpp"
#include "bmx/scenes.hpp"
#include "bmx/sim_engine.hpp"
#include "bmx/viewpoint_gen.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

json parse_or_empty(const std::string& s) { return s.empty() ? json::object() : json::parse(s); }

bmx::Pose pose_of(const std::array<double, 4>& p) { return {{p[0], p[1], p[2]}, p[3]}; }

bmx::CostMode mode_of(const std::string& m) {
  if (m == "T") return bmx::CostMode::kTerrestrial;
  if (m == "A") return bmx::CostMode::kAerial;
  if (m == "avg") return bmx::CostMode::kAverage;
  throw py::value_error("mode must be 'T', 'A' or 'avg'");
}

bmx::CostParams costs_of(const std::string& j) {
  json merged = bmx::CostParams{}.to_json();
  merged.update(parse_or_empty(j));
  return bmx::CostParams::from_json(merged);
}

std::string builtin_scene(const std::string& name, std::optional<double> energy, std::optional<double> time) {
  if (name == "office") return bmx::office_scene(energy.value_or(600.0), time.value_or(400.0));
  if (name == "corridor") return bmx::corridor_scene(energy.value_or(400.0), time.value_or(200.0));
  if (name == "two_level") return bmx::two_level_scene(energy.value_or(1000.0), time.value_or(600.0));
  if (name == "room") return bmx::room_scene(12, 12, 4, 0.5, energy.value_or(300.0), time.value_or(300.0));
  throw py::value_error("unknown scene: " + name);
}

std::string scene_info(const std::string& text) {
  const bmx::Scene s = bmx::parse_scene(text);
  const bmx::GridDims d = s.grid.dims();
  const json j = {{"dims", {d.nx, d.ny, d.nz}},
                  {"resolution", s.grid.resolution()},
                  {"start", {s.start.x, s.start.y, s.start.z}},
                  {"home", {s.home.x, s.home.y, s.home.z}},
                  {"header", json::parse(s.header_json)}};
  return j.dump();
}

std::tuple<std::string, std::string, std::string, std::string> run(const std::string& scene_text,
                                                                   const std::string& overrides,
                                                                   std::optional<double> energy,
                                                                   std::optional<double> time,
                                                                   std::optional<int> iterations, std::uint64_t seed) {
  bmx::RunSetting s;
  s.energy = energy;
  s.time = time;
  s.iterations = iterations;
  bmx::RunArtifacts a;
  {
    py::gil_scoped_release release;
    const bmx::PreparedRun pr = bmx::prepare_run(scene_text, parse_or_empty(overrides), s, seed);
    a = bmx::run_one(pr, s, seed);
  }
  return {a.summary.dump(), a.csv, a.trace.dump(), a.timing.dump()};
}

std::string classify(const std::string& csv, const std::array<double, 3>& home) {
  return std::string(bmx::to_string(bmx::classify_log(bmx::MetricsLog::from_csv(csv), {home[0], home[1], home[2]})));
}

py::tuple solve_tour(const std::vector<double>& a2g, const std::vector<std::vector<double>>& g2g,
                     const std::vector<double>& g2h, double a2h, int exact_limit, std::uint64_t seed, int restarts) {
  const int k = static_cast<int>(a2g.size());
  if (static_cast<int>(g2g.size()) != k || static_cast<int>(g2h.size()) != k)
    throw py::value_error("inconsistent group counts");
  bmx::SquareMatrix m(k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(g2g[i].size()) != k) throw py::value_error("group matrix must be square");
    for (int j = 0; j < k; ++j) m(i, j) = i == j ? bmx::kInf : g2g[i][j];
  }
  const bmx::GuidanceTour t =
      bmx::solve(bmx::assemble_matrix(a2g, m, g2h, a2h), bmx::SolveOptions{exact_limit, seed, restarts});
  return py::make_tuple(t.order, t.skipped, t.total_time, t.exact);
}

std::vector<std::size_t> greedy(const std::vector<std::vector<int>>& sets,
                                const std::vector<std::array<double, 3>>& positions, const std::vector<int>& target,
                                const std::array<double, 3>& centroid) {
  if (sets.size() != positions.size()) throw py::value_error("one position per candidate is required");
  std::vector<bmx::Viewpoint> cands(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    cands[i].visible = sets[i];
    cands[i].ig = static_cast<int>(sets[i].size());
    cands[i].pose.position = {positions[i][0], positions[i][1], positions[i][2]};
  }
  return bmx::greedy_cover(cands, target, {centroid[0], centroid[1], centroid[2]});
}

// Problem: {"robot": [x,y,z,yaw], "home": [x,y,z], "energy", "time",
// "groups": [[x,y,z], ...], "candidates": [{"pose": [x,y,z,yaw], "modality": "A"|"T",
// "strategy": "AS"|"HS", "group", "ig"}], optional "penalty" and "costs"}.
std::string plan(const std::string& problem_json, int iterations, std::uint64_t seed, double child_distance) {
  const json j = json::parse(problem_json);
  bmx::PlanningProblem p;
  p.robot = pose_of(j.at("robot").get<std::array<double, 4>>());
  const auto home = j.at("home").get<std::array<double, 3>>();
  p.home = {home[0], home[1], home[2]};
  p.energy_remaining = j.at("energy").get<double>();
  p.time_remaining = j.at("time").get<double>();
  p.penalty.energy_budget = j.value("energy_all", p.energy_remaining);
  p.penalty.time_budget = j.value("time_all", p.time_remaining);
  if (j.contains("penalty")) {
    const json& q = j.at("penalty");
    p.penalty.a1 = q.value("a1", p.penalty.a1);
    p.penalty.b1 = q.value("b1", p.penalty.b1);
    p.penalty.a2 = q.value("a2", p.penalty.a2);
    p.penalty.b2 = q.value("b2", p.penalty.b2);
  }
  if (j.contains("costs")) p.costs = costs_of(j.at("costs").dump());
  for (const auto& g : j.at("groups")) {
    const auto a = g.get<std::array<double, 3>>();
    p.group_averages.push_back({{a[0], a[1], a[2]}, 0.0});
  }
  for (const auto& c : j.at("candidates")) {
    bmx::Candidate cand;
    cand.pose = pose_of(c.at("pose").get<std::array<double, 4>>());
    cand.modality = c.at("modality") == "T" ? bmx::Modality::kTerrestrial : bmx::Modality::kAerial;
    cand.strategy = c.at("strategy") == "HS" ? bmx::Strategy::kHybrid : bmx::Strategy::kAerial;
    cand.group = c.at("group").get<int>();
    if (cand.group < 0 || cand.group >= static_cast<int>(p.group_averages.size()))
      throw py::value_error("candidate group out of range");
    cand.ig = c.at("ig").get<double>();
    p.candidates.push_back(cand);
  }
  bmx::SearchConfig cfg;
  cfg.iterations = iterations;
  cfg.seed = seed;
  cfg.child_distance = child_distance;
  bmx::SearchResult r;
  {
    py::gil_scoped_release release;
    bmx::BmMcts tree(std::move(p), cfg);
    r = tree.search();
  }
  const char* kinds[] = {"goal", "home", "complete"};
  json out = {{"kind", kinds[static_cast<int>(r.kind)]},
              {"goal", r.kind == bmx::SearchResult::Kind::kGoal ? json(r.goal) : json(nullptr)},
              {"iterations", r.iterations},
              {"tree_size", r.tree_size}};
  json branch = json::array();
  for (int c : r.branch) branch.push_back(c == bmx::kHomeNode ? json("home") : json(c));
  out["branch"] = branch;
  json kids = json::array();
  for (const bmx::ChildStat& c : r.root_children)
    kids.push_back({{"candidate", c.candidate == bmx::kHomeNode ? json("home") : json(c.candidate)},
                    {"visits", c.visits},
                    {"score", c.score < bmx::kInf ? json(c.score) : json(nullptr)},
                    {"pruned", c.pruned}});
  out["root_children"] = kids;
  return out.dump();
}

int run_experiment(const std::string& spec_json, const std::string& base_dir) {
  bmx::ExperimentSpec spec;
  try {
    spec = bmx::ExperimentSpec::from_json(json::parse(spec_json), base_dir);
  } catch (const std::exception& e) {
    throw py::value_error(std::string("invalid sweep spec: ") + e.what());
  }
  std::ostringstream log;
  py::gil_scoped_release release;
  return bmx::run_experiment(spec, log);
}

}  // namespace

PYBIND11_MODULE(_bmx, m) {
  m.doc() = "Bimodal exploration planner core";
  static py::exception<bmx::SceneError> scene_error(m, "SceneError", PyExc_ValueError);
  py::register_local_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const bmx::SceneError& e) {
      scene_error(e.what());
    } catch (const bmx::PlanningDeadEnd& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const nlohmann::json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("builtin_scene", &builtin_scene, py::arg("name"), py::arg("energy") = py::none(),
        py::arg("time") = py::none());
  m.def("scene_info", &scene_info, py::arg("text"));
  m.def("run", &run, py::arg("scene_text"), py::arg("overrides") = "", py::arg("energy") = py::none(),
        py::arg("time") = py::none(), py::arg("iterations") = py::none(), py::arg("seed") = 0);
  m.def("classify_log", &classify, py::arg("csv"), py::arg("home"));
  m.def("solve_tour", &solve_tour, py::arg("anchor_to_group"), py::arg("group_to_group"), py::arg("group_to_home"),
        py::arg("anchor_to_home"), py::arg("exact_limit") = 12, py::arg("seed") = 0, py::arg("restarts") = 6);
  m.def("greedy_cover", &greedy, py::arg("sets"), py::arg("positions"), py::arg("target"),
        py::arg("centroid") = std::array<double, 3>{0.0, 0.0, 0.0});
  m.def(
      "time_cost",
      [](const std::array<double, 4>& a, const std::array<double, 4>& b, const std::string& mode,
         const std::string& costs) {
        return bmx::time_cost(pose_of(a), pose_of(b), mode_of(mode), costs_of(costs), bmx::straight_line_length);
      },
      py::arg("start"), py::arg("goal"), py::arg("mode"), py::arg("costs") = "");
  m.def(
      "energy_cost",
      [](const std::array<double, 4>& a, const std::array<double, 4>& b, const std::string& mode,
         const std::string& costs) {
        return bmx::energy_cost(pose_of(a), pose_of(b), mode_of(mode), costs_of(costs), bmx::straight_line_length);
      },
      py::arg("start"), py::arg("goal"), py::arg("mode"), py::arg("costs") = "");
  m.def("plan", &plan, py::arg("problem"), py::arg("iterations") = 2000, py::arg("seed") = 0,
        py::arg("child_distance") = 3.0);
  m.def("run_experiment", &run_experiment, py::arg("spec"), py::arg("base_dir") = "");
  m.def("aggregate_directory", [](const std::string& dir) { return bmx::aggregate_directory(dir).dump(); },
        py::arg("directory"));
}

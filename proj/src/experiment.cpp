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

#include "bmx/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace bmx {
namespace fs = std::filesystem;

std::string RunSetting::label() const {
  std::string s;
  char buf[64];
  if (energy) {
    std::snprintf(buf, sizeof(buf), "E%g", *energy);
    s += buf;
  }
  if (time) {
    std::snprintf(buf, sizeof(buf), "%sT%g", s.empty() ? "" : "_", *time);
    s += buf;
  }
  if (iterations) {
    std::snprintf(buf, sizeof(buf), "%sI%d", s.empty() ? "" : "_", *iterations);
    s += buf;
  }
  return s.empty() ? "default" : s;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j, const std::string& base_dir) {
  ExperimentSpec s;
  s.scenario = j.at("scenario").get<std::string>();
  if (!base_dir.empty() && fs::path(s.scenario).is_relative()) s.scenario = (fs::path(base_dir) / s.scenario).string();
  if (j.contains("overrides")) s.overrides = j.at("overrides");
  if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("budgets"))
    for (const auto& b : j.at("budgets")) s.budgets.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  if (j.contains("iterations")) s.iterations = j.at("iterations").get<std::vector<int>>();
  s.out_dir = j.value("out", s.out_dir);
  s.sweep = true;
  return s;
}

void ExperimentSpec::validate() const {
  if (scenario.empty()) throw std::invalid_argument("scenario path is required");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (sweep && budgets.empty() && iterations.empty())
    throw std::invalid_argument("sweep requires a nonempty budgets or iterations axis");
  for (const auto& [e, t] : budgets)
    if (e < 0.0 || t < 0.0) throw std::invalid_argument("budgets must be non-negative");
  for (int it : iterations)
    if (it < 1) throw std::invalid_argument("iteration thresholds must be positive");
}

std::vector<RunSetting> ExperimentSpec::settings() const {
  std::vector<RunSetting> out;
  std::vector<std::optional<std::pair<double, double>>> bs;
  for (const auto& b : budgets) bs.emplace_back(b);
  if (bs.empty()) bs.emplace_back(std::nullopt);
  std::vector<std::optional<int>> its(iterations.begin(), iterations.end());
  if (its.empty()) its.emplace_back(std::nullopt);
  for (const auto& b : bs)
    for (const auto& it : its) {
      RunSetting r;
      if (b) {
        r.energy = b->first;
        r.time = b->second;
      }
      r.iterations = it;
      out.push_back(r);
    }
  return out;
}

PreparedRun prepare_run(const std::string& scene_text, const nlohmann::json& overrides, const RunSetting& setting,
                        std::uint64_t seed) {
  const Scene header_only = parse_scene(scene_text);
  PreparedRun run;
  try {
    run.config.apply_json(nlohmann::json::parse(header_only.header_json));
    if (!overrides.is_null()) run.config.apply_json(overrides);
  } catch (const nlohmann::json::exception& e) {
    throw SceneError(std::string("bad configuration block: ") + e.what(), 1, "header");
  } catch (const std::invalid_argument& e) {
    throw SceneError(std::string("bad configuration block: ") + e.what(), 1, "header");
  }
  if (setting.energy) run.config.energy_budget = *setting.energy;
  if (setting.time) run.config.time_budget = *setting.time;
  if (setting.iterations) run.config.search.iterations = *setting.iterations;
  run.config.search.seed = seed;
  try {
    run.config.validate();
  } catch (const std::invalid_argument& e) {
    throw SceneError(e.what(), 1, "config");
  }
  run.scene = load_scenario(scene_text, run.config.sensor, run.config.ground);
  return run;
}

RunArtifacts run_one(const PreparedRun& run, const RunSetting& setting, std::uint64_t seed) {
  const ExplorationResult res = run_exploration(run.scene, run.config);
  RunArtifacts a;
  a.run_id = setting.label() + "_s" + std::to_string(seed);
  a.summary = res.summary.to_json();
  a.summary["run_id"] = a.run_id;
  a.summary["setting"] = setting.label();
  a.summary["seed"] = seed;
  a.summary["E_all"] = run.config.energy_budget;
  a.summary["T_all"] = run.config.time_budget;
  a.summary["iterations"] = run.config.search.iterations;
  a.summary["log_status"] =
      to_string(classify_log(res.log, terrestrial_pose(run.scene.grid, run.scene.home, 0.0, run.config.ground).position));
  a.csv = res.log.to_csv();
  a.trace = trace_to_json(res.trace);
  double total = 0.0;
  for (double ms : res.planner_wall_ms) total += ms;
  a.timing = {{"run_id", a.run_id}, {"planner_wall_ms", res.planner_wall_ms}, {"planner_total_ms", total}};
  return a;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

nlohmann::json aggregate(const std::vector<nlohmann::json>& summaries) {
  struct Acc {
    nlohmann::json first;
    int runs = 0, successes = 0;
    std::vector<double> ratio, e_rem, t_rem, balance, coverage;
  };
  std::map<std::string, Acc> by;
  for (const auto& s : summaries) {
    Acc& a = by[s.at("setting").get<std::string>()];
    if (a.runs == 0) a.first = s;
    ++a.runs;
    if (s.at("status") == "success") ++a.successes;
    if (!s.at("modality_ratio").is_null()) a.ratio.push_back(s.at("modality_ratio").get<double>());
    const double e = s.at("E_remaining").get<double>(), t = s.at("T_remaining").get<double>();
    const double ea = s.at("E_all").get<double>(), ta = s.at("T_all").get<double>();
    a.e_rem.push_back(e);
    a.t_rem.push_back(t);
    a.balance.push_back(std::abs(e - t * (ta > 0.0 ? ea / ta : 0.0)));
    a.coverage.push_back(s.at("coverage_ratio").get<double>());
  }
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [label, a] : by) {
    rows.push_back({{"setting", label},
                    {"E_all", a.first.at("E_all")},
                    {"T_all", a.first.at("T_all")},
                    {"iterations", a.first.at("iterations")},
                    {"runs", a.runs},
                    {"successes", a.successes},
                    {"median_modality_ratio", num(median(a.ratio))},
                    {"median_E_remaining", num(median(a.e_rem))},
                    {"median_T_remaining", num(median(a.t_rem))},
                    {"iqr_balance", num(quantile(a.balance, 0.75) - quantile(a.balance, 0.25))},
                    {"median_coverage", num(median(a.coverage))}});
  }
  return rows;
}

std::string aggregate_csv(const nlohmann::json& table) {
  const char* cols[] = {"setting",        "E_all",          "T_all",
                        "iterations",     "runs",           "successes",
                        "median_modality_ratio", "median_E_remaining", "median_T_remaining",
                        "iqr_balance",    "median_coverage"};
  std::ostringstream out;
  for (std::size_t i = 0; i < std::size(cols); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& row : table) {
    for (std::size_t i = 0; i < std::size(cols); ++i) {
      const auto& v = row.at(cols[i]);
      out << (i ? "," : "");
      if (v.is_string()) out << v.get<std::string>();
      else if (!v.is_null()) out << v.dump();
    }
    out << "\n";
  }
  return out.str();
}

nlohmann::json aggregate_directory(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 13 && name.ends_with(".summary.json")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<nlohmann::json> summaries;
  for (const auto& f : files) {
    std::ifstream in(f);
    summaries.push_back(nlohmann::json::parse(in));
  }
  return aggregate(summaries);
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

}  // namespace

int run_experiment(const ExperimentSpec& spec, std::ostream& log) {
  try {
    spec.validate();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitScenarioError;
  }
  std::string text;
  {
    std::ifstream f(spec.scenario);
    if (!f) {
      log << "error: cannot open scenario " << spec.scenario << "\n";
      return kExitScenarioError;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  fs::create_directories(spec.out_dir);
  int worst = 0;
  std::vector<nlohmann::json> summaries;
  for (const RunSetting& setting : spec.settings()) {
    for (std::uint64_t seed : spec.seeds) {
      try {
        const PreparedRun run = prepare_run(text, spec.overrides, setting, seed);
        const RunArtifacts a = run_one(run, setting, seed);
        const fs::path base = fs::path(spec.out_dir) / a.run_id;
        write_text(base.string() + ".csv", a.csv);
        write_text(base.string() + ".summary.json", a.summary.dump(2) + "\n");
        write_text(base.string() + ".trace.json", a.trace.dump(1) + "\n");
        write_text(base.string() + ".timing.json", a.timing.dump(2) + "\n");
        summaries.push_back(a.summary);
        const int code = a.summary.at("status") == "success" ? 0 : 2;
        worst = std::max(worst, code);
        log << a.run_id << " " << a.summary.at("status").get<std::string>() << " E_rem="
            << a.summary.at("E_remaining").get<double>() << " T_rem=" << a.summary.at("T_remaining").get<double>()
            << "\n";
      } catch (const SceneError& e) {
        log << "error: " << e.what() << " (line " << e.line() << ", field " << e.field() << ")\n";
        return kExitScenarioError;
      }
    }
  }
  if (spec.sweep || summaries.size() > 1) {
    const nlohmann::json table = aggregate(summaries);
    write_text(fs::path(spec.out_dir) / "aggregate.json", table.dump(2) + "\n");
    write_text(fs::path(spec.out_dir) / "aggregate.csv", aggregate_csv(table));
  }
  return worst;
}

}  // namespace bmx

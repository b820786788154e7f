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

#ifndef BMX_COST_MODEL_HPP_
#define BMX_COST_MODEL_HPP_

#include <functional>

#include <nlohmann/json.hpp>

#include "bmx/geometry.hpp"
#include "bmx/viewpoint_gen.hpp"

namespace bmx {

// Locomotion mode used for pricing. kAverage is the synthetic mode used when
// the real modality is not decided yet.
enum class CostMode { kTerrestrial, kAerial, kAverage };

inline CostMode cost_mode(Modality m) {
  return m == Modality::kAerial ? CostMode::kAerial : CostMode::kTerrestrial;
}

struct CostParams {
  double v_terrestrial = 0.5;  // m/s
  double v_aerial = 1.0;
  double w_terrestrial = kPi;  // rad/s
  double w_aerial = kPi;
  double p_terrestrial = 1.0;  // energy units per second
  double p_aerial = 7.0;

  double speed(CostMode m) const;
  double yaw_rate(CostMode m) const;
  double power(CostMode m) const;

  void validate() const;
  static CostParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Path length between two positions; +inf when unreachable.
using PathLengthFn = std::function<double(const Vec3&, const Vec3&)>;

inline double straight_line_length(const Vec3& a, const Vec3& b) { return distance(a, b); }

double path_length(const Vec3& a, const Vec3& b, const PathLengthFn& estimator);

// max(length / v_max, dyaw / w_max) for mode `m`.
double time_cost(const Pose& from, const Pose& to, CostMode m, const CostParams& params,
                 const PathLengthFn& estimator);
// Same with a precomputed length.
double time_from_length(double length, double dyaw, CostMode m, const CostParams& params);

double energy_cost(const Pose& from, const Pose& to, CostMode m, const CostParams& params,
                   const PathLengthFn& estimator);

struct TimeEnergy {
  double time = 0.0;
  double energy = 0.0;
};

// Costs between the two groups' average viewpoints.
TimeEnergy group_cost(const ViewpointGroup& a, const ViewpointGroup& b, CostMode m,
                      const CostParams& params, const PathLengthFn& estimator);

}  // namespace bmx

#endif  // BMX_COST_MODEL_HPP_

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

#include "bmx/cost_model.hpp"

#include <stdexcept>

namespace bmx {

double CostParams::speed(CostMode m) const {
  switch (m) {
    case CostMode::kTerrestrial: return v_terrestrial;
    case CostMode::kAerial: return v_aerial;
    case CostMode::kAverage: return 0.5 * (v_terrestrial + v_aerial);
  }
  return v_terrestrial;
}

double CostParams::yaw_rate(CostMode m) const {
  switch (m) {
    case CostMode::kTerrestrial: return w_terrestrial;
    case CostMode::kAerial: return w_aerial;
    case CostMode::kAverage: return 0.5 * (w_terrestrial + w_aerial);
  }
  return w_terrestrial;
}

double CostParams::power(CostMode m) const {
  switch (m) {
    case CostMode::kTerrestrial: return p_terrestrial;
    case CostMode::kAerial: return p_aerial;
    case CostMode::kAverage: return 0.5 * (p_terrestrial + p_aerial);
  }
  return p_terrestrial;
}

void CostParams::validate() const {
  if (!(v_terrestrial > 0 && v_aerial > 0 && w_terrestrial > 0 && w_aerial > 0 && p_terrestrial > 0 &&
        p_aerial > 0))
    throw std::invalid_argument("cost parameters must be positive");
  if (!(p_aerial > p_terrestrial)) throw std::invalid_argument("aerial power must exceed terrestrial power");
  if (v_aerial < v_terrestrial) throw std::invalid_argument("aerial speed must be at least terrestrial speed");
}

CostParams CostParams::from_json(const nlohmann::json& j) {
  CostParams p;
  p.v_terrestrial = j.value("v_terrestrial", p.v_terrestrial);
  p.v_aerial = j.value("v_aerial", p.v_aerial);
  p.w_terrestrial = j.value("w_terrestrial", p.w_terrestrial);
  p.w_aerial = j.value("w_aerial", p.w_aerial);
  p.p_terrestrial = j.value("p_terrestrial", p.p_terrestrial);
  p.p_aerial = j.value("p_aerial", p.p_aerial);
  p.validate();
  return p;
}

nlohmann::json CostParams::to_json() const {
  return {{"v_terrestrial", v_terrestrial}, {"v_aerial", v_aerial},       {"w_terrestrial", w_terrestrial},
          {"w_aerial", w_aerial},           {"p_terrestrial", p_terrestrial}, {"p_aerial", p_aerial}};
}

double path_length(const Vec3& a, const Vec3& b, const PathLengthFn& estimator) {
  if (a == b) return 0.0;
  return estimator(a, b);
}

double time_from_length(double length, double dyaw, CostMode m, const CostParams& params) {
  if (!(length < kInf)) return kInf;
  return std::max(length / params.speed(m), dyaw / params.yaw_rate(m));
}

double time_cost(const Pose& from, const Pose& to, CostMode m, const CostParams& params,
                 const PathLengthFn& estimator) {
  const double len = path_length(from.position, to.position, estimator);
  return time_from_length(len, yaw_difference(from.yaw, to.yaw), m, params);
}

double energy_cost(const Pose& from, const Pose& to, CostMode m, const CostParams& params,
                   const PathLengthFn& estimator) {
  const double t = time_cost(from, to, m, params, estimator);
  return t < kInf ? params.power(m) * t : kInf;
}

TimeEnergy group_cost(const ViewpointGroup& a, const ViewpointGroup& b, CostMode m,
                      const CostParams& params, const PathLengthFn& estimator) {
  const double t = time_cost(a.average, b.average, m, params, estimator);
  if (!(t < kInf)) return {kInf, kInf};
  return {t, params.power(m) * t};
}

}  // namespace bmx

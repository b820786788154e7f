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

#ifndef BMX_GEOMETRY_HPP_
#define BMX_GEOMETRY_HPP_

#include <cmath>
#include <compare>
#include <limits>
#include <numbers>

namespace bmx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

inline constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double horizontal_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Integer voxel coordinates.
struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr Index3 operator+(const Index3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr auto operator<=>(const Index3&) const = default;
};

// Wraps to [-pi, pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r - kPi;
}

// Minimum absolute difference between two headings, in [0, pi].
// Argument order is canonicalized so the result is exactly symmetric.
inline double yaw_difference(double a, double b) {
  return a < b ? std::abs(wrap_angle(b - a)) : std::abs(wrap_angle(a - b));
}

// Heading from `from` toward `to` in the horizontal plane.
inline double heading_to(const Vec3& from, const Vec3& to) {
  return wrap_angle(std::atan2(to.y - from.y, to.x - from.x));
}

struct Pose {
  Vec3 position;
  double yaw = 0.0;
};

}  // namespace bmx

#endif  // BMX_GEOMETRY_HPP_

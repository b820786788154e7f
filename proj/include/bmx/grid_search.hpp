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

#ifndef BMX_GRID_SEARCH_HPP_
#define BMX_GRID_SEARCH_HPP_

#include <array>

#include "bmx/world_model.hpp"

namespace bmx {

// The 26 unit moves of a voxel lattice.
const std::array<Index3, 26>& lattice_moves();

// True iff every voxel in the box spanned by `from` and `from + move` is
// known FREE (no corner cutting).
bool move_clear(const VoxelGrid& grid, const Index3& from, const Index3& move);

// Shortest 26-connected path through known FREE voxels between the voxels
// of a and b, with the two end offsets added. +inf when disconnected.
double known_space_path_length(const VoxelGrid& grid, const Vec3& a, const Vec3& b);

}  // namespace bmx

#endif  // BMX_GRID_SEARCH_HPP_

// Copyright 2026 The trajlink Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_set>
#include <vector>

#include "trajlink/types.hpp"

namespace trajlink
{

struct VoxelKey
{
  std::int64_t i{0};
  std::int64_t j{0};
  std::int64_t k{0};

  auto operator<=>(const VoxelKey &) const = default;
};

struct VoxelKeyHash
{
  std::size_t operator()(const VoxelKey & key) const noexcept
  {
    std::uint64_t h = static_cast<std::uint64_t>(key.i) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(key.j) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(key.k) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

VoxelKey voxel_of(const Point3 & p, double edge);

struct GeometryConfig
{
  double background_voxel = 0.10;
  double occupancy_fraction = 0.5;
  double downsample_cell = 0.05;
  double dbscan_eps = 0.35;
  std::size_t dbscan_min_pts = 5;
  std::size_t min_cluster_size = 5;
};

/// Static-scene occupancy grid for one sensor.
struct BackgroundModel
{
  SensorId sensor_id{0};
  double voxel_edge{0.10};
  std::size_t frame_count{0};
  std::unordered_set<VoxelKey, VoxelKeyHash> background;

  bool is_background(const Point3 & p) const
  {
    return background.count(voxel_of(p, voxel_edge)) != 0;
  }
};

/// A voxel is background when it is occupied in at least
/// `occupancy_fraction` of the calibration frames.
BackgroundModel build_background(
  std::span<const Frame> frames, double voxel_edge, double occupancy_fraction = 0.5);

Frame subtract_background(const Frame & frame, const BackgroundModel & model);

/// One centroid per occupied cell, ordered by cell index.
std::vector<Point3> voxel_downsample(std::span<const Point3> points, double cell);

/// DBSCAN over the XY projection. Points are visited in lexicographic order so
/// the partition does not depend on input order; segments keep 3D points.
std::vector<HumanSegment> segment_humans(
  const Frame & frame, double eps, std::size_t min_pts, std::size_t min_cluster_size = 0);

/// Cluster labels (-1 = noise) for points already in canonical order.
std::vector<int> dbscan_xy(std::span<const Point3> sorted_points, double eps, std::size_t min_pts);

/// Background subtraction, voxel downsampling and segmentation of one frame.
std::vector<HumanSegment> extract_segments(
  const Frame & frame, const BackgroundModel * background, const GeometryConfig & config);

}  // namespace trajlink

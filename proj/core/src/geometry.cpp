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

#include "trajlink/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace trajlink
{

HumanSegment make_segment(SensorId sensor_id, double t, std::vector<Point3> points)
{
  HumanSegment seg;
  seg.sensor_id = sensor_id;
  seg.t = t;
  double sx = 0.0;
  double sy = 0.0;
  for (const auto & p : points) {
    sx += p.x;
    sy += p.y;
  }
  if (!points.empty()) {
    const auto n = static_cast<double>(points.size());
    seg.centroid = {sx / n, sy / n};
  }
  seg.points = std::move(points);
  return seg;
}

double distance_to_segment(Point2 p, Point2 a, Point2 b)
{
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double s = 0.0;
  if (len2 > 0.0) {
    s = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.x - (a.x + s * dx), p.y - (a.y + s * dy));
}

VoxelKey voxel_of(const Point3 & p, double edge)
{
  return {
    static_cast<std::int64_t>(std::floor(p.x / edge)),
    static_cast<std::int64_t>(std::floor(p.y / edge)),
    static_cast<std::int64_t>(std::floor(p.z / edge))};
}

BackgroundModel build_background(
  std::span<const Frame> frames, double voxel_edge, double occupancy_fraction)
{
  if (frames.empty()) {
    throw DataError("no calibration frames");
  }
  if (!(voxel_edge > 0.0)) {
    throw std::invalid_argument("voxel edge must be positive");
  }
  const SensorId sensor = frames.front().sensor_id;
  std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> hits;
  for (const auto & frame : frames) {
    if (frame.sensor_id != sensor) {
      throw std::invalid_argument("calibration frames mix sensor ids");
    }
    std::unordered_set<VoxelKey, VoxelKeyHash> seen;
    for (const auto & p : frame.points) {
      seen.insert(voxel_of(p, voxel_edge));
    }
    for (const auto & key : seen) {
      ++hits[key];
    }
  }

  BackgroundModel model;
  model.sensor_id = sensor;
  model.voxel_edge = voxel_edge;
  model.frame_count = frames.size();
  const double needed = occupancy_fraction * static_cast<double>(frames.size());
  for (const auto & [key, count] : hits) {
    if (static_cast<double>(count) >= needed) {
      model.background.insert(key);
    }
  }
  return model;
}

Frame subtract_background(const Frame & frame, const BackgroundModel & model)
{
  if (frame.sensor_id != model.sensor_id) {
    throw std::invalid_argument("background model belongs to another sensor");
  }
  Frame out;
  out.sensor_id = frame.sensor_id;
  out.t = frame.t;
  out.points.reserve(frame.points.size());
  for (const auto & p : frame.points) {
    if (!model.is_background(p)) {
      out.points.push_back(p);
    }
  }
  return out;
}

std::vector<Point3> voxel_downsample(std::span<const Point3> points, double cell)
{
  if (!(cell > 0.0)) {
    throw std::invalid_argument("voxel cell must be positive");
  }
  struct Acc
  {
    double x = 0.0, y = 0.0, z = 0.0;
    std::size_t n = 0;
  };
  std::unordered_map<VoxelKey, Acc, VoxelKeyHash> cells;
  cells.reserve(points.size());
  for (const auto & p : points) {
    auto & acc = cells[voxel_of(p, cell)];
    acc.x += p.x;
    acc.y += p.y;
    acc.z += p.z;
    ++acc.n;
  }
  std::vector<std::pair<VoxelKey, Acc>> ordered(cells.begin(), cells.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto & a, const auto & b) {
    return a.first < b.first;
  });
  std::vector<Point3> out;
  out.reserve(ordered.size());
  for (const auto & [key, acc] : ordered) {
    const auto n = static_cast<double>(acc.n);
    out.push_back({acc.x / n, acc.y / n, acc.z / n});
  }
  return out;
}

namespace
{

struct CellKey
{
  std::int64_t i;
  std::int64_t j;
  bool operator==(const CellKey &) const = default;
};

struct CellKeyHash
{
  std::size_t operator()(const CellKey & c) const noexcept
  {
    return static_cast<std::size_t>(
      static_cast<std::uint64_t>(c.i) * 0x9E3779B97F4A7C15ULL ^
      (static_cast<std::uint64_t>(c.j) + 0x632BE59BD9B4E019ULL));
  }
};

class GridIndex
{
public:
  GridIndex(std::span<const Point3> points, double cell) : points_(points), cell_(cell)
  {
    for (std::size_t idx = 0; idx < points.size(); ++idx) {
      cells_[key(points[idx].x, points[idx].y)].push_back(idx);
    }
  }

  void neighbors(std::size_t idx, double eps, std::vector<std::size_t> & out) const
  {
    out.clear();
    const auto & p = points_[idx];
    const CellKey c = key(p.x, p.y);
    const double eps2 = eps * eps;
    for (std::int64_t di = -1; di <= 1; ++di) {
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = cells_.find({c.i + di, c.j + dj});
        if (it == cells_.end()) {
          continue;
        }
        for (std::size_t other : it->second) {
          const double dx = points_[other].x - p.x;
          const double dy = points_[other].y - p.y;
          if (dx * dx + dy * dy <= eps2) {
            out.push_back(other);
          }
        }
      }
    }
  }

private:
  CellKey key(double x, double y) const
  {
    return {
      static_cast<std::int64_t>(std::floor(x / cell_)),
      static_cast<std::int64_t>(std::floor(y / cell_))};
  }

  std::span<const Point3> points_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells_;
};

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

}  // namespace

std::vector<int> dbscan_xy(std::span<const Point3> sorted_points, double eps, std::size_t min_pts)
{
  std::vector<int> labels(sorted_points.size(), kUnvisited);
  if (sorted_points.empty()) {
    return labels;
  }
  GridIndex index(sorted_points, eps);
  std::vector<std::size_t> nbrs;
  std::vector<std::size_t> nbrs_q;
  std::deque<std::size_t> queue;
  int cluster = 0;
  for (std::size_t i = 0; i < sorted_points.size(); ++i) {
    if (labels[i] != kUnvisited) {
      continue;
    }
    index.neighbors(i, eps, nbrs);
    if (nbrs.size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    labels[i] = cluster;
    queue.assign(nbrs.begin(), nbrs.end());
    while (!queue.empty()) {
      const std::size_t q = queue.front();
      queue.pop_front();
      if (labels[q] == kNoise) {
        labels[q] = cluster;
      }
      if (labels[q] != kUnvisited) {
        continue;
      }
      labels[q] = cluster;
      index.neighbors(q, eps, nbrs_q);
      if (nbrs_q.size() >= min_pts) {
        queue.insert(queue.end(), nbrs_q.begin(), nbrs_q.end());
      }
    }
    ++cluster;
  }
  return labels;
}

std::vector<HumanSegment> segment_humans(
  const Frame & frame, double eps, std::size_t min_pts, std::size_t min_cluster_size)
{
  std::vector<Point3> sorted = frame.points;
  std::sort(sorted.begin(), sorted.end());
  const auto labels = dbscan_xy(sorted, eps, min_pts);

  int n_clusters = 0;
  for (int l : labels) {
    n_clusters = std::max(n_clusters, l + 1);
  }
  std::vector<std::vector<Point3>> members(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (labels[i] >= 0) {
      members[static_cast<std::size_t>(labels[i])].push_back(sorted[i]);
    }
  }
  std::vector<HumanSegment> out;
  for (auto & pts : members) {
    if (pts.empty() || pts.size() < min_cluster_size) {
      continue;
    }
    out.push_back(make_segment(frame.sensor_id, frame.t, std::move(pts)));
  }
  return out;
}

std::vector<HumanSegment> extract_segments(
  const Frame & frame, const BackgroundModel * background, const GeometryConfig & config)
{
  Frame fg = background != nullptr ? subtract_background(frame, *background) : frame;
  fg.points = voxel_downsample(fg.points, config.downsample_cell);
  return segment_humans(fg, config.dbscan_eps, config.dbscan_min_pts, config.min_cluster_size);
}

}  // namespace trajlink

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

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajlink
{

using SensorId = std::int32_t;
using TrackId = std::int64_t;
using GateId = std::int32_t;
using PersonId = std::int32_t;

inline constexpr GateId kUnknownGate = -1;
inline constexpr PersonId kUnknownPerson = -1;

/// Raised for malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct Point3
{
  double x{0.0};
  double y{0.0};
  double z{0.0};

  auto operator<=>(const Point3 &) const = default;
};

inline bool is_finite(const Point3 & p)
{
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

struct Point2
{
  double x{0.0};
  double y{0.0};

  auto operator<=>(const Point2 &) const = default;
};

/// Axis-aligned rectangle in the XY plane.
struct Rect
{
  Point2 min;
  Point2 max;

  bool contains(double x, double y) const
  {
    return x >= min.x && x <= max.x && y >= min.y && y <= max.y;
  }
  Point2 clamp(Point2 p) const
  {
    return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
  }
};

/// One scan of a sensor.
struct Frame
{
  SensorId sensor_id{0};
  double t{0.0};
  std::vector<Point3> points;
};

/// Clustered point cloud of one person in one frame. Points keep their
/// full 3D coordinates; the centroid is the mean of the member XY values.
struct HumanSegment
{
  SensorId sensor_id{0};
  double t{0.0};
  std::vector<Point3> points;
  Point2 centroid;
};

HumanSegment make_segment(SensorId sensor_id, double t, std::vector<Point3> points);

/// Line segment on the boundary of a sensor's trajectory area through which
/// pedestrians enter or leave.
struct Gate
{
  GateId id{0};
  SensorId sensor_id{0};
  Point2 a;
  Point2 b;
};

double distance_to_segment(Point2 p, Point2 a, Point2 b);

struct TrajectorySample
{
  double t{0.0};
  double x{0.0};
  double y{0.0};
};

/// One person's track inside a single sensor's trajectory area.
struct SubTrajectory
{
  TrackId id{0};
  SensorId sensor_id{0};
  std::vector<TrajectorySample> samples;
  double t_start{0.0};
  double t_end{0.0};
  GateId start_gate{kUnknownGate};
  GateId end_gate{kUnknownGate};
  // Every k-th segment of the track, kept for appearance features.
  std::vector<HumanSegment> segments;
};

/// `a` strictly precedes `b` in time: a ends before b starts.
inline bool temporal_precedes(const SubTrajectory & a, const SubTrajectory & b)
{
  return a.t_end < b.t_start;
}

}  // namespace trajlink

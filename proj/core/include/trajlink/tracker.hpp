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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "trajlink/types.hpp"

namespace trajlink
{

struct TrackerConfig
{
  double accel_noise = 0.5;       // sigma_a, m/s^2
  double measurement_noise = 0.1; // sigma_z, m
  double initial_speed_sigma = 1.0;
  double gate_radius = 0.8;
  int max_missed = 5;
  std::size_t min_track_len = 3;
  std::size_t segment_stride = 5;
  std::optional<Rect> area;  // samples are clamped into the trajectory area
};

/// Constant-velocity Kalman state [x, y, vx, vy].
struct TrackState
{
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
  int frames_missed{0};

  Point2 position() const { return {x(0), x(1)}; }
};

void kalman_predict(TrackState & state, double dt, double accel_noise);
void kalman_update(TrackState & state, Point2 z, double measurement_noise);

/// A live track: filter state plus the history that becomes a SubTrajectory.
struct Track
{
  TrackId id{0};
  SensorId sensor_id{0};
  TrackState state;
  std::vector<TrajectorySample> samples;
  std::vector<HumanSegment> segments;
  std::size_t hits{0};
};

struct TrackStepResult
{
  std::vector<Track> updated;
  std::vector<Track> spawned;
  std::vector<SubTrajectory> terminated;
  // association[i] = index into `updated` that took segment i, or -1 if it spawned.
  std::vector<int> association;
};

/// Predict every track by dt, associate segments to predictions by a gated
/// Hungarian assignment on Euclidean distance, spawn tracks for leftover
/// segments and terminate tracks that missed more than max_missed frames.
TrackStepResult track_step(
  std::vector<Track> active, std::span<const HumanSegment> segments, double dt,
  const TrackerConfig & config, TrackId & next_id);

/// Converts a finished track; std::nullopt when it is shorter than min_track_len.
std::optional<SubTrajectory> finalize_track(Track track, const TrackerConfig & config);

/// Per-sensor tracker driving track_step over a frame sequence.
class Tracker
{
public:
  Tracker(SensorId sensor_id, TrackerConfig config, TrackId first_id = 0);

  /// Feeds the segments observed at time t (may be empty).
  void step(double t, std::span<const HumanSegment> segments);
  /// Terminates all live tracks.
  void finish();

  std::vector<SubTrajectory> take_finished();
  const std::vector<Track> & active() const { return active_; }
  TrackId next_id() const { return next_id_; }

private:
  SensorId sensor_id_;
  TrackerConfig config_;
  TrackId next_id_;
  std::optional<double> last_t_;
  std::vector<Track> active_;
  std::vector<SubTrajectory> finished_;
};

/// Snaps both endpoints to the nearest gate of the same sensor within
/// delta_gate (ties go to the lower gate id); otherwise kUnknownGate.
SubTrajectory assign_gates(SubTrajectory tr, std::span<const Gate> gates, double delta_gate);

GateId nearest_gate(Point2 p, SensorId sensor_id, std::span<const Gate> gates, double delta_gate);

}  // namespace trajlink

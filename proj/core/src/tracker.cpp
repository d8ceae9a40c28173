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

#include "trajlink/tracker.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "trajlink/assignment.hpp"

namespace trajlink
{

void kalman_predict(TrackState & state, double dt, double accel_noise)
{
  Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
  F(0, 2) = dt;
  F(1, 3) = dt;
  const double q = accel_noise * accel_noise;
  const double dt2 = dt * dt;
  Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
  Q(0, 0) = Q(1, 1) = q * dt2 * dt2 / 4.0;
  Q(0, 2) = Q(2, 0) = Q(1, 3) = Q(3, 1) = q * dt2 * dt / 2.0;
  Q(2, 2) = Q(3, 3) = q * dt2;
  state.x = F * state.x;
  state.P = F * state.P * F.transpose() + Q;
}

void kalman_update(TrackState & state, Point2 z, double measurement_noise)
{
  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 0) = 1.0;
  H(1, 1) = 1.0;
  const Eigen::Matrix2d R = Eigen::Matrix2d::Identity() * measurement_noise * measurement_noise;
  const Eigen::Vector2d innovation = Eigen::Vector2d(z.x, z.y) - H * state.x;
  const Eigen::Matrix2d S = H * state.P * H.transpose() + R;
  const Eigen::Matrix<double, 4, 2> K = state.P * H.transpose() * S.inverse();
  state.x += K * innovation;
  // Joseph form keeps P symmetric positive semi-definite.
  const Eigen::Matrix4d I_KH = Eigen::Matrix4d::Identity() - K * H;
  state.P = I_KH * state.P * I_KH.transpose() + K * R * K.transpose();
  state.P = 0.5 * (state.P + state.P.transpose());
}

namespace
{

Point2 sample_position(const TrackState & state, const TrackerConfig & config)
{
  const Point2 p = state.position();
  return config.area ? config.area->clamp(p) : p;
}

void record(Track & track, const HumanSegment & seg, const TrackerConfig & config)
{
  const Point2 p = sample_position(track.state, config);
  track.samples.push_back({seg.t, p.x, p.y});
  const std::size_t stride = std::max<std::size_t>(config.segment_stride, 1);
  if (track.hits % stride == 0) {
    track.segments.push_back(seg);
  }
  ++track.hits;
}

Track spawn(const HumanSegment & seg, const TrackerConfig & config, TrackId id)
{
  Track track;
  track.id = id;
  track.sensor_id = seg.sensor_id;
  track.state.x << seg.centroid.x, seg.centroid.y, 0.0, 0.0;
  const double pz = config.measurement_noise * config.measurement_noise;
  const double pv = config.initial_speed_sigma * config.initial_speed_sigma;
  track.state.P = Eigen::Vector4d(pz, pz, pv, pv).asDiagonal();
  record(track, seg, config);
  return track;
}

}  // namespace

TrackStepResult track_step(
  std::vector<Track> active, std::span<const HumanSegment> segments, double dt,
  const TrackerConfig & config, TrackId & next_id)
{
  if (!(dt > 0.0)) {
    throw std::invalid_argument("track_step requires dt > 0");
  }
  for (auto & track : active) {
    kalman_predict(track.state, dt, config.accel_noise);
  }

  const auto n_t = static_cast<Eigen::Index>(active.size());
  const auto n_s = static_cast<Eigen::Index>(segments.size());
  std::vector<int> track_for_segment(segments.size(), -1);
  std::vector<char> track_hit(active.size(), 0);

  if (n_t > 0 && n_s > 0) {
    const Eigen::Index n = n_t + n_s;
    const double gate = config.gate_radius;
    const double forbidden = 2.0 * gate * static_cast<double>(n) + 1.0;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, n, forbidden);
    for (Eigen::Index i = 0; i < n_t; ++i) {
      const Point2 pred = active[static_cast<std::size_t>(i)].state.position();
      for (Eigen::Index j = 0; j < n_s; ++j) {
        const Point2 c = segments[static_cast<std::size_t>(j)].centroid;
        const double d = std::hypot(c.x - pred.x, c.y - pred.y);
        if (d <= gate) {
          cost(i, j) = d;
        }
      }
      cost(i, n_s + i) = gate;
    }
    for (Eigen::Index j = 0; j < n_s; ++j) {
      cost(n_t + j, j) = gate;
      for (Eigen::Index k = 0; k < n_t; ++k) {
        cost(n_t + j, n_s + k) = 0.0;
      }
    }
    const Assignment assignment = solve_assignment(cost);
    for (Eigen::Index i = 0; i < n_t; ++i) {
      const int j = assignment.row_to_col[static_cast<std::size_t>(i)];
      if (j < n_s && cost(i, j) < forbidden) {
        track_for_segment[static_cast<std::size_t>(j)] = static_cast<int>(i);
        track_hit[static_cast<std::size_t>(i)] = 1;
      }
    }
  }

  TrackStepResult result;
  std::vector<int> updated_index(active.size(), -1);
  for (std::size_t i = 0; i < active.size(); ++i) {
    Track & track = active[i];
    if (track_hit[i]) {
      continue;
    }
    ++track.state.frames_missed;
  }
  // Apply measurements segment by segment so histories follow segment order.
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const int i = track_for_segment[j];
    if (i < 0) {
      continue;
    }
    Track & track = active[static_cast<std::size_t>(i)];
    kalman_update(track.state, segments[j].centroid, config.measurement_noise);
    track.state.frames_missed = 0;
    record(track, segments[j], config);
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    Track & track = active[i];
    if (track.state.frames_missed > config.max_missed) {
      if (auto sub = finalize_track(std::move(track), config)) {
        result.terminated.push_back(std::move(*sub));
      }
      continue;
    }
    updated_index[i] = static_cast<int>(result.updated.size());
    result.updated.push_back(std::move(track));
  }
  result.association.assign(segments.size(), -1);
  for (std::size_t j = 0; j < segments.size(); ++j) {
    const int i = track_for_segment[j];
    if (i >= 0) {
      result.association[j] = updated_index[static_cast<std::size_t>(i)];
    } else {
      result.spawned.push_back(spawn(segments[j], config, next_id++));
    }
  }
  return result;
}

std::optional<SubTrajectory> finalize_track(Track track, const TrackerConfig & config)
{
  if (track.samples.size() < std::max<std::size_t>(config.min_track_len, 1)) {
    return std::nullopt;
  }
  SubTrajectory sub;
  sub.id = track.id;
  sub.sensor_id = track.sensor_id;
  sub.t_start = track.samples.front().t;
  sub.t_end = track.samples.back().t;
  sub.samples = std::move(track.samples);
  sub.segments = std::move(track.segments);
  return sub;
}

Tracker::Tracker(SensorId sensor_id, TrackerConfig config, TrackId first_id)
: sensor_id_(sensor_id), config_(std::move(config)), next_id_(first_id)
{
}

void Tracker::step(double t, std::span<const HumanSegment> segments)
{
  for (const auto & seg : segments) {
    if (seg.sensor_id != sensor_id_) {
      throw std::invalid_argument("segment from another sensor");
    }
  }
  if (!last_t_) {
    last_t_ = t;
    for (const auto & seg : segments) {
      active_.push_back(spawn(seg, config_, next_id_++));
    }
    return;
  }
  const double dt = t - *last_t_;
  if (!(dt > 0.0)) {
    throw std::invalid_argument("frame timestamps must be strictly increasing per sensor");
  }
  last_t_ = t;
  auto result = track_step(std::move(active_), segments, dt, config_, next_id_);
  active_ = std::move(result.updated);
  for (auto & track : result.spawned) {
    active_.push_back(std::move(track));
  }
  for (auto & sub : result.terminated) {
    finished_.push_back(std::move(sub));
  }
}

void Tracker::finish()
{
  for (auto & track : active_) {
    if (auto sub = finalize_track(std::move(track), config_)) {
      finished_.push_back(std::move(*sub));
    }
  }
  active_.clear();
}

std::vector<SubTrajectory> Tracker::take_finished()
{
  std::vector<SubTrajectory> out = std::move(finished_);
  finished_.clear();
  return out;
}

GateId nearest_gate(Point2 p, SensorId sensor_id, std::span<const Gate> gates, double delta_gate)
{
  GateId best = kUnknownGate;
  double best_d = 0.0;
  for (const auto & gate : gates) {
    if (gate.sensor_id != sensor_id) {
      continue;
    }
    const double d = distance_to_segment(p, gate.a, gate.b);
    if (d > delta_gate) {
      continue;
    }
    const bool closer = best == kUnknownGate || d < best_d - 1e-12;
    const bool tie_lower = best != kUnknownGate && std::abs(d - best_d) <= 1e-12 && gate.id < best;
    if (closer || tie_lower) {
      best = gate.id;
      best_d = closer ? d : best_d;
    }
  }
  return best;
}

SubTrajectory assign_gates(SubTrajectory tr, std::span<const Gate> gates, double delta_gate)
{
  if (tr.samples.empty()) {
    tr.start_gate = kUnknownGate;
    tr.end_gate = kUnknownGate;
    return tr;
  }
  const auto & first = tr.samples.front();
  const auto & last = tr.samples.back();
  tr.start_gate = nearest_gate({first.x, first.y}, tr.sensor_id, gates, delta_gate);
  tr.end_gate = nearest_gate({last.x, last.y}, tr.sensor_id, gates, delta_gate);
  return tr;
}

}  // namespace trajlink

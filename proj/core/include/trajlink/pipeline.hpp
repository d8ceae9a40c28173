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

#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "trajlink/geometry.hpp"
#include "trajlink/simulator.hpp"
#include "trajlink/tracker.hpp"
#include "trajlink/types.hpp"

namespace trajlink
{

struct ExtractionConfig
{
  GeometryConfig geometry;
  TrackerConfig tracker;
  double delta_gate = 0.5;
};

/// Frames to gated sub-trajectories for every sensor of a map.
class Extractor
{
public:
  Extractor(std::vector<SensorSpec> sensors, std::vector<Gate> gates, ExtractionConfig config);
  Extractor(const MapSpec & map, ExtractionConfig config);

  /// Builds per-sensor background models from pedestrian-free frames.
  void calibrate(std::span<const Frame> frames);
  /// Segments and tracks one frame; frames of a sensor must be time-ordered.
  void process(const Frame & frame);
  /// Terminates all tracks and returns every sub-trajectory, gated and
  /// renumbered 0..n-1 in (t_start, sensor_id) order.
  std::vector<SubTrajectory> finish();

private:
  std::vector<SensorSpec> sensors_;
  std::vector<Gate> gates_;
  ExtractionConfig config_;
  std::map<SensorId, BackgroundModel> backgrounds_;
  std::map<SensorId, std::unique_ptr<Tracker>> trackers_;
};

/// Simulates a scenario and extracts its sub-trajectories without keeping
/// frames in memory. Ground truth is returned alongside.
struct ExtractedScenario
{
  std::vector<SubTrajectory> trajectories;
  std::vector<TruthTick> truth;
};

ExtractedScenario simulate_and_extract(
  const MapSpec & map, const ScenarioSpec & scenario, const ExtractionConfig & config);

/// Majority person of the nearest ground-truth position over a trajectory's
/// samples (within max_distance); kUnknownPerson when no sample is close.
std::map<TrackId, PersonId> label_trajectories(
  std::span<const SubTrajectory> trajectories, std::span<const TruthTick> truth, double max_distance = 1.0);

/// Consecutive sub-trajectories of each person (time order, causal pairs only).
std::vector<std::pair<TrackId, TrackId>> truth_pairs(
  std::span<const SubTrajectory> trajectories, const std::map<TrackId, PersonId> & labels);

}  // namespace trajlink

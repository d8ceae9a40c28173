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
#include <vector>

#include "trajlink/types.hpp"

namespace trajlink
{

enum class DensityProfile
{
  Dense,
  Sparse
};

/// Points per body ~ budget / d^2 clamped to [min_points, max_points].
struct DensityParams
{
  double budget{24000.0};
  double min_points{300.0};
  double max_points{1500.0};
  double range_sigma{0.02};
};

DensityParams density_params(DensityProfile profile);

struct SensorSpec
{
  SensorId id{0};
  Point3 position;
  double yaw_deg{0.0};
  double fov_h_deg{70.4};
  double fov_v_deg{77.2};
  double max_range{460.0};
  DensityProfile profile{DensityProfile::Dense};
  Rect area;  // trajectory area; points outside it are not reported
};

struct MapSpec
{
  std::vector<Point2> floor;  // convex polygon, counter-clockwise
  std::vector<SensorSpec> sensors;
  std::vector<Rect> blanks;
  std::vector<Gate> gates;
  std::vector<Rect> pillars;      // static obstacles, 2 m tall
  double static_spacing{0.2};     // floor point spacing for the static scene
};

struct BodyModel
{
  PersonId id{0};
  double height{1.7};
  double shoulder_width{0.42};
  double torso_radius{0.13};  // front-to-back half depth
  double head_radius{0.1};
  double gait_frequency{1.8};  // Hz
  double gait_amplitude{0.35}; // leg swing, radians
  double speed{1.25};          // m/s
};

/// Deterministic body drawn from (population_seed, id).
BodyModel sample_body(std::uint64_t population_seed, PersonId id);

struct WalkerSpec
{
  BodyModel body;
  std::vector<Point2> path;  // waypoints walked once, in order
  double start_time{0.0};
};

struct ScenarioSpec
{
  std::size_t subjects{4};
  std::vector<Point2> route;
  bool closed_route{true};
  int laps{3};
  double interval{10.0};
  double duration{0.0};  // 0 runs until the last walker finishes
  DensityProfile density{DensityProfile::Dense};
  std::uint64_t seed{1};
  std::uint64_t population_seed{7};
  PersonId first_person{0};
  double lateral_spread{0.3};  // walkers keep a fixed offset in [-s, s] from the route
  double tick{0.1};
  int calibration_frames{10};
  std::vector<WalkerSpec> walkers;  // when non-empty, used instead of the generated plan
};

/// Walkers of a scenario: explicit ones, or `subjects` bodies starting every
/// `interval` seconds on the offset route repeated `laps` times.
std::vector<WalkerSpec> plan_walkers(const ScenarioSpec & scenario);

struct PersonPosition
{
  PersonId person{0};
  Point2 position;
};

struct TruthTick
{
  double t{0.0};
  std::vector<PersonPosition> persons;
};

/// Position of a walker at time t, or false when it is not on the floor.
bool walker_position(const WalkerSpec & walker, double t, Point2 & out);

using FrameSink = std::function<void(const Frame &)>;
using TruthSink = std::function<void(const TruthTick &)>;

/// Static-scene frames without pedestrians for background calibration.
/// Timestamps are negative so they precede the scenario.
std::vector<Frame> calibration_frames(const MapSpec & map, const ScenarioSpec & scenario);

/// Runs the tick loop from t = 0, emitting per tick one frame per sensor
/// (ascending id) followed by the ground-truth positions.
void simulate(const MapSpec & map, const ScenarioSpec & scenario, const FrameSink & on_frame, const TruthSink & on_truth);

struct SimulationOutput
{
  std::vector<Frame> calibration;
  std::vector<Frame> frames;
  std::vector<TruthTick> truth;
};

SimulationOutput simulate(const MapSpec & map, const ScenarioSpec & scenario);

/// Square-loop test bed: two dense sensors on either side of a blank strip.
MapSpec exp1_map();
std::vector<Point2> exp1_route();

/// Scenario 1-(a): n in {2, 4, 8, 16, 32} subjects starting `interval` apart.
ScenarioSpec scenario_1a(std::size_t n_subjects, double interval = 10.0, std::uint64_t seed = 1);

/// Long corridor covered by four sparse wide-angle sensors with blanks between.
MapSpec corridor_map();

struct CorridorTraffic
{
  std::vector<double> rates_per_minute{0.5, 2.0, 4.0, 6.0, 3.0, 1.5, 4.0, 1.0};
  double slot_seconds{180.0};
  std::uint64_t population_seed{11};
};

/// Poisson bidirectional end-to-end walkers for one slot of one day.
ScenarioSpec corridor_slot(int day, std::size_t slot, const CorridorTraffic & traffic, std::uint64_t seed);

/// Per-tick random substream seed.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace trajlink

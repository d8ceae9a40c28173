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

#include "trajlink/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trajlink
{

Extractor::Extractor(std::vector<SensorSpec> sensors, std::vector<Gate> gates, ExtractionConfig config)
: sensors_(std::move(sensors)), gates_(std::move(gates)), config_(std::move(config))
{
  for (const auto & s : sensors_) {
    TrackerConfig tc = config_.tracker;
    tc.area = s.area;
    trackers_[s.id] = std::make_unique<Tracker>(s.id, tc);
  }
}

Extractor::Extractor(const MapSpec & map, ExtractionConfig config)
: Extractor(map.sensors, map.gates, std::move(config))
{
}

void Extractor::calibrate(std::span<const Frame> frames)
{
  std::map<SensorId, std::vector<Frame>> by_sensor;
  for (const auto & f : frames) {
    by_sensor[f.sensor_id].push_back(f);
  }
  for (auto & [id, list] : by_sensor) {
    backgrounds_[id] =
      build_background(list, config_.geometry.background_voxel, config_.geometry.occupancy_fraction);
  }
}

void Extractor::process(const Frame & frame)
{
  auto it = trackers_.find(frame.sensor_id);
  if (it == trackers_.end()) {
    throw DataError("frame from unknown sensor " + std::to_string(frame.sensor_id));
  }
  const auto bg = backgrounds_.find(frame.sensor_id);
  const BackgroundModel * model = bg == backgrounds_.end() ? nullptr : &bg->second;
  const auto segments = extract_segments(frame, model, config_.geometry);
  it->second->step(frame.t, segments);
}

std::vector<SubTrajectory> Extractor::finish()
{
  std::vector<SubTrajectory> all;
  for (auto & [id, tracker] : trackers_) {
    tracker->finish();
    for (auto & tr : tracker->take_finished()) {
      all.push_back(assign_gates(std::move(tr), gates_, config_.delta_gate));
    }
  }
  std::sort(all.begin(), all.end(), [](const SubTrajectory & a, const SubTrajectory & b) {
    if (a.t_start != b.t_start) {
      return a.t_start < b.t_start;
    }
    if (a.sensor_id != b.sensor_id) {
      return a.sensor_id < b.sensor_id;
    }
    return a.id < b.id;
  });
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i].id = static_cast<TrackId>(i);
  }
  return all;
}

ExtractedScenario simulate_and_extract(
  const MapSpec & map, const ScenarioSpec & scenario, const ExtractionConfig & config)
{
  Extractor extractor(map, config);
  extractor.calibrate(calibration_frames(map, scenario));
  ExtractedScenario out;
  simulate(
    map, scenario, [&](const Frame & f) { extractor.process(f); },
    [&](const TruthTick & t) { out.truth.push_back(t); });
  out.trajectories = extractor.finish();
  return out;
}

std::map<TrackId, PersonId> label_trajectories(
  std::span<const SubTrajectory> trajectories, std::span<const TruthTick> truth, double max_distance)
{
  std::map<TrackId, PersonId> labels;
  for (const auto & tr : trajectories) {
    std::map<PersonId, std::size_t> votes;
    for (const auto & s : tr.samples) {
      const auto it = std::lower_bound(
        truth.begin(), truth.end(), s.t - 1e-6, [](const TruthTick & tick, double t) { return tick.t < t; });
      if (it == truth.end() || std::abs(it->t - s.t) > 1e-6) {
        continue;
      }
      PersonId best = kUnknownPerson;
      double best_d = max_distance;
      for (const auto & p : it->persons) {
        const double d = std::hypot(p.position.x - s.x, p.position.y - s.y);
        if (d <= best_d) {
          best_d = d;
          best = p.person;
        }
      }
      if (best != kUnknownPerson) {
        ++votes[best];
      }
    }
    PersonId label = kUnknownPerson;
    std::size_t best_votes = 0;
    for (const auto & [person, count] : votes) {
      if (count > best_votes) {
        best_votes = count;
        label = person;
      }
    }
    labels[tr.id] = label;
  }
  return labels;
}

std::vector<std::pair<TrackId, TrackId>> truth_pairs(
  std::span<const SubTrajectory> trajectories, const std::map<TrackId, PersonId> & labels)
{
  std::map<PersonId, std::vector<const SubTrajectory *>> by_person;
  for (const auto & tr : trajectories) {
    const auto it = labels.find(tr.id);
    if (it == labels.end() || it->second == kUnknownPerson) {
      continue;
    }
    by_person[it->second].push_back(&tr);
  }
  std::vector<std::pair<TrackId, TrackId>> pairs;
  for (auto & [person, list] : by_person) {
    std::sort(list.begin(), list.end(), [](const SubTrajectory * a, const SubTrajectory * b) {
      if (a->t_start != b->t_start) {
        return a->t_start < b->t_start;
      }
      return a->id < b->id;
    });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (temporal_precedes(*list[i - 1], *list[i])) {
        pairs.emplace_back(list[i - 1]->id, list[i]->id);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

}  // namespace trajlink

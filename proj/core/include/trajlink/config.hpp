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
#include <string>
#include <vector>

#include "trajlink/embedding.hpp"
#include "trajlink/matcher.hpp"
#include "trajlink/pipeline.hpp"
#include "trajlink/simulator.hpp"
#include "trajlink/spatiotemporal.hpp"

namespace trajlink
{

struct FeatureConfig
{
  int grid_x = 3;
  int grid_y = 3;
  int grid_z = 6;
  double sigma = 0.25;
  double body_scale = 2.0;
};

/// Everything the harness can tune. Each JSON section maps to one struct:
/// geometry, tracker, features, embedding, spatiotemporal, matcher,
/// simulator, harness.
struct HarnessConfig
{
  std::uint64_t seed = 1;
  bool update = true;

  ExtractionConfig extraction;
  FeatureConfig features;
  TrainConfig train;
  TravelTimeConfig travel;
  double detection_window = 30.0;
  MatcherConfig matcher;

  // Simulator / experiment parameters.
  std::uint64_t population_seed = 7;
  std::size_t training_subjects = 32;
  int training_laps = 2;
  double training_interval = 20.0;
  double holdout_fraction = 0.1;
  std::vector<std::size_t> subject_counts{2, 4, 8, 16, 32};
  std::vector<double> intervals{0.0, 5.0, 10.0, 15.0, 20.0};
  std::size_t base_subjects = 4;
  double base_interval = 10.0;
  int corridor_days = 5;
  CorridorTraffic traffic;

  std::string model_path;       // trained appearance model; empty trains on demand
  bool train_if_missing = true;
};

/// Parses a JSON document; unknown sections or keys raise DataError.
HarnessConfig config_from_json(const std::string & text, HarnessConfig base = {});
HarnessConfig load_config(const std::string & path, HarnessConfig base = {});
std::string config_to_json(const HarnessConfig & config);

GmmGrid make_grid(const FeatureConfig & config);

}  // namespace trajlink

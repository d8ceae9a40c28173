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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajlink/config.hpp"
#include "trajlink/evaluation.hpp"
#include "trajlink/matcher.hpp"
#include "trajlink/pipeline.hpp"

namespace trajlink
{

/// Trained appearance model plus its held-out re-identification quality.
struct TrainingSummary
{
  AppearanceModel model;
  std::vector<double> epoch_loss;
  std::size_t train_samples{0};
  std::size_t holdout_samples{0};
  double auc{0.0};
  std::vector<RocPoint> roc;
};

/// Segment features of the training population split into train and
/// held-out parts by sub-trajectory.
struct TrainingData
{
  std::vector<LabeledFeature> train;
  std::vector<LabeledFeature> holdout;
  std::vector<TrackId> holdout_tracks;  // one entry per held-out sample
};

TrainingData training_dataset(const HarnessConfig & config, const GmmGrid & grid);

/// Held-out AUC of segment-pair P1 (same person vs different person,
/// pairs drawn from different sub-trajectories).
double holdout_auc(
  const TrainingData & data, const AppearanceModel & model, std::vector<RocPoint> * roc = nullptr);

TrainingSummary train_and_validate(const HarnessConfig & config);

/// One extracted scenario with everything needed to match and score it.
struct ScenarioRun
{
  std::map<std::string, double> params;
  std::vector<SubTrajectory> trajectories;
  std::map<TrackId, PersonId> labels;
  std::vector<std::pair<TrackId, TrackId>> truth;
  std::vector<MatchNode> nodes;
  std::vector<TrackId> ids;
  std::vector<HighConfidenceTransition> detections;
};

/// Batch-matches the whole run and scores it.
EvalReport match_run(
  const ScenarioRun & run, const SpatioTemporalModel & model, const MatcherConfig & config, const std::string & tag);

/// Shares the trained model, extracted scenarios and the pooled update
/// model between experiments.
class ExperimentContext
{
public:
  explicit ExperimentContext(HarnessConfig config);

  const HarnessConfig & config() const { return config_; }
  /// Loads or trains the appearance model. DataError when it is missing
  /// and training is disabled.
  const TrainingSummary & training();
  /// Scenario 1-(a) run on the square-loop bed, cached per parameters.
  const ScenarioRun & exp1_run(std::size_t subjects, double interval);
  SpatioTemporalModel initial() const;
  /// Initial model updated with the high-confidence transitions of every
  /// exp1 scenario (subject sweep plus interval sweep).
  const SpatioTemporalModel & pooled_update();
  const std::vector<HighConfidenceTransition> & pooled_detections();

private:
  HarnessConfig config_;
  MapSpec map_;
  std::optional<TrainingSummary> training_;
  std::map<std::pair<std::size_t, long long>, std::unique_ptr<ScenarioRun>> runs_;
  std::optional<SpatioTemporalModel> pooled_;
  std::vector<HighConfidenceTransition> pooled_detections_;
};

/// Travel-time curves of one gate pair.
struct TravelTimeCurve
{
  GateId from{kUnknownGate};
  GateId to{kUnknownGate};
  std::vector<double> x;
  std::vector<double> prior;
  std::vector<double> likelihood;
  std::vector<double> posterior;
};

TravelTimeCurve travel_time_curve(
  const SpatioTemporalModel & model, std::span<const HighConfidenceTransition> detections, double dt_max);

struct ExperimentOutput
{
  std::string name;
  std::vector<EvalReport> reports;
  std::optional<TravelTimeCurve> travel_time;
  std::vector<RocPoint> roc;
};

/// exp1a, exp1b, exp1c, pre_post or corridor; std::invalid_argument otherwise.
ExperimentOutput run_experiment(const std::string & name, ExperimentContext & context);

std::vector<std::string> experiment_names();

/// Writes tab-separated plot tables into `dir`; returns the file paths.
std::vector<std::string> emit_plots(std::span<const ExperimentOutput> outputs, const std::string & dir);

}  // namespace trajlink

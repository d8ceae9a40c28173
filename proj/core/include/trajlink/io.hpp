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

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "trajlink/embedding.hpp"
#include "trajlink/evaluation.hpp"
#include "trajlink/fisher_vector.hpp"
#include "trajlink/matcher.hpp"
#include "trajlink/simulator.hpp"
#include "trajlink/spatiotemporal.hpp"
#include "trajlink/types.hpp"

namespace trajlink
{

// Line-delimited JSON records. Parse failures raise DataError naming the line.

std::string frame_to_json(const Frame & frame);
Frame frame_from_json(const std::string & line);
void write_frames(std::ostream & out, std::span<const Frame> frames);
std::vector<Frame> read_frames(std::istream & in);

/// A sub-trajectory record with its optional appearance signature.
struct SubTrajectoryRecord
{
  SubTrajectory trajectory;
  Signature signature;
};

std::string subtrajectory_to_json(const SubTrajectory & tr, const Signature * signature = nullptr);
SubTrajectoryRecord subtrajectory_from_json(const std::string & line);
std::vector<SubTrajectoryRecord> read_subtrajectories(std::istream & in);
MatchNode to_node(const SubTrajectoryRecord & record);

std::string match_result_to_json(const MatchResult & result);
MatchResult match_result_from_json(const std::string & line);
std::vector<MatchResult> read_match_results(std::istream & in);

/// `{person_id, sub_trajectory_id}` lines.
void write_ground_truth(std::ostream & out, const std::map<TrackId, PersonId> & labels);
std::map<TrackId, PersonId> read_ground_truth(std::istream & in);

std::string truth_tick_to_json(const TruthTick & tick);
std::vector<TruthTick> read_truth_ticks(std::istream & in);

/// Binary per-segment feature records used for training.
struct SegmentFeatureRecord
{
  TrackId trajectory_id{0};
  PersonId person{kUnknownPerson};
  double height{0.0};
  FeatureMatrix features;
};

void write_segment_features(std::ostream & out, std::span<const SegmentFeatureRecord> records);
std::vector<SegmentFeatureRecord> read_segment_features(std::istream & in);

/// `{Q, pairs: [{from, to, mode, a, b, mu_tt, n, buffer}]}`.
std::string model_state_to_json(const SpatioTemporalModel & model);
SpatioTemporalModel model_state_from_json(const std::string & text, const TravelTimeConfig & config);

std::string reports_to_json(std::span<const EvalReport> reports);

}  // namespace trajlink

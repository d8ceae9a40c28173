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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajlink/matcher.hpp"
#include "trajlink/types.hpp"

namespace trajlink
{

struct EvalReport
{
  std::string tag;
  std::map<std::string, double> params;  // scenario parameters, e.g. subjects, interval, day
  double precision{0.0};
  double recall{0.0};
  double f_measure{0.0};
  std::size_t true_positives{0};
  std::size_t false_positives{0};
  std::size_t false_negatives{0};
  std::vector<double> correct_affinities;
  std::vector<double> wrong_affinities;
  std::optional<double> auc;
};

/// Pair-level precision/recall/F of predicted pairs against the truth pairs.
/// Every id must be in `known_ids` (when non-empty); terminals are ignored.
EvalReport evaluate(
  std::span<const MatchResult> predictions, std::span<const std::pair<TrackId, TrackId>> truth,
  std::span<const TrackId> known_ids = {});

/// Adds the counts and affinity samples of `part` into `total` and refreshes
/// its precision/recall/F.
void accumulate(EvalReport & total, const EvalReport & part);

/// 2PR/(P+R), or 0 when P + R = 0.
double f_measure(double precision, double recall);

/// Mann-Whitney AUC; ties count one half. Throws when either side is empty.
double roc_auc(std::span<const double> positives, std::span<const double> negatives);

struct RocPoint
{
  double fpr;
  double tpr;
};

std::vector<RocPoint> roc_curve(std::span<const double> positives, std::span<const double> negatives);

struct AffinityHistogram
{
  std::vector<double> edges;  // bins + 1 edges over [0, 1]
  std::vector<std::size_t> correct;
  std::vector<std::size_t> wrong;
};

AffinityHistogram affinity_histogram(const EvalReport & report, std::size_t bins = 20);

}  // namespace trajlink

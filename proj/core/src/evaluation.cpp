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

#include "trajlink/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace trajlink
{

double f_measure(double precision, double recall)
{
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

namespace
{

void refresh(EvalReport & r)
{
  const double tp = static_cast<double>(r.true_positives);
  const double predicted = tp + static_cast<double>(r.false_positives);
  const double actual = tp + static_cast<double>(r.false_negatives);
  r.precision = predicted > 0.0 ? tp / predicted : 0.0;
  r.recall = actual > 0.0 ? tp / actual : 0.0;
  r.f_measure = f_measure(r.precision, r.recall);
}

}  // namespace

EvalReport evaluate(
  std::span<const MatchResult> predictions, std::span<const std::pair<TrackId, TrackId>> truth,
  std::span<const TrackId> known_ids)
{
  const std::set<TrackId> known(known_ids.begin(), known_ids.end());
  auto check = [&](TrackId id) {
    if (!known.empty() && !known.count(id)) {
      throw DataError("unknown sub-trajectory id " + std::to_string(id));
    }
  };
  std::set<std::pair<TrackId, TrackId>> truth_set;
  for (const auto & p : truth) {
    check(p.first);
    check(p.second);
    truth_set.insert(p);
  }
  EvalReport report;
  std::set<std::pair<TrackId, TrackId>> seen;
  for (const auto & result : predictions) {
    for (const auto & pair : result.pairs) {
      check(pair.u);
      check(pair.v);
      if (!seen.insert({pair.u, pair.v}).second) {
        continue;
      }
      if (truth_set.count({pair.u, pair.v})) {
        ++report.true_positives;
        report.correct_affinities.push_back(pair.affinity);
      } else {
        ++report.false_positives;
        report.wrong_affinities.push_back(pair.affinity);
      }
    }
  }
  report.false_negatives = truth_set.size() - report.true_positives;
  refresh(report);
  return report;
}

void accumulate(EvalReport & total, const EvalReport & part)
{
  total.true_positives += part.true_positives;
  total.false_positives += part.false_positives;
  total.false_negatives += part.false_negatives;
  total.correct_affinities.insert(
    total.correct_affinities.end(), part.correct_affinities.begin(), part.correct_affinities.end());
  total.wrong_affinities.insert(
    total.wrong_affinities.end(), part.wrong_affinities.begin(), part.wrong_affinities.end());
  refresh(total);
}

double roc_auc(std::span<const double> positives, std::span<const double> negatives)
{
  if (positives.empty() || negatives.empty()) {
    throw std::invalid_argument("AUC needs positive and negative scores");
  }
  // Rank-sum form with average ranks for ties.
  std::vector<std::pair<double, int>> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) {
    all.emplace_back(s, 1);
  }
  for (double s : negatives) {
    all.emplace_back(s, 0);
  }
  std::sort(all.begin(), all.end());
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) {
      ++j;
    }
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].second == 1) {
        rank_sum += avg_rank;
      }
    }
    i = j;
  }
  const double np = static_cast<double>(positives.size());
  const double nn = static_cast<double>(negatives.size());
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::vector<RocPoint> roc_curve(std::span<const double> positives, std::span<const double> negatives)
{
  std::vector<std::pair<double, int>> all;
  for (double s : positives) {
    all.emplace_back(s, 1);
  }
  for (double s : negatives) {
    all.emplace_back(s, 0);
  }
  std::sort(all.begin(), all.end(), [](const auto & a, const auto & b) { return a.first > b.first; });
  const double np = std::max<double>(1.0, static_cast<double>(positives.size()));
  const double nn = std::max<double>(1.0, static_cast<double>(negatives.size()));
  std::vector<RocPoint> curve{{0.0, 0.0}};
  double tp = 0.0;
  double fp = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    const double score = all[i].first;
    while (i < all.size() && all[i].first == score) {
      (all[i].second ? tp : fp) += 1.0;
      ++i;
    }
    curve.push_back({fp / nn, tp / np});
  }
  return curve;
}

AffinityHistogram affinity_histogram(const EvalReport & report, std::size_t bins)
{
  if (bins == 0) {
    throw std::invalid_argument("histogram needs at least one bin");
  }
  AffinityHistogram h;
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges.push_back(static_cast<double>(i) / static_cast<double>(bins));
  }
  h.correct.assign(bins, 0);
  h.wrong.assign(bins, 0);
  auto bin_of = [&](double v) {
    const auto b = static_cast<std::size_t>(std::floor(std::clamp(v, 0.0, 1.0) * static_cast<double>(bins)));
    return std::min(b, bins - 1);
  };
  for (double v : report.correct_affinities) {
    ++h.correct[bin_of(v)];
  }
  for (double v : report.wrong_affinities) {
    ++h.wrong[bin_of(v)];
  }
  return h;
}

}  // namespace trajlink

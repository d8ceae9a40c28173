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
#include <limits>
#include <span>
#include <vector>

#include "trajlink/embedding.hpp"
#include "trajlink/spatiotemporal.hpp"
#include "trajlink/types.hpp"

namespace trajlink
{

enum class P1Mode
{
  FisherVector,
  Height
};

namespace factor
{
inline constexpr unsigned kP1 = 1U;
inline constexpr unsigned kP2 = 2U;
inline constexpr unsigned kP3 = 4U;
inline constexpr unsigned kAll = kP1 | kP2 | kP3;
}  // namespace factor

struct MatcherConfig
{
  double tau_nomatch = 0.05;
  P1Mode p1_mode = P1Mode::FisherVector;
  double sigma_h = 0.05;
  unsigned factors = factor::kAll;  // disabled factors evaluate to 1
  std::size_t online_count = 16;
  double online_window = 300.0;
  double max_wait = 300.0;
};

/// What the matcher needs to know about a sub-trajectory.
struct MatchNode
{
  TrackId id{0};
  SensorId sensor_id{0};
  double t_start{0.0};
  double t_end{0.0};
  GateId start_gate{kUnknownGate};
  GateId end_gate{kUnknownGate};
  Signature signature;
};

MatchNode make_node(const SubTrajectory & tr, const AppearanceModel * model);

struct AffinityTerms
{
  double p1{1.0};
  double p2{1.0};
  double p3{1.0};

  double product() const { return p1 * p2 * p3; }
};

/// P1 between two signatures; 1 when the needed signature part is missing.
double p1_signature(const Signature & a, const Signature & b, const MatcherConfig & config);

/// Factors of the affinity of u followed by v. Throws DataError("non-causal
/// pair") unless u ends before v starts.
AffinityTerms affinity_terms(
  const MatchNode & u, const MatchNode & v, const SpatioTemporalModel & model,
  const MatcherConfig & config);

double affinity(
  const MatchNode & u, const MatchNode & v, const SpatioTemporalModel & model,
  const MatcherConfig & config);

struct AffinityEdge
{
  std::size_t u;  // index into v1
  std::size_t v;  // index into v2
  double weight;
};

/// Bipartite graph of predecessors V1 and successors V2 (ids ascending).
/// Each real node also has a private dummy partner of weight tau.
struct AffinityGraph
{
  std::vector<TrackId> v1;
  std::vector<TrackId> v2;
  std::vector<AffinityEdge> edges;
  double tau{0.05};
  std::vector<TrackId> nodes;  // every node of the window, ids ascending
};

AffinityGraph build_graph(
  std::span<const MatchNode> nodes, const SpatioTemporalModel & model, const MatcherConfig & config);

struct MatchedPair
{
  TrackId u{0};
  TrackId v{0};
  double affinity{0.0};

  bool operator==(const MatchedPair &) const = default;
};

struct MatchResult
{
  std::int64_t window_id{0};
  std::vector<MatchedPair> pairs;           // sorted by u
  std::vector<TrackId> terminals;           // nodes without successor, ascending
  std::vector<std::vector<TrackId>> sequences;

  bool operator==(const MatchResult &) const = default;
};

/// Maximum-weight matching on the dummy-padded graph. Pairs whose weight does
/// not exceed tau become terminals. Among optimal matchings the one that is
/// lexicographically smallest in (u, v) order is chosen.
MatchResult solve_matching(const AffinityGraph & graph);

/// Chains of ids linked by pairs, each starting at a node without predecessor.
std::vector<std::vector<TrackId>> assemble_sequences(
  std::span<const TrackId> nodes, std::span<const MatchedPair> pairs);

/// Windowed matching over a stream ordered by t_end.
class OnlineMatcher
{
public:
  OnlineMatcher(SpatioTemporalModel model, MatcherConfig config);

  /// Buffers one node; returns the results of any solve it triggered.
  std::vector<MatchResult> push(MatchNode node);
  /// Solves the remaining buffer and emits everything left as terminals.
  std::vector<MatchResult> flush();

  /// Replaces the spatio-temporal model used by later solves.
  void set_model(SpatioTemporalModel model) { model_ = std::move(model); }
  std::size_t buffered() const { return buffer_.size(); }

private:
  struct Entry
  {
    MatchNode node;
    bool can_precede{true};
    bool can_follow{true};
  };

  MatchResult solve(bool final_pass);

  SpatioTemporalModel model_;
  MatcherConfig config_;
  std::vector<Entry> buffer_;
  std::size_t arrivals_since_solve_{0};
  double window_start_{std::numeric_limits<double>::quiet_NaN()};
  double now_{-std::numeric_limits<double>::infinity()};
  std::int64_t next_window_{0};
};

}  // namespace trajlink

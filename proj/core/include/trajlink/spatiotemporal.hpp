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
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "trajlink/types.hpp"

namespace trajlink
{

/// Gate-to-gate transition counts Q(from, to).
struct TransitionMatrix
{
  Eigen::MatrixXd q;

  static TransitionMatrix uniform(std::size_t gate_count, double pseudo_count = 1.0);
  std::size_t gate_count() const { return static_cast<std::size_t>(q.rows()); }
};

/// Q(g1, g2) / sum_k Q(k, g2); 1/G when a gate is unknown or the column is empty.
double p2_spatial(GateId end_gate, GateId start_gate, const TransitionMatrix & q);

/// Adds one count per observed (from, to) pair.
TransitionMatrix update_spatial(
  const TransitionMatrix & q, std::span<const std::pair<GateId, GateId>> samples);

/// Inverse-gamma density over x > location.
struct InvGammaDensity
{
  double shape{3.0};
  double scale{1.0};
  double location{0.0};

  double log_pdf(double x) const;
  double pdf(double x) const;
  double mode() const { return location + scale / (shape + 1.0); }
  double mean() const;
  double variance() const;
};

/// Inverse-gamma with the given mode and variance (location 0).
InvGammaDensity invgamma_from_mode_variance(double mode, double variance);

enum class TravelMode
{
  Uniform,
  InvGamma
};

/// Travel-time state of one gate pair. Travel times are Normal(mu_tt, s2)
/// with s2 ~ InvGamma(a, b).
struct TravelTimePair
{
  TravelMode mode{TravelMode::Uniform};
  double a{3.0};
  double b{2.0};
  double mu_tt{0.0};
  std::size_t n{0};
  std::vector<double> buffer;  // samples held while still uniform
};

struct TravelTimeConfig
{
  double dt_max = 120.0;
  double prior_a = 3.0;
  double prior_b = 2.0;
  std::size_t n_min = 5;
};

class TravelTimeModel
{
public:
  TravelTimeModel() = default;
  explicit TravelTimeModel(TravelTimeConfig config) : config_(config) {}

  const TravelTimeConfig & config() const { return config_; }
  /// State of (from, to); a fresh uniform prior when never updated.
  TravelTimePair pair(GateId from, GateId to) const;
  const std::map<std::pair<GateId, GateId>, TravelTimePair> & pairs() const { return pairs_; }
  void set_pair(GateId from, GateId to, TravelTimePair state) { pairs_[{from, to}] = std::move(state); }

  /// Reported travel-time density of an INVGAMMA pair: the predictive
  /// variance b/(a-1) around mode mu_tt.
  InvGammaDensity density(const TravelTimePair & state) const;

private:
  TravelTimeConfig config_;
  std::map<std::pair<GateId, GateId>, TravelTimePair> pairs_;
};

/// Density at dt divided by the density at its mode, in [0, 1].
/// Throws DataError("non-causal pair") for dt <= 0.
double p3_temporal(double dt, const TravelTimeModel & model, GateId from, GateId to);

/// Conjugate update of one pair's state with new samples.
TravelTimePair update_pair(const TravelTimePair & state, std::span<const double> samples, const TravelTimeConfig & config);

TravelTimeModel update_temporal(
  const TravelTimeModel & model, GateId from, GateId to, std::span<const double> samples);

enum class GateEventKind
{
  Entry,
  Exit
};

struct GateEvent
{
  double t{0.0};
  GateId gate{kUnknownGate};
  TrackId track{0};
  GateEventKind kind{GateEventKind::Entry};
};

/// Entry events at t_start and exit events at t_end for known gates, sorted.
std::vector<GateEvent> gate_events(std::span<const SubTrajectory> trajectories);

struct HighConfidenceTransition
{
  GateId from{kUnknownGate};
  GateId to{kUnknownGate};
  double dt{0.0};
  TrackId from_track{0};
  TrackId to_track{0};
};

/// Unambiguous transits: an exit immediately followed by another track's
/// entry within `window`, with no other event in between and nobody else
/// pending in a blank region (an exit in the preceding window without a
/// matching entry).
std::vector<HighConfidenceTransition> detect_high_confidence(
  std::span<const GateEvent> events, double window);

/// Spatio-temporal model bundle.
struct SpatioTemporalModel
{
  TransitionMatrix q;
  TravelTimeModel travel;
};

SpatioTemporalModel initial_model(std::size_t gate_count, const TravelTimeConfig & config = {});

/// Applies a batch of high-confidence transitions to Q and the travel-time model.
SpatioTemporalModel apply_updates(
  const SpatioTemporalModel & model, std::span<const HighConfidenceTransition> transitions);

}  // namespace trajlink

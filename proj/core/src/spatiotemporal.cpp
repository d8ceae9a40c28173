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

#include "trajlink/spatiotemporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace trajlink
{

TransitionMatrix TransitionMatrix::uniform(std::size_t gate_count, double pseudo_count)
{
  if (pseudo_count < 0.0) {
    throw std::invalid_argument("pseudo counts must be non-negative");
  }
  const auto g = static_cast<Eigen::Index>(gate_count);
  return TransitionMatrix{Eigen::MatrixXd::Constant(g, g, pseudo_count)};
}

namespace
{

bool valid_gate(GateId g, std::size_t gate_count)
{
  return g >= 0 && static_cast<std::size_t>(g) < gate_count;
}

}  // namespace

double p2_spatial(GateId end_gate, GateId start_gate, const TransitionMatrix & q)
{
  const std::size_t g = q.gate_count();
  if (g == 0) {
    return 1.0;
  }
  const double fallback = 1.0 / static_cast<double>(g);
  if (!valid_gate(end_gate, g) || !valid_gate(start_gate, g)) {
    return fallback;
  }
  const double column = q.q.col(start_gate).sum();
  if (!(column > 0.0)) {
    return fallback;
  }
  return std::clamp(q.q(end_gate, start_gate) / column, 0.0, 1.0);
}

TransitionMatrix update_spatial(
  const TransitionMatrix & q, std::span<const std::pair<GateId, GateId>> samples)
{
  TransitionMatrix out = q;
  for (const auto & [from, to] : samples) {
    if (!valid_gate(from, q.gate_count()) || !valid_gate(to, q.gate_count())) {
      throw DataError("transition sample references an unknown gate");
    }
    out.q(from, to) += 1.0;
  }
  return out;
}

double InvGammaDensity::log_pdf(double x) const
{
  const double y = x - location;
  if (!(y > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(y) - scale / y;
}

double InvGammaDensity::pdf(double x) const
{
  return std::exp(log_pdf(x));
}

double InvGammaDensity::mean() const
{
  return shape > 1.0 ? location + scale / (shape - 1.0) : std::numeric_limits<double>::infinity();
}

double InvGammaDensity::variance() const
{
  if (!(shape > 2.0)) {
    return std::numeric_limits<double>::infinity();
  }
  const double d = shape - 1.0;
  return scale * scale / (d * d * (shape - 2.0));
}

InvGammaDensity invgamma_from_mode_variance(double mode, double variance)
{
  if (!(mode > 0.0) || !(variance > 0.0)) {
    throw std::invalid_argument("inverse-gamma mode and variance must be positive");
  }
  // variance / mode^2 = (s + 1)^2 / ((s - 1)^2 (s - 2)), decreasing in s > 2.
  const double target = variance / (mode * mode);
  auto ratio = [](double s) { return (s + 1.0) * (s + 1.0) / ((s - 1.0) * (s - 1.0) * (s - 2.0)); };
  double lo = 2.0;
  double hi = 4.0;
  while (ratio(hi) > target && hi < 1e12) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double shape = 0.5 * (lo + hi);
  return InvGammaDensity{shape, mode * (shape + 1.0), 0.0};
}

TravelTimePair TravelTimeModel::pair(GateId from, GateId to) const
{
  const auto it = pairs_.find({from, to});
  if (it != pairs_.end()) {
    return it->second;
  }
  TravelTimePair fresh;
  fresh.a = config_.prior_a;
  fresh.b = config_.prior_b;
  return fresh;
}

InvGammaDensity TravelTimeModel::density(const TravelTimePair & state) const
{
  if (!(state.a > 1.0)) {
    throw DataError("travel-time shape must exceed 1 for a finite variance");
  }
  return invgamma_from_mode_variance(state.mu_tt, state.b / (state.a - 1.0));
}

double p3_temporal(double dt, const TravelTimeModel & model, GateId from, GateId to)
{
  if (!(dt > 0.0)) {
    throw DataError("non-causal pair");
  }
  const TravelTimePair state = model.pair(from, to);
  if (state.mode == TravelMode::Uniform) {
    return dt <= model.config().dt_max ? 1.0 : 0.0;
  }
  const InvGammaDensity d = model.density(state);
  const double value = std::exp(d.log_pdf(dt) - d.log_pdf(d.mode()));
  return std::clamp(value, 0.0, 1.0);
}

TravelTimePair update_pair(
  const TravelTimePair & state, std::span<const double> samples, const TravelTimeConfig & config)
{
  for (double x : samples) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw DataError("travel-time samples must be positive and finite");
    }
  }
  TravelTimePair out = state;
  std::vector<double> batch;
  if (out.mode == TravelMode::Uniform) {
    out.buffer.insert(out.buffer.end(), samples.begin(), samples.end());
    if (out.buffer.size() < std::max<std::size_t>(config.n_min, 1)) {
      return out;
    }
    batch = std::move(out.buffer);
    out.buffer.clear();
    out.mode = TravelMode::InvGamma;
  } else {
    batch.assign(samples.begin(), samples.end());
  }
  if (batch.empty()) {
    return out;
  }
  double sum = 0.0;
  for (double x : batch) {
    sum += x;
  }
  const double total = out.mu_tt * static_cast<double>(out.n) + sum;
  out.n += batch.size();
  out.mu_tt = total / static_cast<double>(out.n);
  double ss = 0.0;
  for (double x : batch) {
    ss += (x - out.mu_tt) * (x - out.mu_tt);
  }
  out.a += static_cast<double>(batch.size()) / 2.0;
  out.b += ss / 2.0;
  return out;
}

TravelTimeModel update_temporal(
  const TravelTimeModel & model, GateId from, GateId to, std::span<const double> samples)
{
  TravelTimeModel out = model;
  out.set_pair(from, to, update_pair(model.pair(from, to), samples, model.config()));
  return out;
}

std::vector<GateEvent> gate_events(std::span<const SubTrajectory> trajectories)
{
  std::vector<GateEvent> events;
  for (const auto & tr : trajectories) {
    if (tr.start_gate != kUnknownGate) {
      events.push_back({tr.t_start, tr.start_gate, tr.id, GateEventKind::Entry});
    }
    if (tr.end_gate != kUnknownGate) {
      events.push_back({tr.t_end, tr.end_gate, tr.id, GateEventKind::Exit});
    }
  }
  std::sort(events.begin(), events.end(), [](const GateEvent & a, const GateEvent & b) {
    if (a.t != b.t) {
      return a.t < b.t;
    }
    if (a.kind != b.kind) {
      return a.kind < b.kind;
    }
    if (a.track != b.track) {
      return a.track < b.track;
    }
    return a.gate < b.gate;
  });
  return events;
}

std::vector<HighConfidenceTransition> detect_high_confidence(
  std::span<const GateEvent> events, double window)
{
  std::vector<HighConfidenceTransition> out;
  const std::size_t n = events.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const GateEvent & u = events[i];
    const GateEvent & v = events[i + 1];
    if (u.kind != GateEventKind::Exit || v.kind != GateEventKind::Entry || u.track == v.track) {
      continue;
    }
    if (u.gate == kUnknownGate || v.gate == kUnknownGate) {
      continue;
    }
    const double dt = v.t - u.t;
    if (!(dt > 0.0) || dt > window) {
      continue;
    }
    if (i > 0 && events[i - 1].t == u.t) {
      continue;
    }
    if (i + 2 < n && events[i + 2].t == v.t) {
      continue;
    }
    // Anyone who left through a gate recently and has not reappeared is
    // still somewhere in a blank region.
    int pending = 0;
    for (std::size_t k = 0; k < i; ++k) {
      if (events[k].t < u.t - window) {
        continue;
      }
      pending += events[k].kind == GateEventKind::Exit ? 1 : -1;
      pending = std::max(pending, 0);
    }
    if (pending > 0) {
      continue;
    }
    out.push_back({u.gate, v.gate, dt, u.track, v.track});
  }
  return out;
}

SpatioTemporalModel initial_model(std::size_t gate_count, const TravelTimeConfig & config)
{
  return SpatioTemporalModel{TransitionMatrix::uniform(gate_count), TravelTimeModel(config)};
}

SpatioTemporalModel apply_updates(
  const SpatioTemporalModel & model, std::span<const HighConfidenceTransition> transitions)
{
  SpatioTemporalModel out = model;
  std::vector<std::pair<GateId, GateId>> spatial;
  std::map<std::pair<GateId, GateId>, std::vector<double>> temporal;
  for (const auto & tr : transitions) {
    spatial.emplace_back(tr.from, tr.to);
    temporal[{tr.from, tr.to}].push_back(tr.dt);
  }
  out.q = update_spatial(model.q, spatial);
  for (const auto & [key, samples] : temporal) {
    out.travel = update_temporal(out.travel, key.first, key.second, samples);
  }
  return out;
}

}  // namespace trajlink

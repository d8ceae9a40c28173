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

#include "trajlink/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <Eigen/Core>

#include "trajlink/assignment.hpp"

namespace trajlink
{

MatchNode make_node(const SubTrajectory & tr, const AppearanceModel * model)
{
  MatchNode node;
  node.id = tr.id;
  node.sensor_id = tr.sensor_id;
  node.t_start = tr.t_start;
  node.t_end = tr.t_end;
  node.start_gate = tr.start_gate;
  node.end_gate = tr.end_gate;
  node.signature = make_signature(tr, model);
  return node;
}

double p1_signature(const Signature & a, const Signature & b, const MatcherConfig & config)
{
  if (config.p1_mode == P1Mode::Height) {
    if (!a.height || !b.height) {
      return 1.0;
    }
    return p1_height_value(*a.height, *b.height, config.sigma_h);
  }
  if (!a.embedding || !b.embedding) {
    return 1.0;
  }
  return p1_from_embeddings(*a.embedding, *b.embedding);
}

AffinityTerms affinity_terms(
  const MatchNode & u, const MatchNode & v, const SpatioTemporalModel & model,
  const MatcherConfig & config)
{
  if (!(u.t_end < v.t_start)) {
    throw DataError("non-causal pair");
  }
  AffinityTerms terms;
  if (config.factors & factor::kP1) {
    terms.p1 = p1_signature(u.signature, v.signature, config);
  }
  if (config.factors & factor::kP2) {
    terms.p2 = p2_spatial(u.end_gate, v.start_gate, model.q);
  }
  if (config.factors & factor::kP3) {
    terms.p3 = p3_temporal(v.t_start - u.t_end, model.travel, u.end_gate, v.start_gate);
  }
  return terms;
}

double affinity(
  const MatchNode & u, const MatchNode & v, const SpatioTemporalModel & model,
  const MatcherConfig & config)
{
  return std::clamp(affinity_terms(u, v, model, config).product(), 0.0, 1.0);
}

namespace
{

AffinityGraph build_graph_roles(
  std::vector<const MatchNode *> nodes, const std::vector<char> & can_precede,
  const std::vector<char> & can_follow, const SpatioTemporalModel & model,
  const MatcherConfig & config)
{
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nodes[a]->id < nodes[b]->id;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (nodes[order[k]]->id == nodes[order[k - 1]]->id) {
      throw DataError("duplicate sub-trajectory id " + std::to_string(nodes[order[k]]->id));
    }
  }

  AffinityGraph graph;
  graph.tau = config.tau_nomatch;
  std::vector<char> in_v1(nodes.size(), 0);
  std::vector<char> in_v2(nodes.size(), 0);
  for (std::size_t i : order) {
    graph.nodes.push_back(nodes[i]->id);
    for (std::size_t j : order) {
      if (can_precede[i] && can_follow[j] && nodes[i]->t_end < nodes[j]->t_start) {
        in_v1[i] = 1;
        in_v2[j] = 1;
      }
    }
  }
  std::vector<std::size_t> v1_index(nodes.size());
  std::vector<std::size_t> v2_index(nodes.size());
  for (std::size_t i : order) {
    if (in_v1[i]) {
      v1_index[i] = graph.v1.size();
      graph.v1.push_back(nodes[i]->id);
    }
    if (in_v2[i]) {
      v2_index[i] = graph.v2.size();
      graph.v2.push_back(nodes[i]->id);
    }
  }
  for (std::size_t i : order) {
    if (!in_v1[i]) {
      continue;
    }
    for (std::size_t j : order) {
      if (in_v2[j] && can_follow[j] && nodes[i]->t_end < nodes[j]->t_start) {
        graph.edges.push_back({v1_index[i], v2_index[j], affinity(*nodes[i], *nodes[j], model, config)});
      }
    }
  }
  return graph;
}

}  // namespace

AffinityGraph build_graph(
  std::span<const MatchNode> nodes, const SpatioTemporalModel & model, const MatcherConfig & config)
{
  std::vector<const MatchNode *> ptrs;
  for (const auto & n : nodes) {
    ptrs.push_back(&n);
  }
  const std::vector<char> all(nodes.size(), 1);
  return build_graph_roles(std::move(ptrs), all, all, model, config);
}

std::vector<std::vector<TrackId>> assemble_sequences(
  std::span<const TrackId> nodes, std::span<const MatchedPair> pairs)
{
  std::map<TrackId, TrackId> next;
  std::set<TrackId> has_pred;
  for (const auto & p : pairs) {
    next[p.u] = p.v;
    has_pred.insert(p.v);
  }
  std::vector<TrackId> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<TrackId>> out;
  for (TrackId id : sorted) {
    if (has_pred.count(id)) {
      continue;
    }
    std::vector<TrackId> chain{id};
    for (auto it = next.find(id); it != next.end(); it = next.find(it->second)) {
      chain.push_back(it->second);
    }
    out.push_back(std::move(chain));
  }
  return out;
}

MatchResult solve_matching(const AffinityGraph & graph)
{
  MatchResult result;
  const std::size_t n1 = graph.v1.size();
  const std::size_t n2 = graph.v2.size();
  const std::size_t n = n1 + n2;
  std::vector<MatchedPair> pairs;
  if (n1 > 0 && n2 > 0) {
    // Rows: V1 then one dummy per V2 node. Columns: V2 then one dummy per V1
    // node. Dummy edges weigh tau; minimizing 1 - w maximizes total weight.
    const double forbidden = static_cast<double>(n) + 1.0;
    const double dummy_cost = 1.0 - graph.tau;
    const auto sn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(sn, sn, forbidden);
    Eigen::MatrixXd weight = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2), -1.0);
    for (const auto & e : graph.edges) {
      const auto u = static_cast<Eigen::Index>(e.u);
      const auto v = static_cast<Eigen::Index>(e.v);
      cost(u, v) = 1.0 - e.weight;
      weight(u, v) = e.weight;
    }
    for (std::size_t u = 0; u < n1; ++u) {
      cost(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(n2 + u)) = dummy_cost;
    }
    for (std::size_t v = 0; v < n2; ++v) {
      const auto row = static_cast<Eigen::Index>(n1 + v);
      cost(row, static_cast<Eigen::Index>(v)) = dummy_cost;
      for (std::size_t u = 0; u < n1; ++u) {
        cost(row, static_cast<Eigen::Index>(n2 + u)) = dummy_cost;
      }
    }
    const Assignment assignment = solve_assignment(cost);
    for (std::size_t u = 0; u < n1; ++u) {
      const int col = assignment.row_to_col[u];
      if (col < 0 || static_cast<std::size_t>(col) >= n2) {
        continue;
      }
      const double w = weight(static_cast<Eigen::Index>(u), col);
      if (w > graph.tau) {
        pairs.push_back({graph.v1[u], graph.v2[static_cast<std::size_t>(col)], w});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchedPair & a, const MatchedPair & b) { return a.u < b.u; });
  std::set<TrackId> has_succ;
  for (const auto & p : pairs) {
    has_succ.insert(p.u);
  }
  for (TrackId id : graph.nodes) {
    if (!has_succ.count(id)) {
      result.terminals.push_back(id);
    }
  }
  std::sort(result.terminals.begin(), result.terminals.end());
  result.sequences = assemble_sequences(graph.nodes, pairs);
  result.pairs = std::move(pairs);
  return result;
}

OnlineMatcher::OnlineMatcher(SpatioTemporalModel model, MatcherConfig config)
: model_(std::move(model)), config_(config)
{
}

std::vector<MatchResult> OnlineMatcher::push(MatchNode node)
{
  if (node.t_end < now_) {
    throw DataError("stream is not ordered by t_end");
  }
  now_ = node.t_end;
  if (std::isnan(window_start_)) {
    window_start_ = now_;
  }
  buffer_.push_back({std::move(node), true, true});
  ++arrivals_since_solve_;
  std::vector<MatchResult> out;
  if (arrivals_since_solve_ >= std::max<std::size_t>(config_.online_count, 1) ||
      now_ - window_start_ >= config_.online_window)
  {
    MatchResult r = solve(false);
    if (!r.pairs.empty() || !r.terminals.empty()) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<MatchResult> OnlineMatcher::flush()
{
  std::vector<MatchResult> out;
  if (buffer_.empty()) {
    return out;
  }
  MatchResult r = solve(true);
  if (!r.pairs.empty() || !r.terminals.empty()) {
    out.push_back(std::move(r));
  }
  return out;
}

MatchResult OnlineMatcher::solve(bool final_pass)
{
  std::vector<const MatchNode *> nodes;
  std::vector<char> can_precede;
  std::vector<char> can_follow;
  for (const auto & e : buffer_) {
    nodes.push_back(&e.node);
    can_precede.push_back(e.can_precede ? 1 : 0);
    can_follow.push_back(e.can_follow ? 1 : 0);
  }
  const AffinityGraph graph = build_graph_roles(nodes, can_precede, can_follow, model_, config_);
  MatchResult solved = solve_matching(graph);

  std::map<TrackId, std::size_t> index;
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    index[buffer_[i].node.id] = i;
  }
  std::vector<char> got_successor(buffer_.size(), 0);
  for (const auto & p : solved.pairs) {
    got_successor[index.at(p.u)] = 1;
    buffer_[index.at(p.v)].can_follow = false;
  }

  MatchResult result;
  result.pairs = solved.pairs;
  std::vector<Entry> kept;
  std::vector<TrackId> window_nodes;
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    Entry & e = buffer_[i];
    window_nodes.push_back(e.node.id);
    if (got_successor[i]) {
      continue;
    }
    const bool expired = now_ - e.node.t_end > config_.max_wait;
    if (final_pass || expired) {
      result.terminals.push_back(e.node.id);
      continue;
    }
    kept.push_back(std::move(e));
  }
  buffer_ = std::move(kept);
  std::sort(result.terminals.begin(), result.terminals.end());
  result.sequences = assemble_sequences(window_nodes, result.pairs);
  arrivals_since_solve_ = 0;
  window_start_ = std::numeric_limits<double>::quiet_NaN();
  if (!result.pairs.empty() || !result.terminals.empty()) {
    result.window_id = next_window_++;
  }
  return result;
}

}  // namespace trajlink

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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "trajlink/embedding.hpp"
#include "trajlink/experiments.hpp"
#include "trajlink/fisher_vector.hpp"
#include "trajlink/matcher.hpp"
#include "trajlink/spatiotemporal.hpp"

namespace
{

using namespace trajlink;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string & what, const std::string & detail)
{
  std::printf("criterion %2d: %s  %s (%s)\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) {
    ++failures;
  }
}

std::string fmt(const char * f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void criterion_1()
{
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> side(1, 7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution present(0.7);
  int mismatches = 0;
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 500; ++trial) {
    AffinityGraph g;
    const int n1 = side(rng);
    const int n2 = side(rng);
    for (int i = 0; i < n1; ++i) {
      g.v1.push_back(i);
      g.nodes.push_back(i);
    }
    for (int j = 0; j < n2; ++j) {
      g.v2.push_back(100 + j);
      g.nodes.push_back(100 + j);
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(n1, n2, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        if (present(rng)) {
          // Quantized weights make ties between optima common.
          const double x = trial % 2 == 0 ? u(rng) : std::round(u(rng) * 8.0) / 8.0;
          g.edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), x});
          w(i, j) = x;
        }
      }
    }
    const MatchResult r = solve_matching(g);
    double total = 0.0;
    for (const auto & p : r.pairs) {
      total += p.affinity;
    }
    total += g.tau * static_cast<double>(n1 + n2 - static_cast<int>(r.pairs.size()));
    const double best = oracle::best_partial_injection(w, g.tau);
    const double err = std::abs(total - best);
    worst = std::max(worst, err);
    mismatches += err > 1e-12 ? 1 : 0;
  }
  const double elapsed = seconds_since(t0);
  report(
    1, mismatches == 0 && elapsed < 10.0, "optimal matching equals exhaustive search on 500 graphs",
    fmt("mismatches %.0f, max |diff| %.2e, %.2f s", mismatches, worst, elapsed));
}

void criterion_2()
{
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> count(1, 400);
  std::uniform_real_distribution<double> xy(-0.4, 0.4);
  std::uniform_real_distribution<double> z(0.0, 1.9);
  const GmmGrid grid = GmmGrid::regular();
  int perm_fail = 0;
  int shape_fail = 0;
  double worst_dup = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    HumanSegment seg;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      seg.points.push_back({3.0 + xy(rng), -1.0 + xy(rng), z(rng)});
    }
    const FeatureMatrix a = fisher_vector(seg, grid);
    HumanSegment shuffled = seg;
    std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
    const FeatureMatrix b = fisher_vector(shuffled, grid);
    HumanSegment doubled = seg;
    doubled.points.insert(doubled.points.end(), seg.points.begin(), seg.points.end());
    const FeatureMatrix c = fisher_vector(doubled, grid);
    perm_fail += a == b ? 0 : 1;
    for (const auto * m : {&a, &b, &c}) {
      shape_fail += (m->rows() == 20 && m->cols() == 54) ? 0 : 1;
    }
    for (std::size_t i = 0; i < a.flat().size(); ++i) {
      const double denom = std::max(std::abs(a.flat()[i]), std::numeric_limits<double>::min());
      const double rel = a.flat()[i] == c.flat()[i] ? 0.0 : std::abs(a.flat()[i] - c.flat()[i]) / denom;
      worst_dup = std::max(worst_dup, rel);
    }
  }
  report(
    2, perm_fail == 0 && shape_fail == 0 && worst_dup <= 1e-12,
    "fisher vectors permutation/duplication invariant, shape 20x54",
    fmt("permutation mismatches %.0f, max duplication rel %.2e, bad shapes %.0f", perm_fail, worst_dup, shape_fail));
}

void criterion_3()
{
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g(0.0, 1.0);
  const TrainConfig defaults;
  EmbeddingNet net(defaults.layer_sizes, 17);
  const int dim = static_cast<int>(net.input_dim());
  Eigen::MatrixXd inputs(dim, 12);
  for (Eigen::Index i = 0; i < inputs.size(); ++i) {
    inputs.data()[i] = g(rng);
  }
  std::vector<TripletIndex> triplets;
  for (std::size_t k = 0; k < 12; ++k) {
    triplets.push_back({k, (k + 1) % 12, (k + 5) % 12});
  }
  const double margin = defaults.margin;
  std::vector<double> grad;
  const double loss = triplet_batch_loss(net, inputs, triplets, margin, &grad);
  const std::vector<double> params = net.flatten_params();
  auto f = [&](const std::vector<double> & p) {
    EmbeddingNet probe = net;
    probe.set_params(p);
    return triplet_batch_loss(probe, inputs, triplets, margin, nullptr);
  };
  // Probe weights of every layer plus biases; half of the probes go to
  // parameters with a non-negligible gradient so the check is not vacuous.
  std::vector<std::size_t> strong;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (std::abs(grad[i]) > 1e-4) {
      strong.push_back(i);
    }
  }
  std::uniform_int_distribution<std::size_t> any(0, params.size() - 1);
  std::vector<std::size_t> probes;
  const std::size_t strong_probes = strong.empty() ? 0 : 60;
  for (std::size_t k = 0; k < strong_probes; ++k) {
    probes.push_back(strong[std::uniform_int_distribution<std::size_t>(0, strong.size() - 1)(rng)]);
  }
  while (probes.size() < 120) {
    probes.push_back(any(rng));
  }
  double worst = 0.0;
  int failed = 0;
  for (std::size_t i : probes) {
    const double fd = oracle::central_difference(f, params, i, 1e-5);
    const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
    const double rel = std::abs(grad[i] - fd) / scale;
    worst = std::max(worst, rel);
    failed += rel > 1e-4 ? 1 : 0;
  }
  report(
    3, failed == 0 && probes.size() >= 100, "triplet-loss gradients match central differences",
    fmt("%.0f probes (%.0f with |g|>1e-4), max rel %.2e, loss %.4f", static_cast<double>(probes.size()),
        static_cast<double>(strong_probes), worst, loss));
}

void criterion_4()
{
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> ua(2.2, 10.0);
  std::uniform_real_distribution<double> ub(0.5, 40.0);
  std::uniform_int_distribution<int> un(1, 40);
  std::uniform_real_distribution<double> umu(3.0, 60.0);
  std::uniform_real_distribution<double> usd(0.3, 8.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    TravelTimePair state;
    state.mode = TravelMode::InvGamma;
    state.a = ua(rng);
    state.b = ub(rng);
    std::normal_distribution<double> g(umu(rng), usd(rng));
    std::vector<double> x(static_cast<std::size_t>(un(rng)));
    for (double & v : x) {
      do {
        v = g(rng);
      } while (v <= 0.0);
    }
    const TravelTimePair post = update_pair(state, x, TravelTimeConfig{});
    const auto [mean, var] = oracle::grid_posterior_moments(state.a, state.b, x, post.mu_tt);
    const InvGammaDensity d{post.a, post.b, 0.0};
    worst = std::max(worst, std::abs(d.mean() - mean) / mean);
    worst = std::max(worst, std::abs(d.variance() - var) / var);
  }
  report(
    4, worst <= 1e-3, "conjugate travel-time posterior matches numerical integration",
    fmt("20 configurations, max rel moment error %.2e", worst));
}

double f_of(const ExperimentOutput & out, const std::string & tag)
{
  for (const auto & r : out.reports) {
    if (r.tag == tag) {
      return r.f_measure;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double f_at(const ExperimentOutput & out, const std::string & tag, double subjects)
{
  for (const auto & r : out.reports) {
    const auto it = r.params.find("subjects");
    if (r.tag == tag && it != r.params.end() && it->second == subjects) {
      return r.f_measure;
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void criteria_5_to_9()
{
  HarnessConfig cfg;
  ExperimentContext ctx(cfg);

  auto t0 = Clock::now();
  const ExperimentOutput c = run_experiment("exp1c", ctx);
  const double t_c = seconds_since(t0);
  const double p1 = f_of(c, "P1");
  const double p2 = f_of(c, "P2");
  const double p3 = f_of(c, "P3");
  const double prod = f_of(c, "product");
  report(
    5, prod >= std::max({p1, p2, p3}) - 0.02 && prod >= 0.85 && t_c < 300.0,
    "ablation: product >= best single factor - 0.02 and >= 0.85",
    fmt("F P1 %.3f, P2 %.3f, P3 %.3f", p1, p2, p3) + fmt(", product %.3f, %.1f s", prod, t_c));

  const ExperimentOutput pp = run_experiment("pre_post", ctx);
  const double pre = f_of(pp, "pre");
  const double post = f_of(pp, "post");
  report(
    6, post >= pre - 0.01 && post >= 0.85, "updates: post >= pre - 0.01 and post >= 0.85",
    fmt("F pre %.3f, post %.3f", pre, post));

  const ExperimentOutput a = run_experiment("exp1a", ctx);
  const double f4 = f_at(a, "pre", 4.0);
  const double f32 = f_at(a, "pre", 32.0);
  report(7, f32 < f4, "crowding: pre-update F at 32 subjects < F at 4", fmt("F(4) %.3f, F(32) %.3f", f4, f32));

  const double auc = ctx.training().auc;
  report(
    8, auc > 0.70, "held-out appearance AUC > 0.70",
    fmt("AUC %.4f over %.0f held-out segments", auc, static_cast<double>(ctx.training().holdout_samples)));

  t0 = Clock::now();
  const ExperimentOutput corridor = run_experiment("corridor", ctx);
  const double final_day = corridor.reports.empty() ? 0.0 : corridor.reports.back().f_measure;
  const double first_day = corridor.reports.empty() ? 0.0 : corridor.reports.front().f_measure;
  report(
    9, corridor.reports.size() == 5 && final_day >= 0.75, "sparse corridor: final-day F >= 0.75",
    fmt("%.0f days, day 1 F %.3f, final F %.3f, %.1f s", static_cast<double>(corridor.reports.size()), first_day,
        final_day, seconds_since(t0)));
}

void criterion_10()
{
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<GateId> gate(-1, 5);
  MatcherConfig fv;
  MatcherConfig height;
  height.p1_mode = P1Mode::Height;
  int outside = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    SpatioTemporalModel model = initial_model(5);
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = 0; j < 5; ++j) {
        model.q.q(i, j) = trial % 7 == 0 ? 0.0 : 10.0 * u(rng);
      }
    }
    TravelTimePair pair;
    pair.mode = TravelMode::InvGamma;
    pair.a = 1.5 + 10.0 * u(rng);
    pair.b = 0.1 + 50.0 * u(rng);
    pair.mu_tt = 0.5 + 60.0 * u(rng);
    MatchNode a;
    MatchNode b;
    a.id = 1;
    b.id = 2;
    a.t_start = 0.0;
    a.t_end = 5.0;
    b.t_start = a.t_end + 1e-3 + 200.0 * u(rng) * u(rng);
    b.t_end = b.t_start + 1.0;
    a.end_gate = gate(rng);
    b.start_gate = gate(rng);
    model.travel.set_pair(a.end_gate, b.start_gate, pair);
    a.signature.embedding = oracle::random_unit(rng, 64);
    b.signature.embedding = trial % 3 == 0 ? *a.signature.embedding : oracle::random_unit(rng, 64);
    if (trial % 5 == 0) {
      *b.signature.embedding = -*a.signature.embedding;
    }
    a.signature.height = 1.4 + 0.6 * u(rng);
    b.signature.height = 1.4 + 0.6 * u(rng);
    for (const auto * cfg : {&fv, &height}) {
      const AffinityTerms t = affinity_terms(a, b, model, *cfg);
      const double w = affinity(a, b, model, *cfg);
      for (double v : {t.p1, t.p2, t.p3, t.product(), w}) {
        outside += (v >= 0.0 && v <= 1.0) ? 0 : 1;
      }
    }
  }
  report(10, outside == 0, "P1, P2, P3 and affinity stay within [0, 1]", fmt("10000 draws, %.0f out of range", outside));
}

void criterion_11()
{
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> start(0.0, 400.0);
  std::uniform_real_distribution<double> len(1.0, 20.0);
  std::uniform_real_distribution<double> h(1.5, 1.9);
  std::uniform_int_distribution<GateId> gate(0, 3);
  std::uniform_int_distribution<int> count(0, 40);
  MatcherConfig cfg;
  cfg.p1_mode = P1Mode::Height;
  cfg.online_count = std::numeric_limits<std::size_t>::max();
  cfg.online_window = std::numeric_limits<double>::infinity();
  cfg.max_wait = std::numeric_limits<double>::infinity();
  int mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SpatioTemporalModel model = initial_model(4);
    std::vector<HighConfidenceTransition> seed_updates;
    for (int k = 0; k < 8; ++k) {
      seed_updates.push_back({gate(rng), gate(rng), 5.0 + 30.0 * h(rng) - 45.0, 0, 0});
    }
    for (auto & s : seed_updates) {
      s.dt = std::max(s.dt, 0.5);
    }
    model = apply_updates(model, seed_updates);
    std::vector<MatchNode> nodes(static_cast<std::size_t>(count(rng)));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto & n = nodes[i];
      n.id = static_cast<TrackId>(7 * i + 3);
      n.t_start = start(rng);
      n.t_end = n.t_start + len(rng);
      n.start_gate = gate(rng);
      n.end_gate = gate(rng);
      n.signature.height = h(rng);
    }
    std::sort(nodes.begin(), nodes.end(), [](const auto & x, const auto & y) { return x.t_end < y.t_end; });
    OnlineMatcher online(model, cfg);
    std::vector<MatchResult> out;
    for (const auto & n : nodes) {
      for (auto & r : online.push(n)) {
        out.push_back(std::move(r));
      }
    }
    for (auto & r : online.flush()) {
      out.push_back(std::move(r));
    }
    MatchResult batch = solve_matching(build_graph(nodes, model, cfg));
    const bool same = nodes.empty() ? out.empty() : (out.size() == 1 && out[0] == batch);
    mismatches += same ? 0 : 1;
  }
  report(11, mismatches == 0, "online matcher with a whole-stream window equals batch", fmt("50 streams, %.0f mismatches", mismatches));
}

}  // namespace

int main()
{
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_to_9();
    criterion_10();
    criterion_11();
  } catch (const std::exception & e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

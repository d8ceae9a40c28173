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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "trajlink/evaluation.hpp"
#include "trajlink/experiments.hpp"
#include "trajlink/io.hpp"

namespace trajlink
{
namespace
{

using Pairs = std::vector<std::pair<TrackId, TrackId>>;

MatchResult predicted(const Pairs & pairs)
{
  MatchResult r;
  for (const auto & [u, v] : pairs) {
    r.pairs.push_back({u, v, 0.5});
  }
  return r;
}

HarnessConfig cheap_config()
{
  HarnessConfig c;
  c.matcher.p1_mode = P1Mode::Height;
  c.subject_counts = {2, 4};
  c.intervals = {5.0, 10.0};
  c.base_subjects = 2;
  c.base_interval = 10.0;
  c.corridor_days = 1;
  c.traffic.rates_per_minute = {2.0};
  c.traffic.slot_seconds = 60.0;
  c.train_if_missing = false;
  return c;
}

std::filesystem::path scratch_dir(const std::string & name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("trajlink_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(Evaluate, Examples)
{
  const Pairs truth{{1, 2}, {3, 4}};
  const std::vector<MatchResult> perfect{predicted(truth)};
  EXPECT_DOUBLE_EQ(evaluate(perfect, truth).f_measure, 1.0);
  const std::vector<MatchResult> wrong{predicted({{1, 4}})};
  EXPECT_DOUBLE_EQ(evaluate(wrong, truth).f_measure, 0.0);
  const std::vector<MatchResult> half{predicted({{1, 2}, {3, 5}})};
  const auto r = evaluate(half, truth);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_EQ(r.correct_affinities.size(), 1U);
  EXPECT_EQ(r.wrong_affinities.size(), 1U);
  const Pairs five{{1, 2}, {2, 3}, {3, 4}, {5, 6}, {6, 7}};
  const std::vector<MatchResult> three{predicted({{1, 2}, {2, 3}, {3, 4}})};
  EXPECT_NEAR(evaluate(three, five).f_measure, 0.75, 1e-15);
  EXPECT_DOUBLE_EQ(evaluate({}, truth).f_measure, 0.0);
}

TEST(Evaluate, UnknownIdIsDataError)
{
  const Pairs truth{{1, 2}};
  const std::vector<TrackId> ids{1, 2};
  const std::vector<MatchResult> pred{predicted({{1, 9}})};
  EXPECT_THROW(evaluate(pred, truth, ids), DataError);
}

TEST(Evaluate, InvariantUnderRelabeling)
{
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<TrackId> id(0, 30);
  for (int trial = 0; trial < 50; ++trial) {
    Pairs truth;
    Pairs pred;
    for (int k = 0; k < 10; ++k) {
      truth.emplace_back(id(rng), id(rng));
      pred.emplace_back(id(rng), id(rng));
    }
    pred.push_back(truth.front());
    auto relabel = [](Pairs p) {
      for (auto & [u, v] : p) {
        u = 1000 - 3 * u;
        v = 1000 - 3 * v;
      }
      return p;
    };
    const std::vector<MatchResult> a{predicted(pred)};
    const std::vector<MatchResult> b{predicted(relabel(pred))};
    const auto ra = evaluate(a, truth);
    const auto rb = evaluate(b, relabel(truth));
    EXPECT_EQ(ra.true_positives, rb.true_positives);
    EXPECT_DOUBLE_EQ(ra.f_measure, rb.f_measure);
    EXPECT_GE(ra.f_measure, 0.0);
    EXPECT_LE(ra.f_measure, 1.0);
  }
}

TEST(Evaluate, AddingCorrectPairNeverLowersRecall)
{
  const Pairs truth{{1, 2}, {2, 3}, {3, 4}, {4, 5}};
  Pairs pred{{1, 3}};
  double last = 0.0;
  for (const auto & p : truth) {
    pred.push_back(p);
    const std::vector<MatchResult> r{predicted(pred)};
    const double recall = evaluate(r, truth).recall;
    EXPECT_GE(recall, last);
    last = recall;
  }
  EXPECT_DOUBLE_EQ(last, 1.0);
}

TEST(Evaluate, AccumulateSumsCounts)
{
  const Pairs truth{{1, 2}, {3, 4}};
  const std::vector<MatchResult> a{predicted({{1, 2}})};
  const std::vector<MatchResult> b{predicted({{3, 5}})};
  EvalReport total;
  accumulate(total, evaluate(a, truth));
  accumulate(total, evaluate(b, truth));
  EXPECT_EQ(total.true_positives, 1U);
  EXPECT_EQ(total.false_positives, 1U);
  EXPECT_EQ(total.false_negatives, 3U);
  EXPECT_DOUBLE_EQ(total.precision, 0.5);
  EXPECT_DOUBLE_EQ(total.recall, 0.25);
}

TEST(Roc, AucExamples)
{
  const std::vector<double> hi{0.9, 0.8};
  const std::vector<double> lo{0.1, 0.2};
  EXPECT_DOUBLE_EQ(roc_auc(hi, lo), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(lo, hi), 0.0);
  const std::vector<double> mid{0.5};
  EXPECT_DOUBLE_EQ(roc_auc(mid, mid), 0.5);
  EXPECT_THROW(roc_auc({}, lo), std::invalid_argument);
}

TEST(Roc, AucMatchesPairCount)
{
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> u(0, 10);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> pos(15);
    std::vector<double> neg(12);
    for (double & v : pos) {
      v = u(rng) / 10.0;
    }
    for (double & v : neg) {
      v = u(rng) / 12.0;
    }
    double wins = 0.0;
    for (double p : pos) {
      for (double n : neg) {
        wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
      }
    }
    EXPECT_NEAR(roc_auc(pos, neg), wins / (15.0 * 12.0), 1e-12);
    const auto curve = roc_curve(pos, neg);
    EXPECT_DOUBLE_EQ(curve.back().fpr, 1.0);
    EXPECT_DOUBLE_EQ(curve.back().tpr, 1.0);
  }
}

TEST(Histogram, ConservesCounts)
{
  EvalReport r;
  r.correct_affinities = {0.0, 0.05, 0.5, 1.0, 0.999};
  r.wrong_affinities = {0.2, 0.21};
  const auto h = affinity_histogram(r, 20);
  EXPECT_EQ(h.edges.size(), 21U);
  std::size_t c = 0;
  std::size_t w = 0;
  for (std::size_t b = 0; b < 20; ++b) {
    c += h.correct[b];
    w += h.wrong[b];
  }
  EXPECT_EQ(c, 5U);
  EXPECT_EQ(w, 2U);
  EXPECT_EQ(h.correct[19], 2U);
  EXPECT_EQ(h.correct[1], 1U);
  EXPECT_EQ(h.wrong[4], 2U);
}

TEST(Io, FrameRoundTrip)
{
  const std::vector<Frame> frames{{1, 0.5, {{1.0, 2.0, 3.0}, {-1.5, 0.25, 1e-3}}}, {0, -0.1, {}}};
  std::stringstream ss;
  write_frames(ss, frames);
  const auto back = read_frames(ss);
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[0].sensor_id, 1);
  EXPECT_EQ(back[0].points, frames[0].points);
  EXPECT_DOUBLE_EQ(back[1].t, -0.1);
}

TEST(Io, BadLineNamesLineNumber)
{
  std::stringstream ss("{\"sensor_id\":0,\"t\":0,\"points\":[]}\nnot json\n");
  try {
    read_frames(ss);
    FAIL();
  } catch (const DataError & e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Io, SubTrajectoryRoundTrip)
{
  SubTrajectory tr;
  tr.id = 12;
  tr.sensor_id = 1;
  tr.t_start = 3.0;
  tr.t_end = 4.0;
  tr.start_gate = 2;
  tr.end_gate = kUnknownGate;
  tr.samples = {{3.0, 1.0, 2.0}, {4.0, 1.5, 2.0}};
  Signature sig;
  sig.height = 1.72;
  sig.embedding = Eigen::VectorXd::Unit(3, 1);
  const auto rec = subtrajectory_from_json(subtrajectory_to_json(tr, &sig));
  EXPECT_EQ(rec.trajectory.id, 12);
  EXPECT_EQ(rec.trajectory.start_gate, 2);
  EXPECT_EQ(rec.trajectory.end_gate, kUnknownGate);
  EXPECT_EQ(rec.trajectory.samples.size(), 2U);
  ASSERT_TRUE(rec.signature.height.has_value());
  EXPECT_DOUBLE_EQ(*rec.signature.height, 1.72);
  ASSERT_TRUE(rec.signature.embedding.has_value());
  EXPECT_EQ(*rec.signature.embedding, *sig.embedding);
  const auto node = to_node(rec);
  EXPECT_EQ(node.id, 12);
  EXPECT_DOUBLE_EQ(node.t_end, 4.0);
}

TEST(Io, MatchResultRoundTrip)
{
  MatchResult r;
  r.window_id = 3;
  r.pairs = {{1, 2, 0.75}, {4, 6, 0.5}};
  r.terminals = {2, 6};
  r.sequences = {{1, 2}, {4, 6}};
  EXPECT_EQ(match_result_from_json(match_result_to_json(r)), r);
}

TEST(Io, GroundTruthRoundTripAndDuplicates)
{
  const std::map<TrackId, PersonId> labels{{0, 3}, {1, 3}, {2, kUnknownPerson}};
  std::stringstream ss;
  write_ground_truth(ss, labels);
  EXPECT_EQ(read_ground_truth(ss), labels);
  std::stringstream dup("{\"person_id\":1,\"sub_trajectory_id\":4}\n{\"person_id\":2,\"sub_trajectory_id\":4}\n");
  EXPECT_THROW(read_ground_truth(dup), DataError);
}

TEST(Io, SegmentFeaturesRoundTrip)
{
  std::vector<SegmentFeatureRecord> recs(2);
  recs[0] = {5, 1, 1.8, FeatureMatrix(20, 54, 0.25)};
  recs[1] = {6, kUnknownPerson, 1.6, FeatureMatrix(20, 54, -1.0)};
  std::stringstream ss;
  write_segment_features(ss, recs);
  const auto back = read_segment_features(ss);
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[1].trajectory_id, 6);
  EXPECT_EQ(back[1].person, kUnknownPerson);
  EXPECT_EQ(back[0].features, recs[0].features);
  std::stringstream junk("NOTFEATS");
  EXPECT_THROW(read_segment_features(junk), DataError);
}

TEST(Io, ModelStateRoundTrip)
{
  TravelTimeConfig cfg;
  cfg.n_min = 2;
  auto m = initial_model(4, cfg);
  const std::vector<HighConfidenceTransition> t{{1, 2, 3.0, 1, 2}, {1, 2, 5.0, 3, 4}, {0, 3, 9.0, 5, 6}};
  m = apply_updates(m, t);
  const auto back = model_state_from_json(model_state_to_json(m), cfg);
  EXPECT_EQ(back.q.q, m.q.q);
  const auto a = back.travel.pair(1, 2);
  EXPECT_EQ(a.mode, TravelMode::InvGamma);
  EXPECT_DOUBLE_EQ(a.mu_tt, 4.0);
  EXPECT_EQ(back.travel.pair(0, 3).buffer, (std::vector<double>{9.0}));
}

TEST(Config, ParsesSectionsAndRejectsUnknownKeys)
{
  const auto c = config_from_json(
    R"({"matcher": {"tau_nomatch": 0.1, "p1": "height"}, "harness": {"seed": 9, "update": false},
        "simulator": {"subject_counts": [2, 8]}})");
  EXPECT_DOUBLE_EQ(c.matcher.tau_nomatch, 0.1);
  EXPECT_EQ(c.matcher.p1_mode, P1Mode::Height);
  EXPECT_EQ(c.seed, 9U);
  EXPECT_FALSE(c.update);
  EXPECT_EQ(c.subject_counts, (std::vector<std::size_t>{2, 8}));
  EXPECT_THROW(config_from_json(R"({"matcher": {"tau": 0.1}})"), DataError);
  EXPECT_THROW(config_from_json(R"({"bogus": {}})"), DataError);
  EXPECT_THROW(config_from_json(R"({"matcher": {"p1": "color"}})"), DataError);
  EXPECT_THROW(config_from_json("[1, 2"), DataError);
}

TEST(Config, DumpRoundTrip)
{
  HarnessConfig c = cheap_config();
  c.seed = 42;
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.seed, 42U);
  EXPECT_EQ(back.subject_counts, c.subject_counts);
  EXPECT_EQ(back.matcher.p1_mode, P1Mode::Height);
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Experiments, UnknownNameRejected)
{
  ExperimentContext ctx(cheap_config());
  EXPECT_THROW(run_experiment("exp9", ctx), std::invalid_argument);
  EXPECT_EQ(experiment_names().size(), 5U);
}

TEST(Experiments, MissingModelWithTrainingDisabled)
{
  auto cfg = cheap_config();
  cfg.matcher.p1_mode = P1Mode::FisherVector;
  cfg.model_path = (scratch_dir("nomodel") / "model.bin").string();
  ExperimentContext ctx(cfg);
  EXPECT_THROW(ctx.training(), DataError);
}

TEST(Experiments, SmallRunsHaveExpectedShape)
{
  ExperimentContext ctx(cheap_config());
  const auto c = run_experiment("exp1c", ctx);
  ASSERT_EQ(c.reports.size(), 4U);
  EXPECT_EQ(c.reports[0].tag, "P1");
  EXPECT_EQ(c.reports[3].tag, "product");
  const auto pp = run_experiment("pre_post", ctx);
  ASSERT_EQ(pp.reports.size(), 2U);
  EXPECT_EQ(pp.reports[0].tag, "pre");
  EXPECT_EQ(pp.reports[1].tag, "post");
  const auto b = run_experiment("exp1b", ctx);
  ASSERT_EQ(b.reports.size(), 2U);
  EXPECT_DOUBLE_EQ(b.reports[0].params.at("interval"), 5.0);
  for (const auto * out : {&c, &pp, &b}) {
    for (const auto & r : out->reports) {
      EXPECT_GE(r.f_measure, 0.0);
      EXPECT_LE(r.f_measure, 1.0);
    }
  }
  EXPECT_GT(pp.reports[1].f_measure, 0.5);

  ExperimentContext again(cheap_config());
  const auto pp2 = run_experiment("pre_post", again);
  EXPECT_DOUBLE_EQ(pp2.reports[1].f_measure, pp.reports[1].f_measure);
  EXPECT_EQ(pp2.reports[1].true_positives, pp.reports[1].true_positives);
}

TEST(Experiments, CorridorReportsOneRowPerDay)
{
  auto cfg = cheap_config();
  cfg.corridor_days = 2;
  ExperimentContext ctx(cfg);
  const auto out = run_experiment("corridor", ctx);
  ASSERT_EQ(out.reports.size(), 2U);
  EXPECT_DOUBLE_EQ(out.reports[1].params.at("day"), 2.0);
}

TEST(Plots, NothingWrittenWithoutReports)
{
  const auto dir = scratch_dir("empty");
  const std::vector<ExperimentOutput> outs{ExperimentOutput{"exp1a", {}, {}, {}}};
  EXPECT_TRUE(emit_plots(outs, dir.string()).empty());
  EXPECT_FALSE(std::filesystem::exists(dir));
}

TEST(Plots, TablesWritten)
{
  const auto dir = scratch_dir("plots");
  ExperimentOutput out{"pre_post", {}, {}, {}};
  EvalReport pre;
  pre.tag = "pre";
  pre.params = {{"subjects", 4}};
  pre.correct_affinities = {0.9, 0.95};
  pre.wrong_affinities = {0.1};
  out.reports.push_back(pre);
  TravelTimeCurve curve;
  curve.from = 0;
  curve.to = 2;
  curve.x = {1.0, 2.0};
  curve.prior = {0.1, 0.2};
  curve.likelihood = {0.3, 0.4};
  curve.posterior = {0.5, 0.6};
  out.travel_time = curve;
  out.roc = {{0.0, 0.0}, {1.0, 1.0}};
  const std::vector<ExperimentOutput> outs{out};
  const auto files = emit_plots(outs, dir.string());
  EXPECT_EQ(files.size(), 4U);
  std::ifstream aff(dir / "pre_post_pre_affinity.tsv");
  std::string line;
  std::getline(aff, line);
  EXPECT_EQ(line, "bin_low\tbin_high\tcorrect\twrong");
  std::size_t correct = 0;
  std::size_t wrong = 0;
  int rows = 0;
  while (std::getline(aff, line)) {
    std::istringstream ls(line);
    double lo = 0;
    double hi = 0;
    std::size_t c = 0;
    std::size_t w = 0;
    ls >> lo >> hi >> c >> w;
    correct += c;
    wrong += w;
    ++rows;
  }
  EXPECT_EQ(rows, 20);
  EXPECT_EQ(correct, 2U);
  EXPECT_EQ(wrong, 1U);
  std::ifstream tt(dir / "pre_post_travel_time.tsv");
  std::getline(tt, line);
  std::getline(tt, line);
  EXPECT_EQ(line, "dt\tprior\tlikelihood\tposterior");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace trajlink

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

#include "trajlink/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

namespace trajlink
{

namespace
{

ScenarioRun make_run(
  std::vector<SubTrajectory> trajectories, std::span<const TruthTick> truth, const AppearanceModel * model,
  double detection_window)
{
  ScenarioRun run;
  run.trajectories = std::move(trajectories);
  run.labels = label_trajectories(run.trajectories, truth);
  run.truth = truth_pairs(run.trajectories, run.labels);
  for (const auto & tr : run.trajectories) {
    run.nodes.push_back(make_node(tr, model));
    run.ids.push_back(tr.id);
  }
  run.detections = detect_high_confidence(gate_events(run.trajectories), detection_window);
  return run;
}

std::uint64_t interval_key(double interval)
{
  return static_cast<std::uint64_t>(std::llround(interval * 1000.0));
}

}  // namespace

TrainingData training_dataset(const HarnessConfig & config, const GmmGrid & grid)
{
  ScenarioSpec spec = scenario_1a(
    config.training_subjects, config.training_interval, substream_seed(config.seed, 0x7452ULL, 0));
  spec.laps = config.training_laps;
  spec.population_seed = config.population_seed;
  const MapSpec map = exp1_map();
  const auto extracted = simulate_and_extract(map, spec, config.extraction);
  const auto labels = label_trajectories(extracted.trajectories, extracted.truth);

  std::vector<const SubTrajectory *> usable;
  for (const auto & tr : extracted.trajectories) {
    if (labels.at(tr.id) != kUnknownPerson && !tr.segments.empty()) {
      usable.push_back(&tr);
    }
  }
  std::mt19937_64 rng(substream_seed(config.seed, 0x486FULL, 0));
  std::shuffle(usable.begin(), usable.end(), rng);
  const auto n_holdout = static_cast<std::size_t>(
    std::ceil(std::clamp(config.holdout_fraction, 0.0, 1.0) * static_cast<double>(usable.size())));

  TrainingData data;
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const auto & tr = *usable[i];
    const PersonId person = labels.at(tr.id);
    for (const auto & seg : tr.segments) {
      LabeledFeature f{person, fisher_vector(seg, grid, config.features.body_scale)};
      if (i < n_holdout) {
        data.holdout.push_back(std::move(f));
        data.holdout_tracks.push_back(tr.id);
      } else {
        data.train.push_back(std::move(f));
      }
    }
  }
  return data;
}

double holdout_auc(const TrainingData & data, const AppearanceModel & model, std::vector<RocPoint> * roc)
{
  std::vector<Eigen::VectorXd> emb;
  emb.reserve(data.holdout.size());
  for (const auto & f : data.holdout) {
    emb.push_back(model.net.embed(f.features));
  }
  std::vector<double> positives;
  std::vector<double> negatives;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    for (std::size_t j = i + 1; j < emb.size(); ++j) {
      if (data.holdout_tracks[i] == data.holdout_tracks[j]) {
        continue;
      }
      const double s = p1_from_embeddings(emb[i], emb[j]);
      (data.holdout[i].person == data.holdout[j].person ? positives : negatives).push_back(s);
    }
  }
  if (positives.empty() || negatives.empty()) {
    throw DataError("held-out set has no positive or no negative pairs");
  }
  if (roc) {
    *roc = roc_curve(positives, negatives);
  }
  return roc_auc(positives, negatives);
}

TrainingSummary train_and_validate(const HarnessConfig & config)
{
  TrainingSummary summary;
  summary.model.grid = make_grid(config.features);
  summary.model.body_scale = config.features.body_scale;
  TrainConfig train = config.train;
  if (train.layer_sizes.empty() ||
      static_cast<std::size_t>(train.layer_sizes.front()) != FeatureMatrix::kRows * summary.model.grid.size()) {
    throw DataError("embedding input size must equal 20 x GMM components");
  }
  train.seed = substream_seed(config.seed, 0x5447ULL, 0);
  const TrainingData data = training_dataset(config, summary.model.grid);
  auto result = train_embedding(data.train, train);
  summary.model.net = std::move(result.net);
  summary.epoch_loss = std::move(result.epoch_loss);
  summary.train_samples = data.train.size();
  summary.holdout_samples = data.holdout.size();
  summary.auc = holdout_auc(data, summary.model, &summary.roc);
  return summary;
}

EvalReport match_run(
  const ScenarioRun & run, const SpatioTemporalModel & model, const MatcherConfig & config, const std::string & tag)
{
  const auto graph = build_graph(run.nodes, model, config);
  const MatchResult result = solve_matching(graph);
  EvalReport report = evaluate(std::span<const MatchResult>(&result, 1), run.truth, run.ids);
  report.tag = tag;
  report.params = run.params;
  return report;
}

ExperimentContext::ExperimentContext(HarnessConfig config) : config_(std::move(config)), map_(exp1_map()) {}

const TrainingSummary & ExperimentContext::training()
{
  if (training_) {
    return *training_;
  }
  const bool have_file = !config_.model_path.empty() && std::filesystem::exists(config_.model_path);
  if (have_file) {
    TrainingSummary summary;
    summary.model = load_model(config_.model_path);
    const TrainingData data = training_dataset(config_, summary.model.grid);
    summary.train_samples = data.train.size();
    summary.holdout_samples = data.holdout.size();
    summary.auc = holdout_auc(data, summary.model, &summary.roc);
    training_ = std::move(summary);
  } else if (config_.train_if_missing) {
    training_ = train_and_validate(config_);
    if (!config_.model_path.empty()) {
      save_model(training_->model, config_.model_path);
    }
  } else {
    throw DataError("appearance model missing and training disabled");
  }
  return *training_;
}

const ScenarioRun & ExperimentContext::exp1_run(std::size_t subjects, double interval)
{
  const auto key = std::make_pair(subjects, static_cast<long long>(interval_key(interval)));
  if (auto it = runs_.find(key); it != runs_.end()) {
    return *it->second;
  }
  ScenarioSpec spec = scenario_1a(subjects, interval, substream_seed(config_.seed, subjects, interval_key(interval)));
  spec.population_seed = config_.population_seed;
  auto extracted = simulate_and_extract(map_, spec, config_.extraction);
  const AppearanceModel * model =
    config_.matcher.p1_mode == P1Mode::FisherVector ? &training().model : nullptr;
  auto run = std::make_unique<ScenarioRun>(
    make_run(std::move(extracted.trajectories), extracted.truth, model, config_.detection_window));
  run->params = {{"subjects", static_cast<double>(subjects)}, {"interval", interval}};
  return *runs_.emplace(key, std::move(run)).first->second;
}

SpatioTemporalModel ExperimentContext::initial() const
{
  return initial_model(map_.gates.size(), config_.travel);
}

const std::vector<HighConfidenceTransition> & ExperimentContext::pooled_detections()
{
  pooled_update();
  return pooled_detections_;
}

const SpatioTemporalModel & ExperimentContext::pooled_update()
{
  if (pooled_) {
    return *pooled_;
  }
  std::vector<std::pair<std::size_t, double>> scenarios;
  for (auto n : config_.subject_counts) {
    scenarios.emplace_back(n, config_.base_interval);
  }
  for (double iv : config_.intervals) {
    scenarios.emplace_back(config_.base_subjects, iv);
  }
  std::sort(scenarios.begin(), scenarios.end());
  scenarios.erase(std::unique(scenarios.begin(), scenarios.end()), scenarios.end());
  pooled_detections_.clear();
  for (const auto & [n, iv] : scenarios) {
    const auto & run = exp1_run(n, iv);
    pooled_detections_.insert(pooled_detections_.end(), run.detections.begin(), run.detections.end());
  }
  pooled_ = apply_updates(initial(), pooled_detections_);
  return *pooled_;
}

TravelTimeCurve travel_time_curve(
  const SpatioTemporalModel & model, std::span<const HighConfidenceTransition> detections, double dt_max)
{
  std::map<std::pair<GateId, GateId>, std::vector<double>> samples;
  for (const auto & d : detections) {
    samples[{d.from, d.to}].push_back(d.dt);
  }
  TravelTimeCurve curve;
  const std::vector<double> * best = nullptr;
  for (const auto & [key, v] : samples) {
    if (!best || v.size() > best->size()) {
      best = &v;
      curve.from = key.first;
      curve.to = key.second;
    }
  }
  if (!best) {
    return curve;
  }
  const double n = static_cast<double>(best->size());
  const double mean = std::accumulate(best->begin(), best->end(), 0.0) / n;
  double var = 0.0;
  for (double v : *best) {
    var += (v - mean) * (v - mean);
  }
  var = std::max(var / n, 1e-6);

  const auto & cfg = model.travel.config();
  const InvGammaDensity prior = invgamma_from_mode_variance(mean, cfg.prior_b / (cfg.prior_a - 1.0));
  const TravelTimePair state = model.travel.pair(curve.from, curve.to);
  std::optional<InvGammaDensity> posterior;
  if (state.mode == TravelMode::InvGamma) {
    posterior = model.travel.density(state);
  }
  constexpr int kPoints = 480;
  for (int i = 1; i <= kPoints; ++i) {
    const double x = dt_max * static_cast<double>(i) / kPoints;
    curve.x.push_back(x);
    curve.prior.push_back(prior.pdf(x));
    curve.likelihood.push_back(
      std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var));
    curve.posterior.push_back(posterior ? posterior->pdf(x) : 1.0 / dt_max);
  }
  return curve;
}

namespace
{

ExperimentOutput run_exp1a(ExperimentContext & ctx)
{
  ExperimentOutput out{"exp1a", {}, {}, {}};
  const auto & cfg = ctx.config();
  const auto pre = ctx.initial();
  const auto & post = ctx.pooled_update();
  for (auto n : cfg.subject_counts) {
    const auto & run = ctx.exp1_run(n, cfg.base_interval);
    out.reports.push_back(match_run(run, pre, cfg.matcher, "pre"));
    out.reports.push_back(match_run(run, post, cfg.matcher, "post"));
  }
  out.travel_time = travel_time_curve(post, ctx.pooled_detections(), cfg.travel.dt_max);
  return out;
}

ExperimentOutput run_exp1b(ExperimentContext & ctx)
{
  ExperimentOutput out{"exp1b", {}, {}, {}};
  const auto & cfg = ctx.config();
  const auto model = cfg.update ? ctx.pooled_update() : ctx.initial();
  const std::string tag = cfg.update ? "post" : "pre";
  for (double iv : cfg.intervals) {
    out.reports.push_back(match_run(ctx.exp1_run(cfg.base_subjects, iv), model, cfg.matcher, tag));
  }
  return out;
}

ExperimentOutput run_exp1c(ExperimentContext & ctx)
{
  ExperimentOutput out{"exp1c", {}, {}, {}};
  const auto & cfg = ctx.config();
  const auto model = cfg.update ? ctx.pooled_update() : ctx.initial();
  const auto & run = ctx.exp1_run(cfg.base_subjects, cfg.base_interval);
  const std::pair<const char *, unsigned> rows[] = {
    {"P1", factor::kP1}, {"P2", factor::kP2}, {"P3", factor::kP3}, {"product", factor::kAll}};
  for (const auto & [tag, mask] : rows) {
    MatcherConfig m = cfg.matcher;
    m.factors = mask;
    out.reports.push_back(match_run(run, model, m, tag));
  }
  if (cfg.matcher.p1_mode == P1Mode::FisherVector) {
    const auto & training = ctx.training();
    out.reports.front().auc = training.auc;
    out.roc = training.roc;
  }
  return out;
}

ExperimentOutput run_pre_post(ExperimentContext & ctx)
{
  ExperimentOutput out{"pre_post", {}, {}, {}};
  const auto & cfg = ctx.config();
  const auto & run = ctx.exp1_run(cfg.base_subjects, cfg.base_interval);
  out.reports.push_back(match_run(run, ctx.initial(), cfg.matcher, "pre"));
  const auto & post = ctx.pooled_update();
  out.reports.push_back(match_run(run, post, cfg.matcher, "post"));
  out.travel_time = travel_time_curve(post, ctx.pooled_detections(), cfg.travel.dt_max);
  return out;
}

ExperimentOutput run_corridor(ExperimentContext & ctx)
{
  ExperimentOutput out{"corridor", {}, {}, {}};
  const auto & cfg = ctx.config();
  const MapSpec map = corridor_map();
  MatcherConfig matcher = cfg.matcher;
  matcher.p1_mode = P1Mode::Height;
  SpatioTemporalModel model = initial_model(map.gates.size(), cfg.travel);
  std::vector<HighConfidenceTransition> all_detections;
  for (int day = 0; day < cfg.corridor_days; ++day) {
    EvalReport day_report;
    for (std::size_t slot = 0; slot < cfg.traffic.rates_per_minute.size(); ++slot) {
      const ScenarioSpec spec = corridor_slot(day, slot, cfg.traffic, cfg.seed);
      if (spec.walkers.empty()) {
        continue;
      }
      auto extracted = simulate_and_extract(map, spec, cfg.extraction);
      const ScenarioRun run =
        make_run(std::move(extracted.trajectories), extracted.truth, nullptr, cfg.detection_window);
      accumulate(day_report, match_run(run, model, matcher, "day"));
      if (cfg.update) {
        model = apply_updates(model, run.detections);
        all_detections.insert(all_detections.end(), run.detections.begin(), run.detections.end());
      }
    }
    day_report.tag = "day";
    day_report.params = {{"day", static_cast<double>(day + 1)}};
    out.reports.push_back(std::move(day_report));
  }
  if (!all_detections.empty()) {
    out.travel_time = travel_time_curve(model, all_detections, cfg.travel.dt_max);
  }
  return out;
}

void write_file(const std::filesystem::path & path, const std::string & text, std::vector<std::string> & written)
{
  std::ofstream f(path);
  f << text;
  if (!f) {
    throw std::runtime_error("cannot write " + path.string());
  }
  written.push_back(path.string());
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::vector<std::string> experiment_names()
{
  return {"exp1a", "exp1b", "exp1c", "pre_post", "corridor"};
}

ExperimentOutput run_experiment(const std::string & name, ExperimentContext & context)
{
  if (name == "exp1a") {
    return run_exp1a(context);
  }
  if (name == "exp1b") {
    return run_exp1b(context);
  }
  if (name == "exp1c") {
    return run_exp1c(context);
  }
  if (name == "pre_post") {
    return run_pre_post(context);
  }
  if (name == "corridor") {
    return run_corridor(context);
  }
  throw std::invalid_argument("unknown experiment " + name);
}

std::vector<std::string> emit_plots(std::span<const ExperimentOutput> outputs, const std::string & dir)
{
  std::vector<std::string> written;
  const bool any = std::any_of(outputs.begin(), outputs.end(), [](const auto & o) { return !o.reports.empty(); });
  if (!any) {
    return written;
  }
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + dir + ": " + ec.message());
  }
  for (const auto & out : outputs) {
    if (out.reports.empty()) {
      continue;
    }
    std::set<std::string> keys;
    for (const auto & r : out.reports) {
      for (const auto & [k, v] : r.params) {
        keys.insert(k);
      }
    }
    std::string table = "row\ttag";
    for (const auto & k : keys) {
      table += "\t" + k;
    }
    table += "\tprecision\trecall\tf_measure\n";
    std::vector<std::string> tags;
    std::map<std::string, EvalReport> merged;
    for (std::size_t i = 0; i < out.reports.size(); ++i) {
      const auto & r = out.reports[i];
      table += std::to_string(i) + "\t" + r.tag;
      for (const auto & k : keys) {
        const auto it = r.params.find(k);
        table += "\t" + (it == r.params.end() ? std::string("nan") : fmt(it->second));
      }
      table += "\t" + fmt(r.precision) + "\t" + fmt(r.recall) + "\t" + fmt(r.f_measure) + "\n";
      if (!merged.count(r.tag)) {
        tags.push_back(r.tag);
      }
      accumulate(merged[r.tag], r);
    }
    write_file(root / (out.name + "_f_measure.tsv"), table, written);

    for (const auto & tag : tags) {
      const auto h = affinity_histogram(merged[tag], 20);
      std::string text = "bin_low\tbin_high\tcorrect\twrong\n";
      for (std::size_t b = 0; b < h.correct.size(); ++b) {
        text += fmt(h.edges[b]) + "\t" + fmt(h.edges[b + 1]) + "\t" + std::to_string(h.correct[b]) + "\t" +
                std::to_string(h.wrong[b]) + "\n";
      }
      write_file(root / (out.name + "_" + tag + "_affinity.tsv"), text, written);
    }

    if (out.travel_time && !out.travel_time->x.empty()) {
      const auto & c = *out.travel_time;
      std::string text = "# gate pair " + std::to_string(c.from) + " -> " + std::to_string(c.to) + "\n";
      text += "dt\tprior\tlikelihood\tposterior\n";
      for (std::size_t i = 0; i < c.x.size(); ++i) {
        text += fmt(c.x[i]) + "\t" + fmt(c.prior[i]) + "\t" + fmt(c.likelihood[i]) + "\t" + fmt(c.posterior[i]) + "\n";
      }
      write_file(root / (out.name + "_travel_time.tsv"), text, written);
    }

    if (!out.roc.empty()) {
      std::string text = "fpr\ttpr\n";
      for (const auto & p : out.roc) {
        text += fmt(p.fpr) + "\t" + fmt(p.tpr) + "\n";
      }
      write_file(root / (out.name + "_roc.tsv"), text, written);
    }
  }
  return written;
}

}  // namespace trajlink

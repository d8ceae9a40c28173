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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajlink/config.hpp"
#include "trajlink/experiments.hpp"
#include "trajlink/io.hpp"

namespace
{

using namespace trajlink;

struct GlobalOptions
{
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string config_path;
  std::string p1;
  std::string update;
};

HarnessConfig resolve(const GlobalOptions & g)
{
  HarnessConfig c;
  if (!g.config_path.empty()) {
    c = load_config(g.config_path);
  }
  if (g.seed_set) {
    c.seed = g.seed;
  }
  if (!g.p1.empty()) {
    c.matcher.p1_mode = g.p1 == "height" ? P1Mode::Height : P1Mode::FisherVector;
  }
  if (!g.update.empty()) {
    c.update = g.update == "on";
  }
  return c;
}

std::ifstream open_in(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path);
  }
  return in;
}

std::ofstream open_out(const std::string & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  return out;
}

std::string slurp(const std::string & path)
{
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MapSpec map_by_name(const std::string & name)
{
  return name == "corridor" ? corridor_map() : exp1_map();
}

SpatioTemporalModel load_state(const std::string & path, const MapSpec & map, const HarnessConfig & c)
{
  if (path.empty()) {
    return initial_model(map.gates.size(), c.travel);
  }
  return model_state_from_json(slurp(path), c.travel);
}

// simulate ------------------------------------------------------------------

struct SimulateOptions
{
  std::string scenario = "exp1";
  std::size_t subjects = 4;
  double interval = 10.0;
  int laps = 3;
  int day = 0;
  std::size_t slot = 0;
  std::string frames_out;
  std::string truth_out;
};

int cmd_simulate(const HarnessConfig & c, const SimulateOptions & o)
{
  MapSpec map;
  ScenarioSpec spec;
  if (o.scenario == "corridor") {
    map = corridor_map();
    spec = corridor_slot(o.day, o.slot, c.traffic, c.seed);
  } else {
    map = exp1_map();
    spec = scenario_1a(o.subjects, o.interval, c.seed);
    spec.laps = o.laps;
    spec.population_seed = c.population_seed;
  }
  auto frames = open_out(o.frames_out);
  std::ofstream truth;
  if (!o.truth_out.empty()) {
    truth = open_out(o.truth_out);
  }
  for (const auto & f : calibration_frames(map, spec)) {
    frames << frame_to_json(f) << '\n';
  }
  simulate(
    map, spec, [&](const Frame & f) { frames << frame_to_json(f) << '\n'; },
    [&](const TruthTick & t) {
      if (truth.is_open()) {
        truth << truth_tick_to_json(t) << '\n';
      }
    });
  return 0;
}

// extract -------------------------------------------------------------------

struct ExtractOptions
{
  std::string frames_in;
  std::string map = "exp1";
  std::string out;
  std::string truth_in;
  std::string labels_out;
  std::string model_path;
  std::string features_out;
};

int cmd_extract(const HarnessConfig & c, const ExtractOptions & o)
{
  const MapSpec map = map_by_name(o.map);
  Extractor extractor(map, c.extraction);
  auto in = open_in(o.frames_in);
  std::vector<Frame> calibration;
  std::string line;
  std::size_t number = 0;
  bool calibrated = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    Frame f;
    try {
      f = frame_from_json(line);
    } catch (const DataError & e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
    if (f.t < 0.0) {
      if (calibrated) {
        throw DataError("calibration frame after scenario frames");
      }
      calibration.push_back(std::move(f));
      continue;
    }
    if (!calibrated) {
      extractor.calibrate(calibration);
      calibrated = true;
    }
    extractor.process(f);
  }
  if (!calibrated) {
    extractor.calibrate(calibration);
  }
  const auto trajectories = extractor.finish();

  std::optional<AppearanceModel> model;
  if (!o.model_path.empty()) {
    model = load_model(o.model_path);
  }
  auto out = open_out(o.out);
  for (const auto & tr : trajectories) {
    const Signature sig = make_signature(tr, model ? &*model : nullptr);
    out << subtrajectory_to_json(tr, &sig) << '\n';
  }

  std::map<TrackId, PersonId> labels;
  if (!o.truth_in.empty()) {
    auto truth_in = open_in(o.truth_in);
    const auto ticks = read_truth_ticks(truth_in);
    labels = label_trajectories(trajectories, ticks);
    if (!o.labels_out.empty()) {
      auto lo = open_out(o.labels_out);
      write_ground_truth(lo, labels);
    }
  }
  if (!o.features_out.empty()) {
    const GmmGrid grid = model ? model->grid : make_grid(c.features);
    const double scale = model ? model->body_scale : c.features.body_scale;
    std::vector<SegmentFeatureRecord> records;
    for (const auto & tr : trajectories) {
      const auto it = labels.find(tr.id);
      const PersonId person = it == labels.end() ? kUnknownPerson : it->second;
      for (const auto & seg : tr.segments) {
        records.push_back({tr.id, person, segment_height(seg), fisher_vector(seg, grid, scale)});
      }
    }
    auto fo = open_out(o.features_out);
    write_segment_features(fo, records);
  }
  std::cerr << "extracted " << trajectories.size() << " sub-trajectories\n";
  return 0;
}

// train ---------------------------------------------------------------------

struct TrainOptions
{
  std::string features_in;
  std::string out;
};

int cmd_train(const HarnessConfig & c, const TrainOptions & o)
{
  if (o.features_in.empty()) {
    const auto summary = train_and_validate(c);
    save_model(summary.model, o.out);
    std::printf(
      "trained on %zu samples, held-out %zu, final loss %.6f, AUC %.4f\n", summary.train_samples,
      summary.holdout_samples, summary.epoch_loss.empty() ? 0.0 : summary.epoch_loss.back(), summary.auc);
    return 0;
  }
  auto in = open_in(o.features_in);
  const auto records = read_segment_features(in);
  std::vector<LabeledFeature> data;
  for (const auto & r : records) {
    if (r.person != kUnknownPerson) {
      data.push_back({r.person, r.features});
    }
  }
  AppearanceModel model;
  model.grid = make_grid(c.features);
  model.body_scale = c.features.body_scale;
  TrainConfig tc = c.train;
  tc.seed = c.seed;
  auto result = train_embedding(data, tc);
  model.net = std::move(result.net);
  save_model(model, o.out);
  std::printf("trained on %zu samples, final loss %.6f\n", data.size(), result.final_loss);
  return 0;
}

// match / stream ------------------------------------------------------------

struct MatchOptions
{
  std::string in;
  std::string out;
  std::string map = "exp1";
  std::string state_in;
  std::string state_out;
};

void write_results(std::ostream & out, const std::vector<MatchResult> & results)
{
  for (const auto & r : results) {
    out << match_result_to_json(r) << '\n';
  }
  out.flush();
}

int cmd_match(const HarnessConfig & c, const MatchOptions & o)
{
  const MapSpec map = map_by_name(o.map);
  SpatioTemporalModel model = load_state(o.state_in, map, c);
  auto in = open_in(o.in);
  const auto records = read_subtrajectories(in);
  std::vector<MatchNode> nodes;
  std::vector<SubTrajectory> trajectories;
  for (const auto & r : records) {
    nodes.push_back(to_node(r));
    trajectories.push_back(r.trajectory);
  }
  if (c.update) {
    model = apply_updates(model, detect_high_confidence(gate_events(trajectories), c.detection_window));
  }
  const MatchResult result = solve_matching(build_graph(nodes, model, c.matcher));
  auto out = open_out(o.out);
  write_results(out, {result});
  if (!o.state_out.empty()) {
    auto so = open_out(o.state_out);
    so << model_state_to_json(model) << '\n';
  }
  return 0;
}

int cmd_stream(const HarnessConfig & c, const MatchOptions & o)
{
  const MapSpec map = map_by_name(o.map);
  SpatioTemporalModel model = load_state(o.state_in, map, c);
  OnlineMatcher matcher(model, c.matcher);
  std::ifstream file;
  if (!o.in.empty() && o.in != "-") {
    file = open_in(o.in);
  }
  std::istream & in = file.is_open() ? static_cast<std::istream &>(file) : std::cin;
  std::ofstream file_out;
  if (!o.out.empty() && o.out != "-") {
    file_out = open_out(o.out);
  }
  std::ostream & out = file_out.is_open() ? static_cast<std::ostream &>(file_out) : std::cout;

  std::vector<SubTrajectory> received;
  std::set<std::pair<TrackId, TrackId>> applied;
  auto after_results = [&](const std::vector<MatchResult> & results) {
    write_results(out, results);
    if (!c.update || results.empty()) {
      return;
    }
    std::vector<HighConfidenceTransition> fresh;
    for (const auto & d : detect_high_confidence(gate_events(received), c.detection_window)) {
      if (applied.insert({d.from_track, d.to_track}).second) {
        fresh.push_back(d);
      }
    }
    if (!fresh.empty()) {
      model = apply_updates(model, fresh);
      matcher.set_model(model);
    }
  };

  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    SubTrajectoryRecord r;
    try {
      r = subtrajectory_from_json(line);
    } catch (const DataError & e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
    received.push_back(r.trajectory);
    after_results(matcher.push(to_node(r)));
  }
  after_results(matcher.flush());
  if (!o.state_out.empty()) {
    auto so = open_out(o.state_out);
    so << model_state_to_json(model) << '\n';
  }
  return 0;
}

// eval ----------------------------------------------------------------------

struct EvalOptions
{
  std::string pred;
  std::string truth;
  std::string subtrajectories;
  std::string out;
};

int cmd_eval(const EvalOptions & o)
{
  auto pin = open_in(o.pred);
  const auto predictions = read_match_results(pin);
  auto tin = open_in(o.truth);
  const auto labels = read_ground_truth(tin);
  auto sin = open_in(o.subtrajectories);
  std::vector<SubTrajectory> trajectories;
  std::vector<TrackId> ids;
  for (const auto & r : read_subtrajectories(sin)) {
    ids.push_back(r.trajectory.id);
    trajectories.push_back(r.trajectory);
  }
  for (const auto & [id, person] : labels) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
      throw DataError("ground truth names unknown sub-trajectory " + std::to_string(id));
    }
  }
  EvalReport report = evaluate(predictions, truth_pairs(trajectories, labels), ids);
  report.tag = "eval";
  const std::string text = reports_to_json(std::span<const EvalReport>(&report, 1));
  if (o.out.empty()) {
    std::cout << text << '\n';
  } else {
    auto out = open_out(o.out);
    out << text << '\n';
  }
  return 0;
}

// experiment ----------------------------------------------------------------

struct ExperimentOptions
{
  std::vector<std::string> names;
  std::string plots_dir;
  std::string report_out;
};

int cmd_experiment(const HarnessConfig & c, const ExperimentOptions & o)
{
  ExperimentContext ctx(c);
  std::vector<std::string> names = o.names;
  if (names.size() == 1 && names.front() == "all") {
    names = experiment_names();
  }
  std::vector<ExperimentOutput> outputs;
  std::vector<EvalReport> all;
  for (const auto & name : names) {
    outputs.push_back(run_experiment(name, ctx));
    for (const auto & r : outputs.back().reports) {
      std::printf("%-9s %-8s", name.c_str(), r.tag.c_str());
      for (const auto & [k, v] : r.params) {
        std::printf(" %s=%g", k.c_str(), v);
      }
      std::printf("  P=%.4f R=%.4f F=%.4f", r.precision, r.recall, r.f_measure);
      if (r.auc) {
        std::printf(" AUC=%.4f", *r.auc);
      }
      std::printf("\n");
      EvalReport copy = r;
      copy.tag = name + ":" + r.tag;
      all.push_back(std::move(copy));
    }
  }
  if (!o.plots_dir.empty()) {
    for (const auto & path : emit_plots(outputs, o.plots_dir)) {
      std::fprintf(stderr, "wrote %s\n", path.c_str());
    }
  }
  if (!o.report_out.empty()) {
    auto out = open_out(o.report_out);
    out << reports_to_json(all) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Re-identify pedestrians across non-overlapping LiDAR views"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string &) { g.seed_set = true; });
  app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--p1", g.p1, "Appearance factor")->check(CLI::IsMember({"fv", "height"}));
  app.add_option("--update", g.update, "Apply distribution updates")->check(CLI::IsMember({"on", "off"}));

  SimulateOptions sim;
  auto * simulate_cmd = app.add_subcommand("simulate", "Generate synthetic LiDAR frames");
  simulate_cmd->add_option("--scenario", sim.scenario)->check(CLI::IsMember({"exp1", "corridor"}));
  simulate_cmd->add_option("--subjects", sim.subjects);
  simulate_cmd->add_option("--interval", sim.interval);
  simulate_cmd->add_option("--laps", sim.laps)->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--day", sim.day)->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--slot", sim.slot);
  simulate_cmd->add_option("--out", sim.frames_out, "Frames JSONL")->required();
  simulate_cmd->add_option("--truth", sim.truth_out, "Ground-truth positions JSONL");

  ExtractOptions ext;
  auto * extract_cmd = app.add_subcommand("extract", "Frames to sub-trajectories");
  extract_cmd->add_option("--frames", ext.frames_in)->required();
  extract_cmd->add_option("--map", ext.map)->check(CLI::IsMember({"exp1", "corridor"}));
  extract_cmd->add_option("--out", ext.out, "Sub-trajectory JSONL")->required();
  extract_cmd->add_option("--truth", ext.truth_in, "Ground-truth positions JSONL");
  extract_cmd->add_option("--labels", ext.labels_out, "Ground-truth labels JSONL")->needs(
    extract_cmd->get_option("--truth"));
  extract_cmd->add_option("--model", ext.model_path, "Appearance model for signatures");
  extract_cmd->add_option("--features", ext.features_out, "Segment feature file");

  TrainOptions tr;
  auto * train_cmd = app.add_subcommand("train", "Train the appearance embedding");
  train_cmd->add_option("--features", tr.features_in, "Segment feature file (default: simulate)");
  train_cmd->add_option("--out", tr.out, "Model file")->required();

  MatchOptions mo;
  auto * match_cmd = app.add_subcommand("match", "Batch matching of a sub-trajectory file");
  MatchOptions so;
  auto * stream_cmd = app.add_subcommand("stream", "Online matching of a sub-trajectory stream");
  for (auto [cmd, opts] : {std::pair{match_cmd, &mo}, std::pair{stream_cmd, &so}}) {
    cmd->add_option("--in", opts->in, "Sub-trajectory JSONL");
    cmd->add_option("--out", opts->out, "Match result JSONL");
    cmd->add_option("--map", opts->map)->check(CLI::IsMember({"exp1", "corridor"}));
    cmd->add_option("--state", opts->state_in, "Model state JSON");
    cmd->add_option("--state-out", opts->state_out, "Write the final model state");
  }
  match_cmd->get_option("--in")->required();
  match_cmd->get_option("--out")->required();

  EvalOptions ev;
  auto * eval_cmd = app.add_subcommand("eval", "Score match results");
  eval_cmd->add_option("--pred", ev.pred)->required();
  eval_cmd->add_option("--truth", ev.truth, "Ground-truth labels JSONL")->required();
  eval_cmd->add_option("--subtrajectories", ev.subtrajectories)->required();
  eval_cmd->add_option("--out", ev.out);

  ExperimentOptions ex;
  auto * experiment_cmd = app.add_subcommand("experiment", "Run experiments");
  experiment_cmd->add_option("names", ex.names, "exp1a exp1b exp1c pre_post corridor | all")
    ->required()
    ->check(CLI::IsMember({"exp1a", "exp1b", "exp1c", "pre_post", "corridor", "all"}));
  experiment_cmd->add_option("--plots", ex.plots_dir, "Directory for plot tables");
  experiment_cmd->add_option("--report", ex.report_out, "Report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return 1;
  }

  try {
    const HarnessConfig c = resolve(g);
    if (*simulate_cmd) {
      return cmd_simulate(c, sim);
    }
    if (*extract_cmd) {
      return cmd_extract(c, ext);
    }
    if (*train_cmd) {
      return cmd_train(c, tr);
    }
    if (*match_cmd) {
      return cmd_match(c, mo);
    }
    if (*stream_cmd) {
      return cmd_stream(c, so);
    }
    if (*eval_cmd) {
      return cmd_eval(ev);
    }
    if (*experiment_cmd) {
      return cmd_experiment(c, ex);
    }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

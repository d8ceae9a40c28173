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

#include "trajlink/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace trajlink
{

namespace
{

using nlohmann::json;

class Section
{
public:
  Section(const json & root, const std::string & name) : name_(name)
  {
    if (root.contains(name)) {
      node_ = &root.at(name);
      if (!node_->is_object()) {
        throw DataError("config section '" + name + "' must be an object");
      }
    }
  }
  ~Section() = default;

  template <typename T>
  void read(const std::string & key, T & value)
  {
    known_.insert(key);
    if (!node_ || !node_->contains(key)) {
      return;
    }
    try {
      value = node_->at(key).get<T>();
    } catch (const json::exception & e) {
      throw DataError("config " + name_ + "." + key + ": " + e.what());
    }
  }

  void finish() const
  {
    if (!node_) {
      return;
    }
    for (const auto & item : node_->items()) {
      if (!known_.count(item.key())) {
        throw DataError("unknown config key " + name_ + "." + item.key());
      }
    }
  }

private:
  std::string name_;
  const json * node_{nullptr};
  std::set<std::string> known_;
};

P1Mode parse_p1(const std::string & s)
{
  if (s == "fv") {
    return P1Mode::FisherVector;
  }
  if (s == "height") {
    return P1Mode::Height;
  }
  throw DataError("p1 mode must be 'fv' or 'height'");
}

std::string p1_name(P1Mode m)
{
  return m == P1Mode::Height ? "height" : "fv";
}

}  // namespace

HarnessConfig config_from_json(const std::string & text, HarnessConfig c)
{
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception & e) {
    throw DataError(std::string("invalid config JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw DataError("config must be a JSON object");
  }
  static const std::set<std::string> sections{
    "geometry", "tracker", "features", "embedding", "spatiotemporal", "matcher", "simulator", "harness"};
  for (const auto & item : root.items()) {
    if (!sections.count(item.key())) {
      throw DataError("unknown config section " + item.key());
    }
  }

  {
    Section s(root, "geometry");
    auto & g = c.extraction.geometry;
    s.read("background_voxel", g.background_voxel);
    s.read("occupancy_fraction", g.occupancy_fraction);
    s.read("downsample_cell", g.downsample_cell);
    s.read("dbscan_eps", g.dbscan_eps);
    s.read("dbscan_min_pts", g.dbscan_min_pts);
    s.read("min_cluster_size", g.min_cluster_size);
    s.finish();
  }
  {
    Section s(root, "tracker");
    auto & t = c.extraction.tracker;
    s.read("accel_noise", t.accel_noise);
    s.read("measurement_noise", t.measurement_noise);
    s.read("initial_speed_sigma", t.initial_speed_sigma);
    s.read("gate_radius", t.gate_radius);
    s.read("max_missed", t.max_missed);
    s.read("min_track_len", t.min_track_len);
    s.read("segment_stride", t.segment_stride);
    s.read("delta_gate", c.extraction.delta_gate);
    s.finish();
  }
  {
    Section s(root, "features");
    s.read("grid_x", c.features.grid_x);
    s.read("grid_y", c.features.grid_y);
    s.read("grid_z", c.features.grid_z);
    s.read("sigma", c.features.sigma);
    s.read("body_scale", c.features.body_scale);
    s.finish();
  }
  {
    Section s(root, "embedding");
    s.read("layer_sizes", c.train.layer_sizes);
    s.read("margin", c.train.margin);
    s.read("batch_size", c.train.batch_size);
    s.read("persons_per_batch", c.train.persons_per_batch);
    s.read("epochs", c.train.epochs);
    s.read("learning_rate", c.train.learning_rate);
    s.read("lr_decay", c.train.lr_decay);
    s.read("decay_every", c.train.decay_every);
    s.read("momentum", c.train.momentum);
    s.read("holdout_fraction", c.holdout_fraction);
    s.read("model_path", c.model_path);
    s.read("train_if_missing", c.train_if_missing);
    s.finish();
  }
  {
    Section s(root, "spatiotemporal");
    s.read("dt_max", c.travel.dt_max);
    s.read("prior_a", c.travel.prior_a);
    s.read("prior_b", c.travel.prior_b);
    s.read("n_min", c.travel.n_min);
    s.read("detection_window", c.detection_window);
    s.finish();
  }
  {
    Section s(root, "matcher");
    std::string p1 = p1_name(c.matcher.p1_mode);
    s.read("tau_nomatch", c.matcher.tau_nomatch);
    s.read("p1", p1);
    s.read("sigma_h", c.matcher.sigma_h);
    s.read("online_count", c.matcher.online_count);
    s.read("online_window", c.matcher.online_window);
    s.read("max_wait", c.matcher.max_wait);
    s.finish();
    c.matcher.p1_mode = parse_p1(p1);
  }
  {
    Section s(root, "simulator");
    s.read("population_seed", c.population_seed);
    s.read("training_subjects", c.training_subjects);
    s.read("training_laps", c.training_laps);
    s.read("training_interval", c.training_interval);
    s.read("subject_counts", c.subject_counts);
    s.read("intervals", c.intervals);
    s.read("base_subjects", c.base_subjects);
    s.read("base_interval", c.base_interval);
    s.read("corridor_days", c.corridor_days);
    s.read("corridor_rates_per_minute", c.traffic.rates_per_minute);
    s.read("corridor_slot_seconds", c.traffic.slot_seconds);
    s.read("corridor_population_seed", c.traffic.population_seed);
    s.finish();
  }
  {
    Section s(root, "harness");
    s.read("seed", c.seed);
    s.read("update", c.update);
    s.finish();
  }
  return c;
}

HarnessConfig load_config(const std::string & path, HarnessConfig base)
{
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open config file " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str(), std::move(base));
}

std::string config_to_json(const HarnessConfig & c)
{
  const auto & g = c.extraction.geometry;
  const auto & t = c.extraction.tracker;
  json root;
  root["geometry"] = {
    {"background_voxel", g.background_voxel}, {"occupancy_fraction", g.occupancy_fraction},
    {"downsample_cell", g.downsample_cell},   {"dbscan_eps", g.dbscan_eps},
    {"dbscan_min_pts", g.dbscan_min_pts},     {"min_cluster_size", g.min_cluster_size}};
  root["tracker"] = {
    {"accel_noise", t.accel_noise},         {"measurement_noise", t.measurement_noise},
    {"initial_speed_sigma", t.initial_speed_sigma}, {"gate_radius", t.gate_radius},
    {"max_missed", t.max_missed},           {"min_track_len", t.min_track_len},
    {"segment_stride", t.segment_stride},   {"delta_gate", c.extraction.delta_gate}};
  root["features"] = {
    {"grid_x", c.features.grid_x}, {"grid_y", c.features.grid_y}, {"grid_z", c.features.grid_z},
    {"sigma", c.features.sigma},   {"body_scale", c.features.body_scale}};
  root["embedding"] = {
    {"layer_sizes", c.train.layer_sizes}, {"margin", c.train.margin},
    {"batch_size", c.train.batch_size},   {"persons_per_batch", c.train.persons_per_batch},
    {"epochs", c.train.epochs},           {"learning_rate", c.train.learning_rate},
    {"lr_decay", c.train.lr_decay},       {"decay_every", c.train.decay_every},
    {"momentum", c.train.momentum},       {"holdout_fraction", c.holdout_fraction},
    {"model_path", c.model_path},         {"train_if_missing", c.train_if_missing}};
  root["spatiotemporal"] = {
    {"dt_max", c.travel.dt_max}, {"prior_a", c.travel.prior_a}, {"prior_b", c.travel.prior_b},
    {"n_min", c.travel.n_min},   {"detection_window", c.detection_window}};
  root["matcher"] = {
    {"tau_nomatch", c.matcher.tau_nomatch},     {"p1", p1_name(c.matcher.p1_mode)},
    {"sigma_h", c.matcher.sigma_h},             {"online_count", c.matcher.online_count},
    {"online_window", c.matcher.online_window}, {"max_wait", c.matcher.max_wait}};
  root["simulator"] = {
    {"population_seed", c.population_seed},
    {"training_subjects", c.training_subjects},
    {"training_laps", c.training_laps},
    {"training_interval", c.training_interval},
    {"subject_counts", c.subject_counts},
    {"intervals", c.intervals},
    {"base_subjects", c.base_subjects},
    {"base_interval", c.base_interval},
    {"corridor_days", c.corridor_days},
    {"corridor_rates_per_minute", c.traffic.rates_per_minute},
    {"corridor_slot_seconds", c.traffic.slot_seconds},
    {"corridor_population_seed", c.traffic.population_seed}};
  root["harness"] = {{"seed", c.seed}, {"update", c.update}};
  return root.dump(2);
}

GmmGrid make_grid(const FeatureConfig & config)
{
  return GmmGrid::regular(config.grid_x, config.grid_y, config.grid_z, config.sigma);
}

}  // namespace trajlink

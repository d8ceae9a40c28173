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

#include "trajlink/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace trajlink
{

namespace
{

using nlohmann::json;

json parse_line(const std::string & line, const char * what)
{
  try {
    json j = json::parse(line);
    if (!j.is_object()) {
      throw DataError(std::string(what) + " record must be a JSON object");
    }
    return j;
  } catch (const json::exception & e) {
    throw DataError(std::string("malformed ") + what + " record: " + e.what());
  }
}

template <typename T>
T field(const json & j, const char * key)
{
  if (!j.contains(key)) {
    throw DataError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception & e) {
    throw DataError(std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename Fn>
auto read_lines(std::istream & in, Fn parse)
{
  std::vector<decltype(parse(std::string{}))> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(parse(line));
    } catch (const DataError & e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

GateId gate_field(const json & j, const char * key)
{
  if (!j.contains(key) || j.at(key).is_null()) {
    return kUnknownGate;
  }
  return field<GateId>(j, key);
}

json gate_value(GateId g)
{
  return g == kUnknownGate ? json(nullptr) : json(g);
}

template <typename T>
void write_le(std::ostream & out, T value)
{
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.write(reinterpret_cast<const char *>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream & in)
{
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char *>(bytes), sizeof(T))) {
    throw DataError("truncated feature file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char kFeatureMagic[8] = {'T', 'R', 'J', 'L', 'F', 'E', 'A', 'T'};

}  // namespace

std::string frame_to_json(const Frame & frame)
{
  json pts = json::array();
  for (const auto & p : frame.points) {
    pts.push_back({p.x, p.y, p.z});
  }
  return json{{"sensor_id", frame.sensor_id}, {"t", frame.t}, {"points", std::move(pts)}}.dump();
}

Frame frame_from_json(const std::string & line)
{
  const json j = parse_line(line, "frame");
  Frame f;
  f.sensor_id = field<SensorId>(j, "sensor_id");
  f.t = field<double>(j, "t");
  const auto pts = field<std::vector<std::vector<double>>>(j, "points");
  f.points.reserve(pts.size());
  for (const auto & p : pts) {
    if (p.size() != 3) {
      throw DataError("points must be [x, y, z] triples");
    }
    const Point3 q{p[0], p[1], p[2]};
    if (!is_finite(q)) {
      throw DataError("non-finite point coordinate");
    }
    f.points.push_back(q);
  }
  return f;
}

void write_frames(std::ostream & out, std::span<const Frame> frames)
{
  for (const auto & f : frames) {
    out << frame_to_json(f) << '\n';
  }
}

std::vector<Frame> read_frames(std::istream & in)
{
  return read_lines(in, frame_from_json);
}

std::string subtrajectory_to_json(const SubTrajectory & tr, const Signature * signature)
{
  json samples = json::array();
  for (const auto & s : tr.samples) {
    samples.push_back({s.t, s.x, s.y});
  }
  json j{
    {"id", tr.id},
    {"sensor_id", tr.sensor_id},
    {"t_start", tr.t_start},
    {"t_end", tr.t_end},
    {"start_gate", gate_value(tr.start_gate)},
    {"end_gate", gate_value(tr.end_gate)},
    {"samples", std::move(samples)}};
  if (signature && (signature->embedding || signature->height)) {
    json sig = json::object();
    if (signature->embedding) {
      sig["embedding"] = std::vector<double>(signature->embedding->data(),
        signature->embedding->data() + signature->embedding->size());
    }
    if (signature->height) {
      sig["height"] = *signature->height;
    }
    j["signature"] = std::move(sig);
  }
  return j.dump();
}

SubTrajectoryRecord subtrajectory_from_json(const std::string & line)
{
  const json j = parse_line(line, "sub-trajectory");
  SubTrajectoryRecord r;
  auto & tr = r.trajectory;
  tr.id = field<TrackId>(j, "id");
  tr.sensor_id = field<SensorId>(j, "sensor_id");
  tr.t_start = field<double>(j, "t_start");
  tr.t_end = field<double>(j, "t_end");
  tr.start_gate = gate_field(j, "start_gate");
  tr.end_gate = gate_field(j, "end_gate");
  for (const auto & s : field<std::vector<std::vector<double>>>(j, "samples")) {
    if (s.size() != 3) {
      throw DataError("samples must be [t, x, y] triples");
    }
    tr.samples.push_back({s[0], s[1], s[2]});
  }
  if (!(tr.t_start <= tr.t_end)) {
    throw DataError("t_start must not exceed t_end");
  }
  if (j.contains("signature")) {
    const json & sig = j.at("signature");
    if (sig.contains("embedding")) {
      const auto v = field<std::vector<double>>(sig, "embedding");
      r.signature.embedding = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (sig.contains("height")) {
      r.signature.height = field<double>(sig, "height");
    }
  }
  return r;
}

std::vector<SubTrajectoryRecord> read_subtrajectories(std::istream & in)
{
  return read_lines(in, subtrajectory_from_json);
}

MatchNode to_node(const SubTrajectoryRecord & record)
{
  const auto & tr = record.trajectory;
  MatchNode node;
  node.id = tr.id;
  node.sensor_id = tr.sensor_id;
  node.t_start = tr.t_start;
  node.t_end = tr.t_end;
  node.start_gate = tr.start_gate;
  node.end_gate = tr.end_gate;
  node.signature = record.signature;
  return node;
}

std::string match_result_to_json(const MatchResult & result)
{
  json pairs = json::array();
  for (const auto & p : result.pairs) {
    pairs.push_back({p.u, p.v, p.affinity});
  }
  return json{
    {"window_id", result.window_id},
    {"pairs", std::move(pairs)},
    {"terminals", result.terminals},
    {"sequences", result.sequences}}
    .dump();
}

MatchResult match_result_from_json(const std::string & line)
{
  const json j = parse_line(line, "match result");
  MatchResult r;
  r.window_id = field<std::int64_t>(j, "window_id");
  const json & pairs = j.contains("pairs") ? j.at("pairs") : json::array();
  for (const auto & p : pairs) {
    if (!p.is_array() || p.size() != 3) {
      throw DataError("pairs must be [u, v, affinity] triples");
    }
    try {
      r.pairs.push_back({p[0].get<TrackId>(), p[1].get<TrackId>(), p[2].get<double>()});
    } catch (const json::exception & e) {
      throw DataError(std::string("bad pair: ") + e.what());
    }
  }
  r.terminals = field<std::vector<TrackId>>(j, "terminals");
  if (j.contains("sequences")) {
    r.sequences = field<std::vector<std::vector<TrackId>>>(j, "sequences");
  }
  return r;
}

std::vector<MatchResult> read_match_results(std::istream & in)
{
  return read_lines(in, match_result_from_json);
}

void write_ground_truth(std::ostream & out, const std::map<TrackId, PersonId> & labels)
{
  for (const auto & [id, person] : labels) {
    out << json{{"person_id", person}, {"sub_trajectory_id", id}}.dump() << '\n';
  }
}

std::map<TrackId, PersonId> read_ground_truth(std::istream & in)
{
  std::map<TrackId, PersonId> labels;
  const auto rows = read_lines(in, [](const std::string & line) {
    const json j = parse_line(line, "ground truth");
    return std::pair<TrackId, PersonId>{field<TrackId>(j, "sub_trajectory_id"), field<PersonId>(j, "person_id")};
  });
  for (const auto & [id, person] : rows) {
    if (!labels.emplace(id, person).second) {
      throw DataError("duplicate ground-truth entry for sub-trajectory " + std::to_string(id));
    }
  }
  return labels;
}

std::string truth_tick_to_json(const TruthTick & tick)
{
  json persons = json::array();
  for (const auto & p : tick.persons) {
    persons.push_back({p.person, p.position.x, p.position.y});
  }
  return json{{"t", tick.t}, {"persons", std::move(persons)}}.dump();
}

std::vector<TruthTick> read_truth_ticks(std::istream & in)
{
  return read_lines(in, [](const std::string & line) {
    const json j = parse_line(line, "truth tick");
    TruthTick tick;
    tick.t = field<double>(j, "t");
    for (const auto & p : field<std::vector<std::vector<double>>>(j, "persons")) {
      if (p.size() != 3) {
        throw DataError("persons must be [id, x, y] triples");
      }
      tick.persons.push_back({static_cast<PersonId>(p[0]), {p[1], p[2]}});
    }
    return tick;
  });
}

void write_segment_features(std::ostream & out, std::span<const SegmentFeatureRecord> records)
{
  out.write(kFeatureMagic, sizeof(kFeatureMagic));
  write_le<std::uint32_t>(out, 1);
  write_le<std::uint64_t>(out, records.size());
  for (const auto & r : records) {
    write_le<std::int64_t>(out, r.trajectory_id);
    write_le<std::int32_t>(out, r.person);
    write_le<double>(out, r.height);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.features.rows()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.features.cols()));
    for (double v : r.features.flat()) {
      write_le<double>(out, v);
    }
  }
  if (!out) {
    throw std::runtime_error("failed to write feature file");
  }
}

std::vector<SegmentFeatureRecord> read_segment_features(std::istream & in)
{
  char magic[sizeof(kFeatureMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kFeatureMagic, sizeof(magic)) != 0) {
    throw DataError("not a trajlink feature file");
  }
  if (read_le<std::uint32_t>(in) != 1) {
    throw DataError("unsupported feature file version");
  }
  const auto count = read_le<std::uint64_t>(in);
  std::vector<SegmentFeatureRecord> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    SegmentFeatureRecord r;
    r.trajectory_id = read_le<std::int64_t>(in);
    r.person = read_le<std::int32_t>(in);
    r.height = read_le<double>(in);
    const auto rows = read_le<std::uint32_t>(in);
    const auto cols = read_le<std::uint32_t>(in);
    if (rows == 0 || cols == 0 || static_cast<std::uint64_t>(rows) * cols > (1ULL << 24)) {
      throw DataError("invalid feature matrix shape");
    }
    r.features = FeatureMatrix(rows, cols);
    for (double & v : r.features.flat()) {
      v = read_le<double>(in);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string model_state_to_json(const SpatioTemporalModel & model)
{
  json q = json::array();
  for (Eigen::Index r = 0; r < model.q.q.rows(); ++r) {
    std::vector<double> row;
    for (Eigen::Index c = 0; c < model.q.q.cols(); ++c) {
      row.push_back(model.q.q(r, c));
    }
    q.push_back(row);
  }
  json pairs = json::array();
  for (const auto & [key, st] : model.travel.pairs()) {
    pairs.push_back({
      {"from", key.first},
      {"to", key.second},
      {"mode", st.mode == TravelMode::Uniform ? "uniform" : "invgamma"},
      {"a", st.a},
      {"b", st.b},
      {"mu_tt", st.mu_tt},
      {"n", st.n},
      {"buffer", st.buffer}});
  }
  return json{{"Q", std::move(q)}, {"pairs", std::move(pairs)}}.dump(2);
}

SpatioTemporalModel model_state_from_json(const std::string & text, const TravelTimeConfig & config)
{
  const json j = parse_line(text, "model state");
  SpatioTemporalModel model{TransitionMatrix{}, TravelTimeModel(config)};
  const auto q = field<std::vector<std::vector<double>>>(j, "Q");
  const auto g = static_cast<Eigen::Index>(q.size());
  model.q.q = Eigen::MatrixXd::Zero(g, g);
  for (Eigen::Index r = 0; r < g; ++r) {
    if (static_cast<Eigen::Index>(q[static_cast<std::size_t>(r)].size()) != g) {
      throw DataError("Q must be square");
    }
    for (Eigen::Index c = 0; c < g; ++c) {
      const double v = q[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DataError("Q entries must be finite and non-negative");
      }
      model.q.q(r, c) = v;
    }
  }
  if (j.contains("pairs")) {
    for (const auto & p : j.at("pairs")) {
      TravelTimePair st;
      const auto mode = field<std::string>(p, "mode");
      if (mode == "uniform") {
        st.mode = TravelMode::Uniform;
      } else if (mode == "invgamma") {
        st.mode = TravelMode::InvGamma;
      } else {
        throw DataError("unknown travel-time mode " + mode);
      }
      st.a = field<double>(p, "a");
      st.b = field<double>(p, "b");
      st.mu_tt = field<double>(p, "mu_tt");
      st.n = field<std::size_t>(p, "n");
      if (p.contains("buffer")) {
        st.buffer = field<std::vector<double>>(p, "buffer");
      }
      model.travel.set_pair(field<GateId>(p, "from"), field<GateId>(p, "to"), std::move(st));
    }
  }
  return model;
}

std::string reports_to_json(std::span<const EvalReport> reports)
{
  json arr = json::array();
  for (const auto & r : reports) {
    json j{
      {"tag", r.tag},
      {"params", r.params},
      {"precision", r.precision},
      {"recall", r.recall},
      {"f_measure", r.f_measure},
      {"true_positives", r.true_positives},
      {"false_positives", r.false_positives},
      {"false_negatives", r.false_negatives}};
    if (r.auc) {
      j["auc"] = *r.auc;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace trajlink

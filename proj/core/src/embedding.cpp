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

#include "trajlink/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace trajlink
{

EmbeddingNet::EmbeddingNet(std::vector<int> layer_sizes, std::uint64_t seed)
: sizes_(std::move(layer_sizes))
{
  if (sizes_.size() < 2) {
    throw std::invalid_argument("network needs at least an input and an output layer");
  }
  for (int s : sizes_) {
    if (s <= 0) {
      throw std::invalid_argument("layer sizes must be positive");
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const int fan_out = sizes_[l + 1];
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        w(r, c) = normal(rng);
      }
    }
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

std::size_t EmbeddingNet::parameter_count() const
{
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

std::vector<double> EmbeddingNet::flatten_params() const
{
  std::vector<double> out;
  out.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const auto & w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        out.push_back(w(r, c));
      }
    }
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) {
      out.push_back(biases_[l](r));
    }
  }
  return out;
}

void EmbeddingNet::set_params(std::span<const double> params)
{
  if (params.size() != parameter_count()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    auto & w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        w(r, c) = params[k++];
      }
    }
    for (Eigen::Index r = 0; r < biases_[l].size(); ++r) {
      biases_[l](r) = params[k++];
    }
  }
}

void EmbeddingNet::set_input_normalization(Eigen::VectorXd mean, Eigen::VectorXd scale)
{
  if (mean.size() != 0 || scale.size() != 0) {
    if (mean.size() != static_cast<Eigen::Index>(input_dim()) || scale.size() != mean.size()) {
      throw std::invalid_argument("input normalization has the wrong dimension");
    }
  }
  input_mean_ = std::move(mean);
  input_scale_ = std::move(scale);
}

Eigen::MatrixXd EmbeddingNet::normalize_inputs(const Eigen::MatrixXd & x) const
{
  if (input_mean_.size() == 0) {
    return x;
  }
  return (x.colwise() - input_mean_).array().colwise() * input_scale_.array();
}

Eigen::VectorXd EmbeddingNet::forward(const Eigen::VectorXd & x) const
{
  if (x.size() != static_cast<Eigen::Index>(input_dim())) {
    throw std::invalid_argument("input dimension does not match the network");
  }
  Eigen::VectorXd a = normalize_inputs(x);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::VectorXd z = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) {
      z = z.cwiseMax(0.0);
    }
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd EmbeddingNet::embed(const Eigen::VectorXd & x) const
{
  Eigen::VectorXd z = forward(x);
  const double norm = z.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DataError("degenerate norm");
  }
  return z / norm;
}

Eigen::VectorXd EmbeddingNet::embed(const FeatureMatrix & f) const
{
  return embed(to_input(f));
}

bool EmbeddingNet::operator==(const EmbeddingNet & other) const
{
  if (sizes_ != other.sizes_ || weights_.size() != other.weights_.size()) {
    return false;
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) {
      return false;
    }
  }
  if (input_mean_.size() != other.input_mean_.size()) {
    return false;
  }
  return input_mean_ == other.input_mean_ && input_scale_ == other.input_scale_;
}

double triplet_loss(
  const Eigen::VectorXd & a, const Eigen::VectorXd & p, const Eigen::VectorXd & n, double margin)
{
  return std::max(0.0, margin - a.dot(p) + a.dot(n));
}

double triplet_batch_loss(
  const EmbeddingNet & net, const Eigen::MatrixXd & inputs, std::span<const TripletIndex> triplets,
  double margin, std::vector<double> * grad)
{
  if (triplets.empty()) {
    if (grad) {
      grad->assign(net.parameter_count(), 0.0);
    }
    return 0.0;
  }
  const std::size_t n_layers = net.layer_count();
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(n_layers + 1);
  acts.push_back(net.normalize_inputs(inputs));
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = net.weight(l) * acts.back();
    z.colwise() += net.bias(l);
    if (l + 1 < n_layers) {
      z = z.cwiseMax(0.0);
    }
    acts.push_back(std::move(z));
  }
  const Eigen::MatrixXd & out = acts.back();
  const Eigen::VectorXd norms = out.colwise().norm().transpose();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms(i) > 0.0)) {
      throw DataError("degenerate norm");
    }
  }
  const Eigen::MatrixXd y = out.array().rowwise() / norms.transpose().array();

  const double inv_t = 1.0 / static_cast<double>(triplets.size());
  double loss = 0.0;
  Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  for (const auto & t : triplets) {
    const auto a = static_cast<Eigen::Index>(t.anchor);
    const auto p = static_cast<Eigen::Index>(t.positive);
    const auto n = static_cast<Eigen::Index>(t.negative);
    const double value = margin - y.col(a).dot(y.col(p)) + y.col(a).dot(y.col(n));
    if (value <= 0.0) {
      continue;
    }
    loss += value * inv_t;
    if (grad) {
      dy.col(a) += (y.col(n) - y.col(p)) * inv_t;
      dy.col(p) -= y.col(a) * inv_t;
      dy.col(n) += y.col(a) * inv_t;
    }
  }
  if (!grad) {
    return loss;
  }

  // Back through the normalization y = z / |z|.
  Eigen::MatrixXd dz(y.rows(), y.cols());
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    dz.col(c) = (dy.col(c) - y.col(c) * y.col(c).dot(dy.col(c))) / norms(c);
  }

  std::vector<Eigen::MatrixXd> dw(n_layers);
  std::vector<Eigen::VectorXd> db(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    dw[l] = dz * acts[l].transpose();
    db[l] = dz.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd da = net.weight(l).transpose() * dz;
      dz = (acts[l].array() > 0.0).select(da, 0.0);
    }
  }
  grad->clear();
  grad->reserve(net.parameter_count());
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (Eigen::Index r = 0; r < dw[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < dw[l].cols(); ++c) {
        grad->push_back(dw[l](r, c));
      }
    }
    for (Eigen::Index r = 0; r < db[l].size(); ++r) {
      grad->push_back(db[l](r));
    }
  }
  return loss;
}

Eigen::VectorXd to_input(const FeatureMatrix & f)
{
  const auto flat = f.flat();
  return Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

namespace
{

struct Batch
{
  std::vector<std::size_t> members;
  std::vector<TripletIndex> triplets;
};

Batch sample_batch(
  const std::vector<std::vector<std::size_t>> & by_person, const TrainConfig & config,
  std::mt19937_64 & rng)
{
  const std::size_t n_persons = by_person.size();
  const std::size_t p_count = std::min(std::max<std::size_t>(config.persons_per_batch, 2), n_persons);
  const std::size_t k_count = std::max<std::size_t>(config.batch_size / p_count, 2);

  std::vector<std::size_t> persons(n_persons);
  for (std::size_t i = 0; i < n_persons; ++i) {
    persons[i] = i;
  }
  // Partial Fisher-Yates keeps the draw independent of the library's shuffle.
  for (std::size_t i = 0; i < p_count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_persons - 1);
    std::swap(persons[i], persons[pick(rng)]);
  }

  Batch batch;
  std::vector<std::size_t> owner;
  for (std::size_t pi = 0; pi < p_count; ++pi) {
    std::vector<std::size_t> pool = by_person[persons[pi]];
    const std::size_t take = std::min(k_count, pool.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      batch.members.push_back(pool[i]);
      owner.push_back(pi);
    }
  }
  const std::size_t m = batch.members.size();
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<std::size_t> negatives;
    for (std::size_t n = 0; n < m; ++n) {
      if (owner[n] != owner[a]) {
        negatives.push_back(n);
      }
    }
    for (std::size_t p = 0; p < m; ++p) {
      if (p == a || owner[p] != owner[a] || negatives.empty()) {
        continue;
      }
      std::uniform_int_distribution<std::size_t> pick(0, negatives.size() - 1);
      batch.triplets.push_back({a, p, negatives[pick(rng)]});
    }
  }
  return batch;
}

}  // namespace

TrainResult train_embedding(std::span<const LabeledFeature> dataset, const TrainConfig & config)
{
  std::map<PersonId, std::vector<std::size_t>> grouped;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    grouped[dataset[i].person].push_back(i);
  }
  std::vector<std::vector<std::size_t>> by_person;
  for (auto & [person, idx] : grouped) {
    if (idx.size() >= 2) {
      by_person.push_back(std::move(idx));
    }
  }
  if (by_person.size() < 2) {
    throw DataError("training needs at least 2 persons with 2 segments each");
  }
  if (config.layer_sizes.empty() ||
      static_cast<std::size_t>(config.layer_sizes.front()) != dataset.front().features.flat().size())
  {
    throw std::invalid_argument("first layer size must equal the feature dimension");
  }

  const auto dim = static_cast<Eigen::Index>(config.layer_sizes.front());
  const auto n = static_cast<Eigen::Index>(dataset.size());
  Eigen::MatrixXd inputs(dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto & f = dataset[static_cast<std::size_t>(i)].features;
    if (f.flat().size() != static_cast<std::size_t>(dim)) {
      throw DataError("feature matrices have inconsistent shapes");
    }
    inputs.col(i) = to_input(f);
  }
  const Eigen::VectorXd mean = inputs.rowwise().mean();
  const Eigen::VectorXd var = (inputs.colwise() - mean).array().square().rowwise().mean();
  const Eigen::VectorXd scale = (var.array() > 1e-12).select(var.array().sqrt().inverse(), 1.0);

  TrainResult result;
  result.net = EmbeddingNet(config.layer_sizes, config.seed);
  result.net.set_input_normalization(mean, scale);

  std::mt19937_64 rng(config.seed ^ 0x5DEECE66DULL);
  std::vector<double> params = result.net.flatten_params();
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad;
  const std::size_t batches_per_epoch =
    std::max<std::size_t>(1, (dataset.size() + config.batch_size - 1) / std::max<std::size_t>(config.batch_size, 1));

  double lr = config.learning_rate;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch > 0 && config.decay_every > 0 && epoch % config.decay_every == 0) {
      lr *= config.lr_decay;
    }
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const Batch batch = sample_batch(by_person, config, rng);
      Eigen::MatrixXd x(dim, static_cast<Eigen::Index>(batch.members.size()));
      for (std::size_t i = 0; i < batch.members.size(); ++i) {
        x.col(static_cast<Eigen::Index>(i)) = inputs.col(static_cast<Eigen::Index>(batch.members[i]));
      }
      epoch_loss += triplet_batch_loss(result.net, x, batch.triplets, config.margin, &grad);
      for (std::size_t k = 0; k < params.size(); ++k) {
        velocity[k] = config.momentum * velocity[k] - lr * grad[k];
        params[k] += velocity[k];
      }
      result.net.set_params(params);
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches_per_epoch));
  }
  result.final_loss = result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back();
  return result;
}

double p1_from_embeddings(const Eigen::VectorXd & a, const Eigen::VectorXd & b)
{
  return std::clamp((a.dot(b) + 1.0) / 2.0, 0.0, 1.0);
}

double p1_similarity(
  const HumanSegment & a, const HumanSegment & b, const GmmGrid & grid, const EmbeddingNet & net,
  double body_scale)
{
  const Eigen::VectorXd ea = net.embed(fisher_vector(a, grid, body_scale));
  const Eigen::VectorXd eb = net.embed(fisher_vector(b, grid, body_scale));
  return p1_from_embeddings(ea, eb);
}

double segment_height(const HumanSegment & segment)
{
  if (segment.points.empty()) {
    throw DataError("cannot measure the height of an empty segment");
  }
  std::vector<double> z;
  z.reserve(segment.points.size());
  for (const auto & p : segment.points) {
    z.push_back(p.z);
  }
  std::sort(z.begin(), z.end());
  const double pos = 0.95 * static_cast<double>(z.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, z.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return z[lo] + frac * (z[hi] - z[lo]);
}

double p1_height_value(double ha, double hb, double sigma_h)
{
  if (!(sigma_h > 0.0)) {
    throw std::invalid_argument("sigma_h must be positive");
  }
  const double d = ha - hb;
  return std::exp(-d * d / (2.0 * sigma_h * sigma_h));
}

double p1_height(const HumanSegment & a, const HumanSegment & b, double sigma_h)
{
  return p1_height_value(segment_height(a), segment_height(b), sigma_h);
}

Signature make_signature(const SubTrajectory & tr, const AppearanceModel * model)
{
  Signature sig;
  if (tr.segments.empty()) {
    return sig;
  }
  double height_sum = 0.0;
  for (const auto & seg : tr.segments) {
    height_sum += segment_height(seg);
  }
  sig.height = height_sum / static_cast<double>(tr.segments.size());
  if (model && model->net.layer_count() > 0) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model->net.output_dim()));
    for (const auto & seg : tr.segments) {
      sum += model->net.embed(fisher_vector(seg, model->grid, model->body_scale));
    }
    const double norm = sum.norm();
    if (norm > 0.0) {
      sig.embedding = sum / norm;
    }
  }
  return sig;
}

namespace
{

constexpr char kMagic[8] = {'T', 'R', 'J', 'L', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

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
    throw DataError("truncated model file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_model(const AppearanceModel & model, std::ostream & out)
{
  out.write(kMagic, sizeof(kMagic));
  write_le<std::uint32_t>(out, kFormatVersion);
  const auto & sizes = model.net.layer_sizes();
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  }
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.grid.size()));
  write_le<double>(out, model.grid.sigma());
  write_le<double>(out, model.body_scale);
  for (std::size_t c = 0; c < model.grid.size(); ++c) {
    const Point3 & m = model.grid.means()[c];
    write_le<double>(out, m.x);
    write_le<double>(out, m.y);
    write_le<double>(out, m.z);
    write_le<double>(out, model.grid.weights()[c]);
  }
  const bool has_norm = model.net.input_mean().size() != 0;
  write_le<std::uint32_t>(out, has_norm ? 1U : 0U);
  if (has_norm) {
    for (Eigen::Index i = 0; i < model.net.input_mean().size(); ++i) {
      write_le<double>(out, model.net.input_mean()(i));
    }
    for (Eigen::Index i = 0; i < model.net.input_scale().size(); ++i) {
      write_le<double>(out, model.net.input_scale()(i));
    }
  }
  for (double v : model.net.flatten_params()) {
    write_le<double>(out, v);
  }
  if (!out) {
    throw std::runtime_error("failed to write model");
  }
}

AppearanceModel load_model(std::istream & in)
{
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a trajlink model file");
  }
  const auto version = read_le<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const auto n_sizes = read_le<std::uint32_t>(in);
  if (n_sizes < 2 || n_sizes > 64) {
    throw DataError("invalid layer count in model file");
  }
  std::vector<int> sizes;
  for (std::uint32_t i = 0; i < n_sizes; ++i) {
    const auto s = read_le<std::uint32_t>(in);
    if (s == 0 || s > (1U << 24)) {
      throw DataError("invalid layer size in model file");
    }
    sizes.push_back(static_cast<int>(s));
  }
  const auto n_comp = read_le<std::uint32_t>(in);
  if (n_comp == 0 || n_comp > (1U << 20)) {
    throw DataError("invalid GMM size in model file");
  }
  const double sigma = read_le<double>(in);
  const double body_scale = read_le<double>(in);
  std::vector<Point3> means;
  std::vector<double> weights;
  for (std::uint32_t c = 0; c < n_comp; ++c) {
    Point3 m;
    m.x = read_le<double>(in);
    m.y = read_le<double>(in);
    m.z = read_le<double>(in);
    means.push_back(m);
    weights.push_back(read_le<double>(in));
  }
  AppearanceModel model{GmmGrid(std::move(means), sigma, std::move(weights)), body_scale, EmbeddingNet(sizes, 0)};
  if (static_cast<std::size_t>(sizes.front()) != FeatureMatrix::kRows * n_comp) {
    throw DataError("network input size does not match the GMM");
  }
  if (read_le<std::uint32_t>(in) == 1U) {
    Eigen::VectorXd mean(sizes.front());
    Eigen::VectorXd scale(sizes.front());
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
      mean(i) = read_le<double>(in);
    }
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
      scale(i) = read_le<double>(in);
    }
    model.net.set_input_normalization(std::move(mean), std::move(scale));
  }
  std::vector<double> params(model.net.parameter_count());
  for (double & v : params) {
    v = read_le<double>(in);
    if (!std::isfinite(v)) {
      throw DataError("non-finite parameter in model file");
    }
  }
  model.net.set_params(params);
  return model;
}

void save_model(const AppearanceModel & model, const std::string & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  save_model(model, out);
}

AppearanceModel load_model(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open model file " + path);
  }
  return load_model(in);
}

}  // namespace trajlink

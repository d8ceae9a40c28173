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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trajlink/fisher_vector.hpp"
#include "trajlink/types.hpp"

namespace trajlink
{

/// Fully connected network, ReLU on hidden layers, L2-normalized output.
class EmbeddingNet
{
public:
  EmbeddingNet() = default;
  /// He-initialized weights, zero biases.
  EmbeddingNet(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int> & layer_sizes() const { return sizes_; }
  std::size_t input_dim() const { return sizes_.empty() ? 0 : static_cast<std::size_t>(sizes_.front()); }
  std::size_t output_dim() const { return sizes_.empty() ? 0 : static_cast<std::size_t>(sizes_.back()); }
  std::size_t layer_count() const { return weights_.size(); }

  Eigen::MatrixXd & weight(std::size_t layer) { return weights_[layer]; }
  const Eigen::MatrixXd & weight(std::size_t layer) const { return weights_[layer]; }
  Eigen::VectorXd & bias(std::size_t layer) { return biases_[layer]; }
  const Eigen::VectorXd & bias(std::size_t layer) const { return biases_[layer]; }

  std::size_t parameter_count() const;
  /// Parameters in layer order: W0 (row-major), b0, W1, b1, ...
  std::vector<double> flatten_params() const;
  void set_params(std::span<const double> params);

  /// Fixed per-feature standardization (x - mean) * scale applied before the
  /// first layer. Empty vectors mean identity.
  void set_input_normalization(Eigen::VectorXd mean, Eigen::VectorXd scale);
  const Eigen::VectorXd & input_mean() const { return input_mean_; }
  const Eigen::VectorXd & input_scale() const { return input_scale_; }
  /// Applies the input standardization column-wise.
  Eigen::MatrixXd normalize_inputs(const Eigen::MatrixXd & x) const;

  /// Unnormalized network output for one input.
  Eigen::VectorXd forward(const Eigen::VectorXd & x) const;
  /// Unit-norm embedding; throws DataError("degenerate norm") on a zero output.
  Eigen::VectorXd embed(const Eigen::VectorXd & x) const;
  Eigen::VectorXd embed(const FeatureMatrix & f) const;

  bool operator==(const EmbeddingNet & other) const;

private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  Eigen::VectorXd input_mean_;
  Eigen::VectorXd input_scale_;
};

/// max(0, margin - cos(a, p) + cos(a, n)) for unit vectors.
double triplet_loss(
  const Eigen::VectorXd & a, const Eigen::VectorXd & p, const Eigen::VectorXd & n, double margin);

struct TripletIndex
{
  std::size_t anchor;
  std::size_t positive;
  std::size_t negative;
};

/// Mean triplet loss over `triplets` drawn from the columns of `inputs`, and
/// its gradient with respect to flatten_params() when `grad` is non-null.
double triplet_batch_loss(
  const EmbeddingNet & net, const Eigen::MatrixXd & inputs, std::span<const TripletIndex> triplets,
  double margin, std::vector<double> * grad);

struct TrainConfig
{
  std::vector<int> layer_sizes{1080, 256, 128, 64};
  double margin = 0.2;
  std::size_t batch_size = 64;
  std::size_t persons_per_batch = 16;
  std::size_t epochs = 50;
  double learning_rate = 1e-2;
  double lr_decay = 0.5;
  std::size_t decay_every = 20;
  double momentum = 0.9;
  std::uint64_t seed = 1;
};

struct LabeledFeature
{
  PersonId person{kUnknownPerson};
  FeatureMatrix features;
};

struct TrainResult
{
  EmbeddingNet net;
  double final_loss{0.0};
  std::vector<double> epoch_loss;
};

/// Seeded mini-batch SGD on within-batch triplets. Each batch draws up to
/// persons_per_batch identities and batch_size / persons samples of each.
TrainResult train_embedding(std::span<const LabeledFeature> dataset, const TrainConfig & config);

/// Input vector of a feature matrix (row-major flattening).
Eigen::VectorXd to_input(const FeatureMatrix & f);

/// (cos + 1) / 2 of two embeddings, clamped to [0, 1].
double p1_from_embeddings(const Eigen::VectorXd & a, const Eigen::VectorXd & b);

/// Segment similarity through features and embedding.
double p1_similarity(
  const HumanSegment & a, const HumanSegment & b, const GmmGrid & grid, const EmbeddingNet & net,
  double body_scale = 2.0);

/// 95th percentile (linear interpolation) of the segment's z values.
double segment_height(const HumanSegment & segment);

/// exp(-(ha - hb)^2 / (2 sigma_h^2)).
double p1_height_value(double ha, double hb, double sigma_h);
double p1_height(const HumanSegment & a, const HumanSegment & b, double sigma_h);

/// Appearance summary of a sub-trajectory used by the matcher.
struct Signature
{
  std::optional<Eigen::VectorXd> embedding;  // mean of segment embeddings, re-normalized
  std::optional<double> height;              // mean of segment heights
};

/// Self-contained appearance model: GMM grid plus trained network.
struct AppearanceModel
{
  GmmGrid grid = GmmGrid::regular();
  double body_scale = 2.0;
  EmbeddingNet net;
};

/// Embeds every segment of the sub-trajectory and averages; heights likewise.
Signature make_signature(const SubTrajectory & tr, const AppearanceModel * model);

void save_model(const AppearanceModel & model, std::ostream & out);
AppearanceModel load_model(std::istream & in);
void save_model(const AppearanceModel & model, const std::string & path);
AppearanceModel load_model(const std::string & path);

}  // namespace trajlink

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

#include <cstddef>
#include <span>
#include <vector>

#include "trajlink/types.hpp"

namespace trajlink
{

/// Fixed GMM whose means sit on a regular 3D grid over a normalized body box.
/// All components share one isotropic sigma and equal weights.
class GmmGrid
{
public:
  /// nx*ny*nz means at cell centres of [-0.5,0.5]^2 x [0,1].
  static GmmGrid regular(int nx = 3, int ny = 3, int nz = 6, double sigma = 0.25);

  GmmGrid(std::vector<Point3> means, double sigma, std::vector<double> weights);

  std::size_t size() const { return means_.size(); }
  const std::vector<Point3> & means() const { return means_; }
  const std::vector<double> & weights() const { return weights_; }
  /// Softmax logits alpha_c with w_c = exp(alpha_c) / sum_j exp(alpha_j).
  const std::vector<double> & alphas() const { return alphas_; }
  double sigma() const { return sigma_; }

private:
  std::vector<Point3> means_;
  std::vector<double> weights_;
  std::vector<double> alphas_;
  double sigma_;
};

/// Row-major 20 x C signature matrix.
///
/// Row layout (per component column c):
///   0      sum_t  G_alpha / T
///   1..3   sum_t  G_mu (x, y, z) / T
///   4..6   sum_t  G_sigma (x, y, z) / T
///   7      max_t  G_alpha
///   8..10  max_t  G_mu
///   11..13 max_t  G_sigma
///   14..16 min_t  G_mu
///   17..19 min_t  G_sigma
class FeatureMatrix
{
public:
  static constexpr std::size_t kRows = 20;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
  : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double & operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  bool operator==(const FeatureMatrix &) const = default;

private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<double> data_;
};

/// Isotropic Gaussian density of component c at p (D = 3).
double component_likelihood(const Point3 & p, const GmmGrid & grid, std::size_t c);

/// Posterior gamma_c(p) = w_c u_c(p) / sum_j w_j u_j(p), computed in log space.
std::vector<double> responsibilities(const Point3 & p, const GmmGrid & grid);

/// Maps segment points into the grid's body box: XY centred on the segment
/// centroid, all axes divided by body_scale (z measured from the floor).
std::vector<Point3> normalize_segment(const HumanSegment & segment, double body_scale = 2.0);

/// Fisher-vector signature of already-normalized points.
FeatureMatrix fisher_vector(std::span<const Point3> normalized_points, const GmmGrid & grid);

/// Normalizes the segment and computes its signature.
FeatureMatrix fisher_vector(const HumanSegment & segment, const GmmGrid & grid, double body_scale = 2.0);

}  // namespace trajlink

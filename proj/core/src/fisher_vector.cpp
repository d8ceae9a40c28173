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

#include "trajlink/fisher_vector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace trajlink
{

GmmGrid GmmGrid::regular(int nx, int ny, int nz, double sigma)
{
  if (nx <= 0 || ny <= 0 || nz <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  std::vector<Point3> means;
  means.reserve(static_cast<std::size_t>(nx * ny * nz));
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        means.push_back({
          -0.5 + (i + 0.5) / nx,
          -0.5 + (j + 0.5) / ny,
          (k + 0.5) / nz});
      }
    }
  }
  const std::size_t c = means.size();
  return GmmGrid(std::move(means), sigma, std::vector<double>(c, 1.0 / static_cast<double>(c)));
}

GmmGrid::GmmGrid(std::vector<Point3> means, double sigma, std::vector<double> weights)
: means_(std::move(means)), weights_(std::move(weights)), sigma_(sigma)
{
  if (means_.empty() || means_.size() != weights_.size()) {
    throw std::invalid_argument("GMM needs one weight per mean");
  }
  if (!(sigma_ > 0.0)) {
    throw std::invalid_argument("GMM sigma must be positive");
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (double & w : weights_) {
    if (!(w > 0.0)) {
      throw std::invalid_argument("GMM weights must be positive");
    }
    w /= total;
  }
  alphas_.reserve(weights_.size());
  for (double w : weights_) {
    alphas_.push_back(std::log(w));
  }
}

namespace
{

double squared_distance(const Point3 & a, const Point3 & b)
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

// Neumaier compensated accumulator.
struct CompensatedSum
{
  double sum = 0.0;
  double carry = 0.0;

  void add(double v)
  {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

void fill_responsibilities(const Point3 & p, const GmmGrid & grid, std::vector<double> & gamma)
{
  const std::size_t c_count = grid.size();
  gamma.resize(c_count);
  const double inv_two_var = 1.0 / (2.0 * grid.sigma() * grid.sigma());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < c_count; ++c) {
    // The Gaussian normalizer is shared by all components and cancels.
    gamma[c] = std::log(grid.weights()[c]) - squared_distance(p, grid.means()[c]) * inv_two_var;
    max_log = std::max(max_log, gamma[c]);
  }
  double total = 0.0;
  for (double & g : gamma) {
    g = std::exp(g - max_log);
    total += g;
  }
  for (double & g : gamma) {
    g /= total;
  }
}

}  // namespace

double component_likelihood(const Point3 & p, const GmmGrid & grid, std::size_t c)
{
  if (c >= grid.size()) {
    throw std::out_of_range("GMM component index out of range");
  }
  const double var = grid.sigma() * grid.sigma();
  const double norm = std::pow(2.0 * std::numbers::pi, -1.5) / (var * grid.sigma());
  return norm * std::exp(-0.5 * squared_distance(p, grid.means()[c]) / var);
}

std::vector<double> responsibilities(const Point3 & p, const GmmGrid & grid)
{
  std::vector<double> gamma;
  fill_responsibilities(p, grid, gamma);
  return gamma;
}

std::vector<Point3> normalize_segment(const HumanSegment & segment, double body_scale)
{
  if (!(body_scale > 0.0)) {
    throw std::invalid_argument("body scale must be positive");
  }
  std::vector<Point3> out;
  out.reserve(segment.points.size());
  // Sorted, compensated centroid so the result does not depend on point order.
  std::vector<Point3> sorted(segment.points.begin(), segment.points.end());
  std::sort(sorted.begin(), sorted.end());
  CompensatedSum sx;
  CompensatedSum sy;
  for (const auto & p : sorted) {
    sx.add(p.x);
    sy.add(p.y);
  }
  double cx = 0.0;
  double cy = 0.0;
  if (!sorted.empty()) {
    cx = sx.value() / static_cast<double>(sorted.size());
    cy = sy.value() / static_cast<double>(sorted.size());
  }
  for (const auto & p : segment.points) {
    out.push_back({(p.x - cx) / body_scale, (p.y - cy) / body_scale, p.z / body_scale});
  }
  return out;
}

FeatureMatrix fisher_vector(std::span<const Point3> normalized_points, const GmmGrid & grid)
{
  if (normalized_points.empty()) {
    throw DataError("cannot compute a fisher vector of an empty segment");
  }
  std::vector<Point3> points(normalized_points.begin(), normalized_points.end());
  std::sort(points.begin(), points.end());

  const std::size_t c_count = grid.size();
  const double sigma = grid.sigma();
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<CompensatedSum> sums(7 * c_count);
  std::vector<double> maxs(7 * c_count, -inf);
  std::vector<double> mins(7 * c_count, inf);
  std::vector<double> inv_sqrt_w(c_count), inv_sqrt_2w(c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    inv_sqrt_w[c] = 1.0 / std::sqrt(grid.weights()[c]);
    inv_sqrt_2w[c] = 1.0 / std::sqrt(2.0 * grid.weights()[c]);
  }

  std::vector<double> gamma;
  std::array<double, 7> g{};
  for (const auto & p : points) {
    fill_responsibilities(p, grid, gamma);
    for (std::size_t c = 0; c < c_count; ++c) {
      const Point3 & mu = grid.means()[c];
      const double d[3] = {(p.x - mu.x) / sigma, (p.y - mu.y) / sigma, (p.z - mu.z) / sigma};
      g[0] = (gamma[c] - grid.weights()[c]) * inv_sqrt_w[c];
      for (int k = 0; k < 3; ++k) {
        g[1 + k] = gamma[c] * d[k] * inv_sqrt_w[c];
        g[4 + k] = gamma[c] * (d[k] * d[k] - 1.0) * inv_sqrt_2w[c];
      }
      for (std::size_t r = 0; r < 7; ++r) {
        const std::size_t idx = r * c_count + c;
        sums[idx].add(g[r]);
        maxs[idx] = std::max(maxs[idx], g[r]);
        mins[idx] = std::min(mins[idx], g[r]);
      }
    }
  }

  const double inv_t = 1.0 / static_cast<double>(points.size());
  FeatureMatrix fm(FeatureMatrix::kRows, c_count);
  for (std::size_t c = 0; c < c_count; ++c) {
    for (std::size_t r = 0; r < 7; ++r) {
      fm(r, c) = sums[r * c_count + c].value() * inv_t;
      fm(7 + r, c) = maxs[r * c_count + c];
    }
    for (std::size_t r = 1; r < 7; ++r) {
      fm(13 + r, c) = mins[r * c_count + c];
    }
  }
  return fm;
}

FeatureMatrix fisher_vector(const HumanSegment & segment, const GmmGrid & grid, double body_scale)
{
  if (segment.points.empty()) {
    throw DataError("cannot compute a fisher vector of an empty segment");
  }
  const auto normalized = normalize_segment(segment, body_scale);
  return fisher_vector(normalized, grid);
}

}  // namespace trajlink

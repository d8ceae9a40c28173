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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace trajlink::oracle
{

std::vector<int> dbscan(std::span<const Point3> points, double eps, std::size_t min_pts)
{
  const std::size_t n = points.size();
  auto near = [&](std::size_t i, std::size_t j) {
    const double dx = points[i].x - points[j].x;
    const double dy = points[i].y - points[j].y;
    return std::sqrt(dx * dx + dy * dy) <= eps;
  };
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      count += near(i, j) ? 1 : 0;
    }
    core[i] = count >= min_pts;
  }
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || label[i] != -1) {
      continue;
    }
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (label[j] == -1 && near(p, j)) {
          label[j] = next;
          if (core[j]) {
            stack.push_back(j);
          }
        }
      }
    }
    ++next;
  }
  return label;
}

bool same_partition(std::span<const int> a, std::span<const int> b)
{
  if (a.size() != b.size()) {
    return false;
  }
  std::map<int, int> ab;
  std::map<int, int> ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) {
      return false;
    }
    if (a[i] < 0) {
      continue;
    }
    auto [it1, new1] = ab.emplace(a[i], b[i]);
    auto [it2, new2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) {
      return false;
    }
  }
  return true;
}

std::map<std::tuple<long long, long long, long long>, Point3> grid_centroids(
  std::span<const Point3> points, double cell)
{
  std::map<std::tuple<long long, long long, long long>, std::pair<Point3, int>> acc;
  for (const auto & p : points) {
    const auto key = std::make_tuple(
      static_cast<long long>(std::floor(p.x / cell)), static_cast<long long>(std::floor(p.y / cell)),
      static_cast<long long>(std::floor(p.z / cell)));
    auto & [sum, count] = acc[key];
    sum.x += p.x;
    sum.y += p.y;
    sum.z += p.z;
    ++count;
  }
  std::map<std::tuple<long long, long long, long long>, Point3> out;
  for (const auto & [key, v] : acc) {
    out[key] = {v.first.x / v.second, v.first.y / v.second, v.first.z / v.second};
  }
  return out;
}

namespace
{

void injections(
  const Eigen::MatrixXd & w, double tau, Eigen::Index row, std::vector<bool> & used, double value, int matched,
  double & best)
{
  if (row == w.rows()) {
    const double total = value + tau * static_cast<double>(w.rows() + w.cols() - matched);
    best = std::max(best, total);
    return;
  }
  injections(w, tau, row + 1, used, value, matched, best);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    if (used[static_cast<std::size_t>(c)] || std::isnan(w(row, c))) {
      continue;
    }
    used[static_cast<std::size_t>(c)] = true;
    injections(w, tau, row + 1, used, value + w(row, c), matched + 1, best);
    used[static_cast<std::size_t>(c)] = false;
  }
}

}  // namespace

double best_partial_injection(const Eigen::MatrixXd & w, double tau)
{
  std::vector<bool> used(static_cast<std::size_t>(w.cols()), false);
  double best = -std::numeric_limits<double>::infinity();
  injections(w, tau, 0, used, 0.0, 0, best);
  return best;
}

double best_permutation(const Eigen::MatrixXd & cost)
{
  std::vector<int> p(static_cast<std::size_t>(cost.rows()));
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      s += cost(static_cast<Eigen::Index>(i), p[i]);
    }
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

double invgamma_pdf(double x, double shape, double scale)
{
  if (x <= 0.0) {
    return 0.0;
  }
  return std::pow(scale, shape) / std::tgamma(shape) * std::pow(x, -shape - 1.0) * std::exp(-scale / x);
}

std::pair<double, double> grid_posterior_moments(double a, double b, std::span<const double> samples, double mu)
{
  // Unnormalized posterior over s = sigma^2 on a log-spaced grid.
  double ss = 0.0;
  for (double x : samples) {
    ss += (x - mu) * (x - mu);
  }
  const double n = static_cast<double>(samples.size());
  auto log_post = [&](double s) {
    return -(a + 1.0) * std::log(s) - b / s - 0.5 * n * std::log(s) - ss / (2.0 * s);
  };
  const int steps = 400000;
  const double lo = std::log(1e-4);
  const double hi = std::log(1e5);
  const double h = (hi - lo) / steps;
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const double s = std::exp(lo + h * i);
    peak = std::max(peak, log_post(s));
  }
  double z = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double u = lo + h * i;
    const double s = std::exp(u);
    const double wgt = (i == 0 || i == steps) ? 0.5 : 1.0;
    // ds = s du
    const double p = wgt * std::exp(log_post(s) - peak) * s;
    z += p;
    m1 += p * s;
    m2 += p * s * s;
  }
  const double mean = m1 / z;
  return {mean, m2 / z - mean * mean};
}

double central_difference(
  const std::function<double(const std::vector<double> &)> & f, std::vector<double> x, std::size_t i, double h)
{
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

Eigen::VectorXd random_unit(std::mt19937_64 & rng, int n)
{
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = g(rng);
  }
  return v.normalized();
}

}  // namespace trajlink::oracle

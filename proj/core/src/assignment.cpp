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

#include "trajlink/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace trajlink
{

namespace
{

struct DualSolution
{
  std::vector<int> row_to_col;
  std::vector<double> u;  // row potentials, 0-based
  std::vector<double> v;  // column potentials, 0-based
};

// Shortest augmenting path Hungarian method with row/column potentials.
DualSolution hungarian(const Eigen::MatrixXd & cost)
{
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  DualSolution sol;
  sol.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) {
      sol.row_to_col[p[j] - 1] = j - 1;
    }
  }
  sol.u.assign(u.begin() + 1, u.end());
  sol.v.assign(v.begin() + 1, v.end());
  return sol;
}

// Every optimal assignment lives on the zero-reduced-cost edges of an optimal
// dual. Walk rows in order and move each one to its smallest tight column
// that still admits a perfect matching of the remaining rows.
void lexicographic_refine(const Eigen::MatrixXd & cost, DualSolution & sol)
{
  const int n = static_cast<int>(cost.rows());
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(cost(i, j)));
    }
  }
  const double tol = 64.0 * n * std::numeric_limits<double>::epsilon() * scale;
  auto tight = [&](int i, int j) { return cost(i, j) - sol.u[i] - sol.v[j] <= tol; };

  auto & r2c = sol.row_to_col;
  std::vector<int> c2r(n);
  for (int i = 0; i < n; ++i) {
    c2r[r2c[i]] = i;
  }
  std::vector<char> fixed_col(n, 0);
  std::vector<int> parent(n);
  std::vector<char> seen_col(n);
  std::deque<int> queue;

  for (int i = 0; i < n; ++i) {
    const int c = r2c[i];
    for (int j = 0; j < c; ++j) {
      if (fixed_col[j] || !tight(i, j)) {
        continue;
      }
      const int r = c2r[j];
      // Alternating path from row r to the column c that row i releases.
      std::fill(seen_col.begin(), seen_col.end(), 0);
      queue.assign(1, r);
      bool found = false;
      while (!queue.empty() && !found) {
        const int x = queue.front();
        queue.pop_front();
        for (int y = 0; y < n; ++y) {
          if (y == j || fixed_col[y] || seen_col[y] || !tight(x, y)) {
            continue;
          }
          seen_col[y] = 1;
          parent[y] = x;
          if (y == c) {
            found = true;
            break;
          }
          queue.push_back(c2r[y]);
        }
      }
      if (!found) {
        continue;
      }
      int y = c;
      while (true) {
        const int x = parent[y];
        const int prev = r2c[x];
        r2c[x] = y;
        c2r[y] = x;
        if (x == r) {
          break;
        }
        y = prev;
      }
      r2c[i] = j;
      c2r[j] = i;
      break;
    }
    fixed_col[r2c[i]] = 1;
  }
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd & cost)
{
  if (cost.rows() != cost.cols()) {
    throw std::invalid_argument("assignment cost matrix must be square");
  }
  Assignment out;
  if (cost.rows() == 0) {
    return out;
  }
  DualSolution sol = hungarian(cost);
  lexicographic_refine(cost, sol);
  out.row_to_col = std::move(sol.row_to_col);
  for (std::size_t i = 0; i < out.row_to_col.size(); ++i) {
    out.total_cost += cost(static_cast<Eigen::Index>(i), out.row_to_col[i]);
  }
  return out;
}

}  // namespace trajlink

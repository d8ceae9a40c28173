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

#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trajlink/assignment.hpp"

namespace trajlink
{
namespace
{

TEST(Assignment, DominantDiagonal)
{
  Eigen::MatrixXd cost(2, 2);
  cost << 0.1, 0.9, 0.8, 0.2;
  const auto a = solve_assignment(cost);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{0, 1}));
  EXPECT_NEAR(a.total_cost, 0.3, 1e-12);
}

TEST(Assignment, EmptyMatrix)
{
  const auto a = solve_assignment(Eigen::MatrixXd(0, 0));
  EXPECT_TRUE(a.row_to_col.empty());
  EXPECT_EQ(a.total_cost, 0.0);
}

TEST(Assignment, RejectsNonSquare)
{
  EXPECT_THROW(solve_assignment(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST(Assignment, AllEqualCostsGiveIdentity)
{
  const auto a = solve_assignment(Eigen::MatrixXd::Constant(5, 5, 0.7));
  EXPECT_EQ(a.row_to_col, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Assignment, TiesResolveLexicographically)
{
  Eigen::MatrixXd cost(3, 3);
  cost << 1, 0, 0,
          0, 1, 0,
          0, 0, 1;
  // Optimal permutations: (1,2,0) and (2,0,1); the smaller wins.
  EXPECT_EQ(solve_assignment(cost).row_to_col, (std::vector<int>{1, 2, 0}));
}

TEST(Assignment, MatchesPermutationSearch)
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 7;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cost(i, j) = trial % 3 == 0 ? std::round(u(rng) * 3.0) : u(rng);
      }
    }
    const auto a = solve_assignment(cost);
    std::set<int> cols(a.row_to_col.begin(), a.row_to_col.end());
    ASSERT_EQ(cols.size(), static_cast<std::size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += cost(i, a.row_to_col[static_cast<std::size_t>(i)]);
    }
    EXPECT_NEAR(total, a.total_cost, 1e-12);
    EXPECT_NEAR(total, oracle::best_permutation(cost), 1e-12);
  }
}

TEST(Assignment, LexicographicAmongOptimaMatchesEnumeration)
{
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> u(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        cost(i, j) = u(rng);
      }
    }
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    double best = 1e300;
    std::vector<int> best_p;
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += cost(i, p[static_cast<std::size_t>(i)]);
      }
      if (s < best - 1e-12) {
        best = s;
        best_p = p;
      }
    } while (std::next_permutation(p.begin(), p.end()));
    EXPECT_EQ(solve_assignment(cost).row_to_col, best_p);
  }
}

}  // namespace
}  // namespace trajlink

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

#include <vector>

#include <Eigen/Core>

namespace trajlink
{

struct Assignment
{
  std::vector<int> row_to_col;
  double total_cost{0.0};
};

/// Min-cost perfect assignment on a square cost matrix (Hungarian method,
/// O(n^3)). Among all optimal assignments the lexicographically smallest
/// row_to_col vector is returned, so ties resolve to the lowest row/column
/// indices.
Assignment solve_assignment(const Eigen::MatrixXd & cost);

}  // namespace trajlink

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

#include <random>

#include <benchmark/benchmark.h>

#include "trajlink/assignment.hpp"

namespace
{

void BM_SolveAssignment(benchmark::State & state)
{
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < cost.size(); ++i) {
    cost.data()[i] = u(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(trajlink::solve_assignment(cost));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveAssignment)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

}  // namespace

BENCHMARK_MAIN();

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

#include "trajlink/fisher_vector.hpp"

namespace
{

trajlink::HumanSegment random_segment(std::size_t n)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xy(-0.25, 0.25);
  std::uniform_real_distribution<double> z(0.0, 1.8);
  trajlink::HumanSegment seg;
  for (std::size_t i = 0; i < n; ++i) {
    seg.points.push_back({xy(rng), xy(rng), z(rng)});
  }
  return seg;
}

void BM_FisherVector(benchmark::State & state)
{
  const auto seg = random_segment(static_cast<std::size_t>(state.range(0)));
  const auto grid = trajlink::GmmGrid::regular();
  for (auto _ : state) {
    benchmark::DoNotOptimize(trajlink::fisher_vector(seg, grid));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FisherVector)->RangeMultiplier(4)->Range(64, 4096);

}  // namespace

BENCHMARK_MAIN();

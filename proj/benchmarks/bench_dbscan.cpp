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

#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "trajlink/geometry.hpp"

namespace
{

// Several person-sized blobs scattered over a 10 m floor.
std::vector<trajlink::Point3> blobs(std::size_t n)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> centre(0.0, 10.0);
  std::normal_distribution<double> spread(0.0, 0.12);
  std::uniform_real_distribution<double> z(0.0, 1.8);
  std::vector<trajlink::Point3> centres(8);
  for (auto & c : centres) {
    c = {centre(rng), centre(rng), 0.0};
  }
  std::vector<trajlink::Point3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const auto & c = centres[i % centres.size()];
    pts.push_back({c.x + spread(rng), c.y + spread(rng), z(rng)});
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

void BM_Dbscan(benchmark::State & state)
{
  const auto pts = blobs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(trajlink::dbscan_xy(pts, 0.2, 5));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Dbscan)->RangeMultiplier(4)->Range(256, 16384);

}  // namespace

BENCHMARK_MAIN();

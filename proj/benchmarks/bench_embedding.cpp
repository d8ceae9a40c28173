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

#include "trajlink/embedding.hpp"

namespace
{

Eigen::VectorXd random_input(std::size_t n)
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = g(rng);
  }
  return x;
}

void BM_Embed(benchmark::State & state)
{
  const trajlink::EmbeddingNet net(trajlink::TrainConfig{}.layer_sizes, 1);
  const auto x = random_input(net.input_dim());
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.embed(x));
  }
}
BENCHMARK(BM_Embed);

void BM_TripletBatchGradient(benchmark::State & state)
{
  const trajlink::EmbeddingNet net(trajlink::TrainConfig{}.layer_sizes, 1);
  const auto cols = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd inputs(static_cast<Eigen::Index>(net.input_dim()), cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    inputs.col(c) = random_input(net.input_dim()) * (1.0 + 0.01 * static_cast<double>(c));
  }
  std::vector<trajlink::TripletIndex> triplets;
  const auto n = static_cast<std::size_t>(cols);
  for (std::size_t k = 0; k < n; ++k) {
    triplets.push_back({k, (k + 1) % n, (k + 2) % n});
  }
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trajlink::triplet_batch_loss(net, inputs, triplets, 0.2, &grad));
  }
}
BENCHMARK(BM_TripletBatchGradient)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();

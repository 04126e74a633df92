// Copyright 2026 The privlens Authors.
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

// Rank-sum tests and sampling. The exact path is exponential in n, so its
// sizes stop at the switch-over limit.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "privlens/stats.hpp"

namespace {

using namespace privlens;

std::vector<double> draw(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::geometric_distribution<int> d(0.05);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_MannWhitneyExact(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = draw(n, 1), y = draw(n, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(stats::mann_whitney(x, y, stats::Alternative::kLess, stats::MethodPolicy::kExact));
}
BENCHMARK(BM_MannWhitneyExact)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_MannWhitneyNormal(benchmark::State& state) {
  const auto x = draw(static_cast<std::size_t>(state.range(0)), 3);
  const auto y = draw(static_cast<std::size_t>(state.range(1)), 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(stats::mann_whitney(x, y, stats::Alternative::kLess, stats::MethodPolicy::kNormal));
}
BENCHMARK(BM_MannWhitneyNormal)->Args({269, 382})->Args({213, 380})->Args({10000, 10000});

void BM_SampleSize(benchmark::State& state) {
  std::size_t n = 1;
  for (auto _ : state) benchmark::DoNotOptimize(stats::sample_size(n++ % 100000 + 1));
}
BENCHMARK(BM_SampleSize);

void BM_SampleIndices(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stats::sample_indices(896, 269, 42));
}
BENCHMARK(BM_SampleIndices);

}  // namespace

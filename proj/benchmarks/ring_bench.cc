/*
 * Copyright 2026 The airmk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "airmk/ring.h"
#include "airmk/seed_stream.h"

namespace airmk {
namespace {

RingParamsPtr BenchParams(std::size_t n) {
  return MakeParams(n, Pow2(109) - 1, Pow2(40), 3.2, 3.2, 40);
}

void BM_RingMul(benchmark::State& state) {
  const auto params = BenchParams(static_cast<std::size_t>(state.range(0)));
  SeedStream seed(MasterSeedFromU64(1), {"bench", "ring"});
  const RingElem a = SampleUniform(params, seed);
  const RingElem b = SampleUniform(params, seed);
  for (auto _ : state) benchmark::DoNotOptimize(RingMul(a, b));
}
BENCHMARK(BM_RingMul)->RangeMultiplier(2)->Range(256, 8192)->Unit(benchmark::kMicrosecond);

void BM_RingMulSchoolbook(benchmark::State& state) {
  const auto params = BenchParams(static_cast<std::size_t>(state.range(0)));
  SeedStream seed(MasterSeedFromU64(1), {"bench", "ring"});
  const RingElem a = SampleUniform(params, seed);
  const RingElem b = SampleUniform(params, seed);
  for (auto _ : state) benchmark::DoNotOptimize(RingMulSchoolbook(a, b));
}
BENCHMARK(BM_RingMulSchoolbook)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMicrosecond);

void BM_SampleGaussian(benchmark::State& state) {
  const auto params = BenchParams(4096);
  SeedStream seed(MasterSeedFromU64(1), {"bench", "gauss"});
  for (auto _ : state) benchmark::DoNotOptimize(SampleGaussian(params, 3.2, seed));
}
BENCHMARK(BM_SampleGaussian)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace airmk

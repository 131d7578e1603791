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

#include <string>
#include <vector>

#include "airmk/profile.h"
#include "airmk/protocol.h"

namespace airmk {
namespace {

void RoundBench(benchmark::State& state, const std::string& profile, Mode mode) {
  Profile p = GetProfile(profile);
  ProtocolConfig cfg = p.MakeProtocolConfig(mode);
  cfg.workers = static_cast<std::size_t>(state.range(0));
  const ProtocolState ps(p.MakeRingParams(), p.MakeChannel(), cfg, MasterSeedFromU64(1));
  const std::vector<double> delta_f(p.num_devices, 0.25);
  std::uint64_t round = 1;
  for (auto _ : state) benchmark::DoNotOptimize(RunRound(ps, delta_f, round++));
}

void BM_RoundCiToy(benchmark::State& state) {
  RoundBench(state, "ci-toy", Mode::kEncryptedOta);
}
BENCHMARK(BM_RoundCiToy)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RoundPaper4096(benchmark::State& state) {
  RoundBench(state, "paper-4096", Mode::kEncryptedOta);
}
BENCHMARK(BM_RoundPaper4096)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_RoundPaper4096Unencrypted(benchmark::State& state) {
  RoundBench(state, "paper-4096", Mode::kUnencrypted);
}
BENCHMARK(BM_RoundPaper4096Unencrypted)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace airmk

BENCHMARK_MAIN();

// Copyright 2026 The uwbpos Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "uwbpos/channel.hpp"
#include "uwbpos/features.hpp"
#include "uwbpos/frontend.hpp"
#include "uwbpos/knn_kl.hpp"
#include "uwbpos/marcum.hpp"
#include "uwbpos/nn/attention.hpp"
#include "uwbpos/rng.hpp"

namespace {

using namespace uwbpos;

void BM_DrawChannel(benchmark::State& state) {
  const GeometryConfig geometry;
  const ScenarioConfig scenario;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const Vec3 target = sample_target(seed, geometry);
    benchmark::DoNotOptimize(draw_channel(++seed, target, geometry, scenario));
  }
}
BENCHMARK(BM_DrawChannel);

// Synthesis plus energy detection of one sensor frame.
void BM_EnergyDetect(benchmark::State& state) {
  SignalConfig signal;
  signal.integration_s = static_cast<double>(state.range(0)) * 1e-9;
  const GeometryConfig geometry;
  const ScenarioConfig scenario;
  const ChannelRealization ch = draw_channel(7, sample_target(3, geometry), geometry, scenario);
  const Waveform r = synthesize_received(ch.sensors[0], signal, 1e-12, 11);
  for (auto _ : state) benchmark::DoNotOptimize(energy_detect(r, signal));
}
BENCHMARK(BM_EnergyDetect)->Arg(2)->Arg(4);

void BM_ExtractFeatures(benchmark::State& state) {
  Rng rng(5);
  std::exponential_distribution<double> e(1.0);
  std::vector<PdpVector> pdps(12, PdpVector(100));
  for (auto& p : pdps)
    for (double& v : p) v = e(rng);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(pdps, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ExtractFeatures)->Arg(5)->Arg(10);

void BM_MarcumQ(benchmark::State& state) {
  const double m = static_cast<double>(state.range(0));
  double a = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(marcum_q(m, a, 3.0));
    a = a < 8.0 ? a + 0.37 : 0.5;
  }
}
BENCHMARK(BM_MarcumQ)->Arg(1)->Arg(4);

void BM_KnnKl(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix p(n, 10), q(n, 10);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      p(i, j) = g(rng);
      q(i, j) = g(rng) + 0.5;
    }
  for (auto _ : state) benchmark::DoNotOptimize(knn_kl(p, q, 30, 10.0));
}
BENCHMARK(BM_KnnKl)->Arg(375)->Arg(2000);

// Forward plus backward of the attention layer on a batch of 8 maps.
void BM_Attention(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  nn::SelfAttention layer("sa", 32, 4, n, 3);
  layer.omega().value(0, 0) = 0.5;
  Rng rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  nn::Mat x(8, 32 * n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  const nn::Mat up = nn::Mat::Ones(8, 32 * n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layer.forward(x));
    benchmark::DoNotOptimize(layer.backward(up));
  }
}
BENCHMARK(BM_Attention)->Arg(600)->Arg(1200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

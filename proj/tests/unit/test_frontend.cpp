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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "uwbpos/error.hpp"
#include "uwbpos/frontend.hpp"

namespace uwbpos {
namespace {

TEST(SignalConfig, DerivedQuantities) {
  SignalConfig s;
  EXPECT_EQ(s.samples_per_bin(), 8);
  EXPECT_EQ(s.num_bins(), 100);
  EXPECT_EQ(s.frame_samples(), 800u);
}

TEST(SignalConfig, RejectsNonIntegerDof) {
  SignalConfig s;
  s.integration_s = 2.1e-9;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(EnergyDetect, ZeroWaveform) {
  SignalConfig s;
  const Waveform r(s.frame_samples());
  const auto e = energy_detect(r, s);
  ASSERT_EQ(e.size(), 100u);
  for (double v : e) EXPECT_EQ(v, 0.0);
}

TEST(EnergyDetect, SingleSample) {
  SignalConfig s;
  Waveform r(s.frame_samples());
  r[8 * 13 + 5] = {0.6, 0.8};
  const auto e = energy_detect(r, s);
  for (int n = 0; n < 100; ++n) {
    EXPECT_DOUBLE_EQ(e[n], n == 13 ? 1.0 / s.sample_rate() : 0.0);
  }
}

TEST(EnergyDetect, LengthMismatch) {
  SignalConfig s;
  const Waveform r(799);
  EXPECT_THROW(energy_detect(r, s), InputError);
}

TEST(EnergyDetect, NoiseMean) {
  SignalConfig s;
  const double var = 3.0;
  double sum = 0;
  int bins = 0;
  for (int f = 0; bins < 100000; ++f) {
    const auto e = energy_detect(synthesize_received({}, s, var, derive_seed(1, "f", f)), s);
    for (double v : e) sum += v;
    bins += static_cast<int>(e.size());
  }
  EXPECT_NEAR(sum / bins / (s.integration_s * var), 1.0, 0.01);
}

TEST(EnergyDetect, ParsevalForAlignedPaths) {
  SignalConfig s;
  std::vector<Path> paths;
  double total = 0;
  for (int k = 0; k < 10; ++k) {
    const double a = 0.1 * (k + 1);
    paths.push_back({k, 0, (8.0 * 7 * k + 3) / s.sample_rate(), a, 0.3 * k, a * a});
    total += a * a;
  }
  const auto e = energy_detect(synthesize_received(paths, s, 0.0, 0), s);
  double sum = 0;
  for (double v : e) sum += v;
  EXPECT_NEAR(sum, total / s.sample_rate(), 1e-9 * total / s.sample_rate());
}

TEST(EnergyDetect, ShiftByOneBin) {
  SignalConfig s;
  std::vector<Path> paths = {{0, 0, 20e-9, 1.0, 0.0, 1}, {1, 0, 31.3e-9, 0.5, 1.0, 1}};
  const auto e0 = energy_detect(synthesize_received(paths, s, 0.0, 0), s);
  for (auto& p : paths) p.delay_s += s.integration_s;
  const auto e1 = energy_detect(synthesize_received(paths, s, 0.0, 0), s);
  for (int n = 1; n < 100; ++n) EXPECT_DOUBLE_EQ(e1[n], e0[n - 1]);
  EXPECT_EQ(e1[0], 0.0);
}

TEST(EnergyDetect, ScaleSquares) {
  SignalConfig s;
  auto r = synthesize_received({}, s, 1.0, 3);
  const auto e = energy_detect(r, s);
  for (auto& v : r) v *= 3.0;
  const auto e3 = energy_detect(r, s);
  for (int n = 0; n < 100; ++n) EXPECT_NEAR(e3[n], 9.0 * e[n], 1e-12 * e3[n]);
}

TEST(MatchedFilter, ImpulseTemplateIsIdentity) {
  SignalConfig s;
  const auto r = synthesize_received({}, s, 1.0, 4);
  const auto pulse = impulse_pulse();
  EXPECT_EQ(matched_filter_detect(r, pulse, s), energy_detect(r, s));
}

TEST(MatchedFilter, TemplateScaling) {
  SignalConfig s;
  const auto r = synthesize_received({}, s, 1.0, 5);
  const std::vector<std::complex<double>> p1 = {{0.5, 0}, {0.7, 0.1}, {0.2, -0.3}};
  std::vector<std::complex<double>> p2 = p1;
  for (auto& v : p2) v *= 2.0;
  const auto a = matched_filter_detect(r, p1, s);
  const auto b = matched_filter_detect(r, p2, s);
  for (int n = 0; n < 100; ++n) EXPECT_NEAR(b[n], 4.0 * a[n], 1e-12 * (1 + b[n]));
}

TEST(MatchedFilter, BetterPeakToNoiseThanEnergyDetector) {
  // Multi-sample pulse at 5 dB per-sample SNR: correlating concentrates the
  // pulse energy, so the peak bin stands out further above the noise bins.
  SignalConfig s;
  std::vector<std::complex<double>> pulse(6, {1.0 / std::sqrt(6.0), 0.0});
  const Path p{0, 0, 40e-9, 1.0, 0.0, 1.0};
  const double noise = std::pow(10.0, -0.5);
  double ed = 0, mf = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto r = synthesize_received(std::span(&p, 1), s, noise, derive_seed(6, "t", t), pulse);
    auto ratio = [](const PdpVector& e) {
      const double peak = e[20];
      double noise_bins = 0;
      for (int n = 50; n < 100; ++n) noise_bins += e[n];
      return peak / (noise_bins / 50);
    };
    ed += ratio(energy_detect(r, s));
    mf += ratio(matched_filter_detect(r, pulse, s));
  }
  EXPECT_GE(mf / trials, ed / trials);
}

TEST(CalibrateNoise, DbDefinition) {
  GeometryConfig g;
  ScenarioConfig sc;
  const double beta = mean_los_power(g, sc, 2000, 9);
  EXPECT_NEAR(calibrate_noise(0.0, g, sc, 2000, 9), beta, 1e-15 * beta);
  EXPECT_NEAR(calibrate_noise(10.0, g, sc, 2000, 9), beta / 10, 1e-15 * beta);
}

TEST(CalibrateNoise, LinearInReferencePower) {
  GeometryConfig g;
  ScenarioConfig a;
  ScenarioConfig b = a;
  b.ref_power_dbm += 10.0 * std::log10(2.0);
  const double na = calibrate_noise(15.0, g, a, 3000, 1);
  const double nb = calibrate_noise(15.0, g, b, 3000, 1);
  EXPECT_NEAR(nb / na, 2.0, 1e-9);
}

TEST(CalibrateNoise, Deterministic) {
  GeometryConfig g;
  ScenarioConfig a;
  EXPECT_EQ(calibrate_noise(5.0, g, a, 500, 3), calibrate_noise(5.0, g, a, 500, 3));
}

TEST(PdpTable, RoundTrip) {
  SignalConfig s;
  std::vector<PdpVector> rows;
  for (int f = 0; f < 5; ++f) rows.push_back(energy_detect(synthesize_received({}, s, 1e-9, f), s));
  std::stringstream io;
  write_pdp_table(io, s, rows);
  const PdpTable t = read_pdp_table(io);
  EXPECT_EQ(t.num_bins, 100);
  EXPECT_DOUBLE_EQ(t.bandwidth_hz, s.bandwidth_hz);
  EXPECT_DOUBLE_EQ(t.integration_s, s.integration_s);
  EXPECT_EQ(t.rows, rows);
}

TEST(Frontend, LosRemovalLowersLeadingBin) {
  GeometryConfig g;
  SignalConfig s;
  ScenarioConfig los;
  ScenarioConfig nlos = los;
  nlos.los_enabled = false;
  const double noise = calibrate_noise(15.0, g, los, 500, 1);
  double e_los = 0, e_nlos = 0;
  for (int t = 0; t < 300; ++t) {
    const Vec3 target = sample_target(derive_seed(8, "t", t), g);
    const auto seed = derive_seed(8, "ch", t);
    const auto a = draw_channel(seed, target, g, los);
    const auto b = draw_channel(seed, target, g, nlos);
    for (std::size_t m = 0; m < g.num_sensors(); ++m) {
      const double d = distance(g.sensor_locations[m], target) / kSpeedOfLight;
      const auto bin = static_cast<std::size_t>(std::llround(d * s.sample_rate())) /
                       s.samples_per_bin();
      const auto ns = derive_seed(seed, "noise", m);
      e_los += energy_detect(synthesize_received(a.sensors[m], s, noise, ns), s)[bin];
      e_nlos += energy_detect(synthesize_received(b.sensors[m], s, noise, ns), s)[bin];
    }
  }
  EXPECT_LT(e_nlos, e_los);
}

}  // namespace
}  // namespace uwbpos

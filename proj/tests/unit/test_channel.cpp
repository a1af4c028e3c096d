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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "uwbpos/channel.hpp"
#include "uwbpos/error.hpp"

namespace uwbpos {
namespace {

constexpr double kNs = 1e-9;

TEST(Geometry, DefaultsAreValid) {
  GeometryConfig g;
  EXPECT_NO_THROW(g.validate());
  EXPECT_EQ(g.num_sensors(), 12u);
}

TEST(Geometry, RejectsSensorOutsideBox) {
  GeometryConfig g;
  g.sensor_locations.push_back({4.0, 0.0, 0.0});
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(Geometry, RejectsBoxNotInsideCylinder) {
  GeometryConfig g;
  g.d_h = 1.0;
  EXPECT_THROW(g.validate(), ConfigError);
  GeometryConfig h;
  h.d_r = 3.0;
  EXPECT_THROW(h.validate(), ConfigError);
}

TEST(SampleTarget, StaysInTargetSpace) {
  GeometryConfig g;
  Rng rng(11);
  for (int i = 0; i < 20000; ++i) {
    const Vec3 p = sample_target(rng, g);
    ASSERT_LE(p.x * p.x + p.y * p.y, 100.0);
    ASSERT_LE(std::abs(p.z), 2.0);
    ASSERT_FALSE(std::abs(p.x) <= 3 && std::abs(p.y) <= 1.5 && std::abs(p.z) <= 1);
  }
}

TEST(SampleTarget, DeterministicGivenSeed) {
  GeometryConfig g;
  const Vec3 a = sample_target(std::uint64_t{42}, g);
  const Vec3 b = sample_target(std::uint64_t{42}, g);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.z, b.z);
}

TEST(SampleTarget, MeanIsCentered) {
  GeometryConfig g;
  Rng rng(5);
  double sx = 0, sy = 0, sz = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = sample_target(rng, g);
    sx += p.x;
    sy += p.y;
    sz += p.z;
  }
  EXPECT_NEAR(sx / n, 0.0, 0.05);
  EXPECT_NEAR(sy / n, 0.0, 0.05);
  EXPECT_NEAR(sz / n, 0.0, 0.05);
}

TEST(SampleTarget, UniformOverRadius) {
  // Area-uniform sampling in an annulus-like region: the fraction of points
  // with r <= 6 equals the corresponding volume fraction.
  GeometryConfig g;
  Rng rng(6);
  const int n = 100000;
  int inner = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = sample_target(rng, g);
    if (p.x * p.x + p.y * p.y <= 36.0) ++inner;
  }
  const double box = 6.0 * 3.0 * 2.0;
  const double total = std::numbers::pi * 100.0 * 4.0 - box;
  const double expected = (std::numbers::pi * 36.0 * 4.0 - box) / total;
  EXPECT_NEAR(static_cast<double>(inner) / n, expected, 0.005);
}

TEST(PlaceClusters, ZeroMeanGivesNone) {
  ScenarioConfig s;
  s.mean_clusters = 0.0;
  EXPECT_TRUE(place_clusters(1, s, GeometryConfig{}).empty());
}

TEST(PlaceClusters, PoissonMomentsResidential) {
  ScenarioConfig s = ScenarioConfig::residential();
  GeometryConfig g;
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += place_clusters(derive_seed(3, "c", i), s, g).size();
  EXPECT_NEAR(sum / n, 3.0, 0.05);
}

TEST(PlaceClusters, PoissonVarianceOutdoor) {
  ScenarioConfig s = ScenarioConfig::outdoor();
  GeometryConfig g;
  const int n = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double c = static_cast<double>(place_clusters(derive_seed(4, "c", i), s, g).size());
    sum += c;
    sq += c * c;
  }
  const double mean = sum / n;
  EXPECT_NEAR(sq / n - mean * mean, 12.0, 0.5);
}

TEST(PlaceClusters, InsideCylinder) {
  ScenarioConfig s = ScenarioConfig::outdoor();
  GeometryConfig g;
  for (int i = 0; i < 200; ++i)
    for (const Vec3& c : place_clusters(i, s, g)) ASSERT_TRUE(g.in_cylinder(c));
}

TEST(PathDelay, LosIsZero) {
  EXPECT_EQ(path_delay({9, 0, 0}, {1, 0, 0}, std::nullopt), 0.0);
}

TEST(PathDelay, HandComputedTriangle) {
  // Target-cluster and cluster-sensor legs are both sqrt(4^2 + 5^2) = sqrt(41).
  const double expected = (2.0 * std::sqrt(41.0) - 8.0) / kSpeedOfLight;
  const double t = path_delay({9, 0, 0}, {1, 0, 0}, Vec3{5, 5, 0});
  EXPECT_NEAR(t, expected, 1e-18);
  EXPECT_NEAR(t / kNs, 16.03, 0.01);
  // Moving the cluster to (5, 5, 0) relative to a sensor at the origin gives
  // legs sqrt(41) and sqrt(50) over a direct path of 9 m.
  const double t2 = path_delay({9, 0, 0}, {0, 0, 0}, Vec3{5, 5, 0});
  EXPECT_NEAR(t2, (std::sqrt(50.0) + std::sqrt(41.0) - 9.0) / kSpeedOfLight, 1e-18);
}

TEST(PathDelay, ColinearClusterIsZero) {
  EXPECT_NEAR(path_delay({9, 0, 0}, {1, 0, 0}, Vec3{4.3, 0, 0}), 0.0, 1e-20);
}

TEST(PathDelay, NonNegative) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 t{u(rng), u(rng), u(rng)}, s{u(rng), u(rng), u(rng)}, c{u(rng), u(rng), u(rng)};
    ASSERT_GE(path_delay(t, s, c), 0.0);
  }
}

TEST(LosPathloss, HandComputed) {
  ScenarioConfig s;
  const double p_w = std::pow(10.0, -45.0 / 10.0) * 1e-3;
  EXPECT_NEAR(los_pathloss(2.0, s, 1.0), p_w / 4.0, 1e-20);
  EXPECT_NEAR(los_pathloss(2.0, s, 1.0), 7.906e-9, 1e-12);
  EXPECT_NEAR(los_pathloss(1.0, s, 1.0), p_w, 1e-20);
}

TEST(LosPathloss, RejectsZeroDistance) {
  EXPECT_THROW(los_pathloss(0.0, ScenarioConfig{}, 1.0), DomainError);
  EXPECT_THROW(los_pathloss(std::uint64_t{1}, 0.0, ScenarioConfig{}), DomainError);
}

TEST(LosPathloss, StrictlyDecreasingInDistance) {
  ScenarioConfig s;
  double prev = INFINITY;
  for (double d = 0.5; d < 20; d += 0.25) {
    const double b = los_pathloss(d, s, 1.0);
    ASSERT_LT(b, prev);
    prev = b;
  }
}

TEST(Shadowing, ZeroMeanInDb) {
  Rng rng(9);
  const int n = 100000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double db = 10.0 * std::log10(draw_shadowing(rng, 3.0));
    sum += db;
    sq += db * db;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sq / n, 3.0, 0.05);
}

TEST(NlosPathloss, UnitDecays) {
  ScenarioConfig s;
  const double b0 = 1e-8;
  EXPECT_NEAR(nlos_pathloss(b0, 25 * kNs, 0.0, s, 1.0), b0 * std::exp(-1.0), 1e-22);
  EXPECT_NEAR(nlos_pathloss(b0, 0.0, 5 * kNs, s, 1.0), b0 * std::exp(-1.0), 1e-22);
  EXPECT_NEAR(nlos_pathloss(b0, 25 * kNs, 5 * kNs, s, 1.0), b0 * std::exp(-2.0), 1e-22);
}

TEST(NlosPathloss, DecreasingInBothDelays) {
  ScenarioConfig s;
  for (double t = 0; t < 100e-9; t += 5e-9) {
    EXPECT_GT(nlos_pathloss(1.0, t, 2e-9, s, 1.0), nlos_pathloss(1.0, t + 1e-9, 2e-9, s, 1.0));
    EXPECT_GT(nlos_pathloss(1.0, 2e-9, t, s, 1.0), nlos_pathloss(1.0, 2e-9, t + 1e-9, s, 1.0));
  }
}

TEST(Nakagami, MeanSquareMatchesOmega) {
  ScenarioConfig s;
  Rng rng(10);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double a = draw_nakagami(rng, draw_nakagami_shape(rng, s), 1.0);
    sum += a * a;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.02);
}

TEST(Nakagami, ScalingOmegaScalesPower) {
  ScenarioConfig s;
  Rng a(12), b(12);
  double sa = 0, sb = 0;
  for (int i = 0; i < 20000; ++i) {
    const double x = draw_nakagami(a, draw_nakagami_shape(a, s), 1.0);
    const double y = draw_nakagami(b, draw_nakagami_shape(b, s), 9.0);
    sa += x * x;
    sb += y * y;
  }
  EXPECT_NEAR(sb / sa, 9.0, 1e-9);
}

TEST(Nakagami, ShapeClippedAtHalf) {
  ScenarioConfig s;
  s.nakagami_mean = -3.0;
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) ASSERT_GE(draw_nakagami_shape(rng, s), 0.5);
}

TEST(DrawChannel, RealizationInvariants) {
  GeometryConfig g;
  ScenarioConfig s = ScenarioConfig::outdoor();
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 target = sample_target(derive_seed(1, "t", trial), g);
    const auto ch = draw_channel(derive_seed(1, "ch", trial), target, g, s);
    ASSERT_EQ(ch.sensors.size(), g.num_sensors());
    for (std::size_t m = 0; m < ch.sensors.size(); ++m) {
      const auto& paths = ch.sensors[m];
      ASSERT_EQ(paths.size(), (ch.clusters.size() + 1) * s.rays_per_cluster);
      const double direct = distance(g.sensor_locations[m], target) / kSpeedOfLight;
      for (std::size_t i = 0; i < paths.size(); ++i) {
        const Path& p = paths[i];
        ASSERT_GE(p.amplitude, 0.0);
        ASSERT_GE(p.phase, 0.0);
        ASSERT_LT(p.phase, 2 * std::numbers::pi);
        ASSERT_GE(p.delay_s, direct - 1e-18);
        if (p.ray == 0 && p.cluster == 0) ASSERT_NEAR(p.delay_s, direct, 1e-18);
        if (p.ray > 0) ASSERT_GT(p.delay_s, paths[i - 1].delay_s);
      }
    }
  }
}

TEST(DrawChannel, Deterministic) {
  GeometryConfig g;
  ScenarioConfig s;
  const Vec3 t{7, 2, 0.5};
  const auto a = draw_channel(99, t, g, s);
  const auto b = draw_channel(99, t, g, s);
  ASSERT_EQ(a.sensors.size(), b.sensors.size());
  for (std::size_t m = 0; m < a.sensors.size(); ++m) {
    ASSERT_EQ(a.sensors[m].size(), b.sensors[m].size());
    for (std::size_t i = 0; i < a.sensors[m].size(); ++i) {
      EXPECT_EQ(a.sensors[m][i].delay_s, b.sensors[m][i].delay_s);
      EXPECT_EQ(a.sensors[m][i].amplitude, b.sensors[m][i].amplitude);
      EXPECT_EQ(a.sensors[m][i].phase, b.sensors[m][i].phase);
    }
  }
}

TEST(DrawChannel, LosDisabledZeroesLosOnly) {
  GeometryConfig g;
  ScenarioConfig los;
  ScenarioConfig nlos = los;
  nlos.los_enabled = false;
  const Vec3 t{-6, 3, 0};
  const auto a = draw_channel(5, t, g, los);
  const auto b = draw_channel(5, t, g, nlos);
  for (std::size_t m = 0; m < a.sensors.size(); ++m) {
    for (std::size_t i = 0; i < a.sensors[m].size(); ++i) {
      const Path& pa = a.sensors[m][i];
      const Path& pb = b.sensors[m][i];
      if (pb.cluster == 0) {
        EXPECT_EQ(pb.amplitude, 0.0);
      } else {
        EXPECT_EQ(pa.amplitude, pb.amplitude);
      }
      EXPECT_EQ(pa.delay_s, pb.delay_s);
    }
  }
}

TEST(DrawChannel, RayInterarrivalMean) {
  GeometryConfig g;
  ScenarioConfig s;
  s.mean_clusters = 0.0;
  s.rays_per_cluster = 101;
  double sum = 0;
  int count = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto ch = draw_channel(derive_seed(2, "r", trial), Vec3{8, 0, 0}, g, s);
    for (const auto& paths : ch.sensors) {
      for (std::size_t i = 1; i < paths.size(); ++i) {
        sum += paths[i].delay_s - paths[i - 1].delay_s;
        ++count;
      }
    }
  }
  ASSERT_GE(count, 100000);
  EXPECT_NEAR(sum / count / kNs, 1.5, 0.02);
}

TEST(DrawChannel, ClusterShadowingSharedAcrossSensors) {
  // With no ray decay spread, every ray of a cluster sees the same S^c: the
  // ratio beta / (beta_los * exp(-T/Gamma) * exp(-tau/gamma)) is one value per cluster.
  GeometryConfig g;
  ScenarioConfig s;
  s.shadow_var_db = 0.0;
  s.mean_clusters = 4.0;
  const Vec3 t{0, 6, 0};
  const auto ch = draw_channel(21, t, g, s);
  std::vector<double> ratio(ch.clusters.size(), -1.0);
  for (std::size_t m = 0; m < ch.sensors.size(); ++m) {
    const double d = distance(g.sensor_locations[m], t);
    const double b0 = los_pathloss(d, s, 1.0);
    for (const Path& p : ch.sensors[m]) {
      if (p.cluster == 0) continue;
      const double T = path_delay(t, g.sensor_locations[m], ch.clusters[p.cluster - 1]);
      const double tau = p.delay_s - d / kSpeedOfLight - T;
      const double r = p.mean_power / nlos_pathloss(b0, T, tau, s, 1.0);
      double& ref = ratio[p.cluster - 1];
      if (ref < 0) ref = r;
      EXPECT_NEAR(r / ref, 1.0, 1e-6);
    }
  }
}

TEST(Synthesize, ZeroPathsNoNoise) {
  SignalConfig sig;
  const auto r = synthesize_received({}, sig, 0.0, 1);
  ASSERT_EQ(r.size(), sig.frame_samples());
  for (const auto& v : r) EXPECT_EQ(v, std::complex<double>(0, 0));
}

TEST(Synthesize, SinglePathLandsOnSample) {
  SignalConfig sig;
  const std::size_t j = 37;
  const Path p{0, 0, j / sig.sample_rate(), 1.0, 0.0, 1.0};
  const auto r = synthesize_received(std::span(&p, 1), sig, 0.0, 1);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(std::norm(r[i]), i == j ? 1.0 : 0.0);
  }
}

TEST(Synthesize, NoiseVariance) {
  SignalConfig sig;
  double sum = 0;
  std::size_t n = 0;
  for (int f = 0; n < 1000000; ++f) {
    const auto r = synthesize_received({}, sig, 2.5, derive_seed(7, "n", f));
    for (const auto& v : r) sum += std::norm(v);
    n += r.size();
  }
  EXPECT_NEAR(sum / n, 2.5, 0.025);
}

TEST(Synthesize, GuardViolationIsConfigError) {
  SignalConfig sig;
  const Path p{1, 0, 250e-9, 1.0, 0.0, 1.0};
  EXPECT_THROW(synthesize_received(std::span(&p, 1), sig, 0.0, 1), ConfigError);
}

TEST(Synthesize, DeterministicGivenSeed) {
  SignalConfig sig;
  const auto a = synthesize_received({}, sig, 1.0, 77);
  const auto b = synthesize_received({}, sig, 1.0, 77);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace uwbpos

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

#include "uwbpos/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uwbpos/error.hpp"

namespace uwbpos {
namespace {

constexpr double kNs = 1e-9;

Vec3 uniform_in_cylinder(Rng& rng, double radius, double height) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  const double z = height * (unit(rng) - 0.5);
  return {r * std::cos(theta), r * std::sin(theta), z};
}

}  // namespace

std::vector<Vec3> GeometryConfig::vehicle_sensors(double d_x, double d_y, double d_z) {
  const double hx = d_x / 2, hy = d_y / 2, hz = d_z / 2;
  std::vector<Vec3> s;
  for (double x : {-hx, hx})
    for (double y : {-hy, hy})
      for (double z : {-hz, hz}) s.push_back({x, y, z});
  s.push_back({0.0, hy, hz});
  s.push_back({0.0, -hy, hz});
  s.push_back({hx, 0.0, hz});
  s.push_back({-hx, 0.0, hz});
  return s;
}

bool GeometryConfig::in_box(Vec3 p) const {
  return std::abs(p.x) <= d_x / 2 && std::abs(p.y) <= d_y / 2 && std::abs(p.z) <= d_z / 2;
}

bool GeometryConfig::in_cylinder(Vec3 p) const {
  return p.x * p.x + p.y * p.y <= d_r * d_r && std::abs(p.z) <= d_h / 2;
}

void GeometryConfig::validate() const {
  if (!(d_x > 0 && d_y > 0 && d_z > 0 && d_r > 0 && d_h > 0)) {
    throw ConfigError("geometry: all lengths must be positive");
  }
  if (!(d_h > d_z)) throw ConfigError("geometry: d_h must exceed d_z");
  if (!(d_r * d_r > (d_x / 2) * (d_x / 2) + (d_y / 2) * (d_y / 2))) {
    throw ConfigError("geometry: sensor box does not fit inside the target cylinder");
  }
  if (sensor_locations.empty()) throw ConfigError("geometry: at least one sensor required");
  for (std::size_t m = 0; m < sensor_locations.size(); ++m) {
    if (!in_box(sensor_locations[m])) {
      throw ConfigError("geometry: sensor " + std::to_string(m) + " lies outside the sensor box");
    }
  }
}

ScenarioConfig ScenarioConfig::residential() { return ScenarioConfig{}; }

ScenarioConfig ScenarioConfig::outdoor() {
  ScenarioConfig s;
  s.name = "OUT";
  s.mean_clusters = 12.0;
  s.shadow_var_db = 3.0;
  s.cluster_shadow_var_db = 1.0;
  return s;
}

ScenarioConfig ScenarioConfig::preset(const std::string& name) {
  if (name == "RES") return residential();
  if (name == "OUT") return outdoor();
  throw ConfigError("unknown scenario preset '" + name + "' (expected RES or OUT)");
}

double ScenarioConfig::ref_power_w() const { return std::pow(10.0, ref_power_dbm / 10.0) * 1e-3; }

void ScenarioConfig::validate() const {
  if (!(mean_clusters >= 0.0)) throw ConfigError("scenario: mean_clusters must be >= 0");
  if (!(ray_interarrival_ns > 0 && cluster_decay_ns > 0 && ray_decay_ns > 0)) {
    throw ConfigError("scenario: decay constants and ray rate must be positive");
  }
  if (rays_per_cluster < 1) throw ConfigError("scenario: rays_per_cluster must be >= 1");
  if (!(shadow_var_db >= 0 && cluster_shadow_var_db >= 0 && nakagami_var >= 0)) {
    throw ConfigError("scenario: variances must be non-negative");
  }
  if (!(ref_dist_m > 0)) throw ConfigError("scenario: ref_dist_m must be positive");
}

double ChannelRealization::max_delay() const {
  double best = 0.0;
  for (const auto& paths : sensors)
    for (const auto& p : paths) best = std::max(best, p.delay_s);
  return best;
}

TargetLocation sample_target(Rng& rng, const GeometryConfig& geometry) {
  for (;;) {
    const Vec3 p = uniform_in_cylinder(rng, geometry.d_r, geometry.d_h);
    if (!geometry.in_box(p)) return p;
  }
}

TargetLocation sample_target(std::uint64_t seed, const GeometryConfig& geometry) {
  Rng rng(seed);
  return sample_target(rng, geometry);
}

std::vector<Vec3> place_clusters(std::uint64_t seed, const ScenarioConfig& scenario,
                                 const GeometryConfig& geometry) {
  Rng rng(seed);
  int count = 0;
  if (scenario.mean_clusters > 0.0) {
    count = std::poisson_distribution<int>(scenario.mean_clusters)(rng);
  }
  std::vector<Vec3> clusters;
  clusters.reserve(count);
  for (int l = 0; l < count; ++l) {
    clusters.push_back(uniform_in_cylinder(rng, geometry.d_r, geometry.d_h));
  }
  return clusters;
}

double path_delay(Vec3 target, Vec3 sensor, std::optional<Vec3> cluster) {
  if (!cluster) return 0.0;
  const double excess = distance(*cluster, target) + distance(sensor, *cluster) -
                        distance(sensor, target);
  // Colinear clusters give a tiny negative excess from rounding.
  return std::max(0.0, excess) / kSpeedOfLight;
}

double draw_shadowing(Rng& rng, double var_db) {
  if (var_db <= 0.0) return 1.0;
  std::normal_distribution<double> db(0.0, std::sqrt(var_db));
  return std::pow(10.0, db(rng) / 10.0);
}

double los_pathloss(double distance_m, const ScenarioConfig& scenario, double shadowing) {
  if (!(distance_m > 0.0)) {
    throw DomainError("los_pathloss: distance must be positive, got " + std::to_string(distance_m));
  }
  return shadowing * scenario.ref_power_w() *
         std::pow(distance_m / scenario.ref_dist_m, -scenario.pathloss_exp);
}

double los_pathloss(std::uint64_t seed, double distance_m, const ScenarioConfig& scenario) {
  Rng rng(seed);
  const double s = draw_shadowing(rng, scenario.shadow_var_db);
  return los_pathloss(distance_m, scenario, s);
}

double nlos_pathloss(double beta_los, double cluster_delay_s, double ray_delay_s,
                     const ScenarioConfig& scenario, double cluster_shadowing) {
  return cluster_shadowing * beta_los *
         std::exp(-cluster_delay_s / (scenario.cluster_decay_ns * kNs)) *
         std::exp(-ray_delay_s / (scenario.ray_decay_ns * kNs));
}

double nlos_pathloss(std::uint64_t seed, double beta_los, double cluster_delay_s,
                     double ray_delay_s, const ScenarioConfig& scenario) {
  Rng rng(seed);
  const double s = draw_shadowing(rng, scenario.cluster_shadow_var_db);
  return nlos_pathloss(beta_los, cluster_delay_s, ray_delay_s, scenario, s);
}

double draw_nakagami(Rng& rng, double shape, double omega) {
  // Draw unit-scale and rescale, so the stream advances the same way for omega = 0.
  std::gamma_distribution<double> power(shape, 1.0 / shape);
  const double g = power(rng);
  return omega > 0.0 ? std::sqrt(g * omega) : 0.0;
}

double draw_nakagami_shape(Rng& rng, const ScenarioConfig& scenario) {
  std::normal_distribution<double> ln_mu(scenario.nakagami_mean, std::sqrt(scenario.nakagami_var));
  return std::max(0.5, std::exp(ln_mu(rng)));
}

ChannelRealization draw_channel(std::uint64_t seed, TargetLocation target,
                                const GeometryConfig& geometry,
                                const ScenarioConfig& scenario) {
  ChannelRealization out;
  out.clusters = place_clusters(derive_seed(seed, "clusters"), scenario, geometry);
  const int n_clusters = static_cast<int>(out.clusters.size());

  // One shadowing draw per cluster, shared by all of its rays and sensors.
  std::vector<double> cluster_shadowing(n_clusters);
  {
    Rng rng(derive_seed(seed, "cluster-shadowing"));
    for (auto& s : cluster_shadowing) s = draw_shadowing(rng, scenario.cluster_shadow_var_db);
  }

  const double ray_mean_s = scenario.ray_interarrival_ns * kNs;
  const double ray_decay_s = scenario.ray_decay_ns * kNs;
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::exponential_distribution<double> interarrival(1.0 / ray_mean_s);

  out.sensors.resize(geometry.num_sensors());
  for (std::size_t m = 0; m < geometry.num_sensors(); ++m) {
    Rng rng(derive_seed(seed, "sensor", m));
    const Vec3 sensor = geometry.sensor_locations[m];
    const double d = distance(sensor, target);
    const double beta_los = los_pathloss(d, scenario, draw_shadowing(rng, scenario.shadow_var_db));

    auto& paths = out.sensors[m];
    paths.reserve(static_cast<std::size_t>(n_clusters + 1) * scenario.rays_per_cluster);
    for (int l = 0; l <= n_clusters; ++l) {
      const double excess =
          l == 0 ? 0.0 : path_delay(target, sensor, out.clusters[l - 1]);
      double tau = 0.0;
      for (int k = 0; k < scenario.rays_per_cluster; ++k) {
        if (k > 0) tau += interarrival(rng);
        // LOS rays decay with the ray constant only and carry no cluster shadowing.
        const double beta = l == 0 ? beta_los * std::exp(-tau / ray_decay_s)
                                   : nlos_pathloss(beta_los, excess, tau, scenario,
                                                   cluster_shadowing[l - 1]);
        const double shape = draw_nakagami_shape(rng, scenario);
        double amplitude = draw_nakagami(rng, shape, beta);
        const double phi = phase(rng);
        if (l == 0 && !scenario.los_enabled) amplitude = 0.0;
        paths.push_back(Path{l, k, d / kSpeedOfLight + excess + tau, amplitude, phi, beta});
      }
    }
  }
  return out;
}

std::vector<std::complex<double>> impulse_pulse() { return {std::complex<double>(1.0, 0.0)}; }

Waveform synthesize_received(std::span<const Path> paths, const SignalConfig& signal,
                             double noise_var, std::uint64_t seed,
                             std::span<const std::complex<double>> pulse) {
  signal.validate();
  if (noise_var < 0.0) throw InputError("synthesize_received: noise variance must be >= 0");
  static const std::complex<double> kImpulse[] = {{1.0, 0.0}};
  if (pulse.empty()) pulse = kImpulse;

  const std::size_t n = signal.frame_samples();
  const double fs = signal.sample_rate();
  Waveform r(n, {0.0, 0.0});
  for (const Path& p : paths) {
    if (!(p.delay_s < signal.frame_s)) {
      throw ConfigError("frame too short: path delay " + std::to_string(p.delay_s * 1e9) +
                        " ns exceeds T_f = " + std::to_string(signal.frame_s * 1e9) + " ns");
    }
    const auto start = static_cast<std::size_t>(std::llround(p.delay_s * fs));
    if (start + pulse.size() > n) {
      throw ConfigError("frame too short: pulse at sample " + std::to_string(start) +
                        " runs past the guard period");
    }
    const std::complex<double> gain = std::polar(p.amplitude, p.phase);
    for (std::size_t j = 0; j < pulse.size(); ++j) r[start + j] += gain * pulse[j];
  }
  if (noise_var > 0.0) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(noise_var / 2.0));
    for (auto& v : r) {
      const double re = g(rng);
      const double im = g(rng);
      v += std::complex<double>(re, im);
    }
  }
  return r;
}

}  // namespace uwbpos

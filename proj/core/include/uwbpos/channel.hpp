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

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uwbpos/rng.hpp"
#include "uwbpos/signal_config.hpp"
#include "uwbpos/vec3.hpp"

namespace uwbpos {

// Sensor box (centered at the origin) inside a target cylinder of radius d_r
// and height d_h. Lengths in meters.
struct GeometryConfig {
  double d_x = 6.0;
  double d_y = 3.0;
  double d_z = 2.0;
  double d_r = 10.0;
  double d_h = 4.0;
  std::vector<Vec3> sensor_locations = vehicle_sensors(6.0, 3.0, 2.0);

  // 8 box corners followed by the 4 edge midpoints of the top face.
  static std::vector<Vec3> vehicle_sensors(double d_x, double d_y, double d_z);

  std::size_t num_sensors() const { return sensor_locations.size(); }
  bool in_box(Vec3 p) const;
  bool in_cylinder(Vec3 p) const;
  bool in_target_space(Vec3 p) const { return in_cylinder(p) && !in_box(p); }

  void validate() const;
};

// Propagation environment. Units follow the configuration file: delays in
// ns, variances in dB, reference power in dBm.
struct ScenarioConfig {
  std::string name = "RES";
  double mean_clusters = 3.0;          // L-bar
  double shadow_var_db = 3.0;          // sigma_s^2
  double cluster_shadow_var_db = 3.0;  // sigma_c^2
  double nakagami_mean = 0.67;         // mean of ln(mu)
  double nakagami_var = 0.28;          // variance of ln(mu)
  double ray_interarrival_ns = 1.5;    // kappa, mean ray inter-arrival time
  double cluster_decay_ns = 25.0;      // Gamma
  double ray_decay_ns = 5.0;           // gamma
  double pathloss_exp = 2.0;           // xi
  double ref_power_dbm = -45.0;        // P-bar
  double ref_dist_m = 1.0;             // d-bar
  int rays_per_cluster = 6;            // K_l
  bool los_enabled = true;

  static ScenarioConfig residential();
  static ScenarioConfig outdoor();
  // Looks up "RES" or "OUT"; throws ConfigError otherwise.
  static ScenarioConfig preset(const std::string& name);

  double ref_power_w() const;
  void validate() const;
};

using TargetLocation = Vec3;

struct Path {
  int cluster = 0;        // l, 0 = LOS
  int ray = 0;            // k
  double delay_s = 0.0;   // d_m/c + T_{m,l} + tau_{m,l,k}
  double amplitude = 0.0; // a_{m,l,k}
  double phase = 0.0;     // phi_{m,l,k} in [0, 2pi)
  double mean_power = 0.0;  // Omega_{m,l,k} = beta_{m,l,k}
};

struct ChannelRealization {
  std::vector<Vec3> clusters;                 // l = 1..L stored at index l-1
  std::vector<std::vector<Path>> sensors;     // paths per sensor m

  double max_delay() const;
};

// Uniform point in the cylinder minus the sensor box, by rejection.
TargetLocation sample_target(std::uint64_t seed, const GeometryConfig& geometry);
TargetLocation sample_target(Rng& rng, const GeometryConfig& geometry);

// L ~ Poisson(L-bar) clusters, uniform in the target cylinder.
std::vector<Vec3> place_clusters(std::uint64_t seed, const ScenarioConfig& scenario,
                                 const GeometryConfig& geometry);

// Excess delay T_{m,l} of the path bouncing off `cluster`; 0 for the LOS path
// (cluster == nullopt).
double path_delay(Vec3 target, Vec3 sensor, std::optional<Vec3> cluster);

// Log-normal shadowing factor: 10^(X/10) with X ~ N(0, var_db) in dB.
double draw_shadowing(Rng& rng, double var_db);

// beta_{m,0,0} = S * P-bar * (d/d-bar)^-xi, in watts. Throws DomainError for
// distance <= 0.
double los_pathloss(double distance_m, const ScenarioConfig& scenario, double shadowing);
double los_pathloss(std::uint64_t seed, double distance_m, const ScenarioConfig& scenario);

// beta_{m,l,k} = S^c_l * beta_{m,0,0} * exp(-T/Gamma) * exp(-tau/gamma).
double nlos_pathloss(double beta_los, double cluster_delay_s, double ray_delay_s,
                     const ScenarioConfig& scenario, double cluster_shadowing);
double nlos_pathloss(std::uint64_t seed, double beta_los, double cluster_delay_s,
                     double ray_delay_s, const ScenarioConfig& scenario);

// Nakagami-m amplitude with mean-square omega.
double draw_nakagami(Rng& rng, double shape, double omega);
// Nakagami shape: exp(N(mean, var)) clipped below at 0.5.
double draw_nakagami_shape(Rng& rng, const ScenarioConfig& scenario);

ChannelRealization draw_channel(std::uint64_t seed, TargetLocation target,
                                const GeometryConfig& geometry,
                                const ScenarioConfig& scenario);

using Waveform = std::vector<std::complex<double>>;

// Sum of pulses a*e^{j phi}*s(t - delay) plus complex white Gaussian noise of
// per-sample variance noise_var, sampled at 2W over one frame. The pulse is
// placed at the nearest sample of each path delay. Throws ConfigError if any
// path (including pulse tail) falls outside the frame.
Waveform synthesize_received(std::span<const Path> paths, const SignalConfig& signal,
                             double noise_var, std::uint64_t seed,
                             std::span<const std::complex<double>> pulse = {});

// Default pulse: unit-energy single-sample impulse.
std::vector<std::complex<double>> impulse_pulse();

}  // namespace uwbpos

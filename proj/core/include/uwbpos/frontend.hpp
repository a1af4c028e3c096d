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
#include <iosfwd>
#include <span>
#include <vector>

#include "uwbpos/channel.hpp"
#include "uwbpos/signal_config.hpp"

namespace uwbpos {

// Per-bin energies of one sensor frame, length N_b, all entries >= 0.
using PdpVector = std::vector<double>;

// Square-law energy detector:
//   e_n = (1/2W) * sum_{i < 2W*T_g} |r(n*T_g + i/2W)|^2.
// Throws InputError unless the waveform holds exactly 2W*T_f samples.
PdpVector energy_detect(std::span<const std::complex<double>> waveform,
                        const SignalConfig& signal);

// Correlates the waveform with the pulse template at the Nyquist rate, then
// bins the correlator output exactly like energy_detect.
PdpVector matched_filter_detect(std::span<const std::complex<double>> waveform,
                                std::span<const std::complex<double>> pulse,
                                const SignalConfig& signal);

// Mean LOS pathloss E[beta_{m,0,0}] over n_mc uniform targets and all sensors,
// with shadowing held at its mean (0 dB).
double mean_los_power(const GeometryConfig& geometry, const ScenarioConfig& scenario, int n_mc,
                      std::uint64_t seed);

// Noise variance that puts E[beta_{m,0,0}] / sigma_n^2 at snr_db.
double calibrate_noise(double snr_db, const GeometryConfig& geometry,
                       const ScenarioConfig& scenario, int n_mc = 10000,
                       std::uint64_t seed = 0x5eed);

// Columnar text table: "# W=<hz> T_g=<s> N_b=<n>" header, a column header,
// then one row per sensor-frame with N_b energies.
void write_pdp_table(std::ostream& out, const SignalConfig& signal,
                     std::span<const PdpVector> rows);

struct PdpTable {
  double bandwidth_hz = 0.0;
  double integration_s = 0.0;
  int num_bins = 0;
  std::vector<PdpVector> rows;
};

PdpTable read_pdp_table(std::istream& in);

}  // namespace uwbpos

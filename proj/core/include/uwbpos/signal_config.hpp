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

#include <cstddef>

namespace uwbpos {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Receiver sampling and energy-detector timing. All times are in seconds.
struct SignalConfig {
  double bandwidth_hz = 2e9;     // W
  double frame_s = 200e-9;       // T_f
  double integration_s = 2e-9;   // T_g

  double sample_rate() const { return 2.0 * bandwidth_hz; }
  // Nyquist samples per energy-detector bin, also the chi-square degrees of
  // freedom of a bin energy.
  int samples_per_bin() const;
  int num_bins() const;
  std::size_t frame_samples() const;

  // Throws ConfigError unless 2*W*T_g is a positive integer and N_b >= 1.
  void validate() const;
};

}  // namespace uwbpos

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

#include "uwbpos/signal_config.hpp"

#include <cmath>
#include <string>

#include "uwbpos/error.hpp"

namespace uwbpos {

int SignalConfig::samples_per_bin() const {
  return static_cast<int>(std::llround(sample_rate() * integration_s));
}

int SignalConfig::num_bins() const {
  return static_cast<int>(std::floor(frame_s / integration_s + 1e-9));
}

std::size_t SignalConfig::frame_samples() const {
  return static_cast<std::size_t>(std::llround(sample_rate() * frame_s));
}

void SignalConfig::validate() const {
  if (!(bandwidth_hz > 0.0) || !(frame_s > 0.0) || !(integration_s > 0.0)) {
    throw ConfigError("signal: bandwidth, frame and integration time must be positive");
  }
  const double dof = sample_rate() * integration_s;
  if (std::abs(dof - std::round(dof)) > 1e-6 || std::round(dof) < 1.0) {
    throw ConfigError("signal: 2*W*T_g must be a positive integer, got " + std::to_string(dof));
  }
  if (num_bins() < 1) throw ConfigError("signal: frame shorter than one integration period");
  if (frame_samples() < static_cast<std::size_t>(num_bins()) * samples_per_bin()) {
    throw ConfigError("signal: frame holds fewer samples than N_b bins");
  }
}

}  // namespace uwbpos

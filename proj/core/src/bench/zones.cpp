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

#include "uwbpos/bench/zones.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uwbpos/error.hpp"

namespace uwbpos::bench {

void ZoneLayout::validate() const {
  if (n_angular < 1 || n_radial < 1) throw ConfigError("zones: sector and ring counts must be >= 1");
  if (!(d_r > 0)) throw ConfigError("zones: d_r must be positive");
}

ZoneLayout ZoneLayout::for_zones(int num_zones, double d_r) {
  if (num_zones == 8) return {4, 2, d_r};
  if (num_zones == 32) return {8, 4, d_r};
  throw ConfigError("zones: no standard layout for " + std::to_string(num_zones) +
                    " zones (8 or 32, or give n_angular and n_radial)");
}

int zone_of(Vec3 location, const ZoneLayout& layout) {
  const double r = std::hypot(location.x, location.y);
  if (r > layout.d_r) {
    throw InputError("zone_of: radius " + std::to_string(r) + " m lies outside d_r = " +
                     std::to_string(layout.d_r) + " m");
  }
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double theta = std::atan2(location.y, location.x);
  if (theta < 0) theta += kTwoPi;
  const int angular =
      std::min(static_cast<int>(theta / (kTwoPi / layout.n_angular)), layout.n_angular - 1);
  const int radial = std::min(static_cast<int>(r / layout.d_r * layout.n_radial), layout.n_radial - 1);
  return angular * layout.n_radial + radial;
}

}  // namespace uwbpos::bench

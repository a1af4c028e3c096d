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

#include "uwbpos/vec3.hpp"

namespace uwbpos::bench {

// Angular sectors starting at angle 0 times equal-width radial rings over
// (0, d_r]. Zone index rho = angular * n_radial + radial.
struct ZoneLayout {
  int n_angular = 4;
  int n_radial = 2;
  double d_r = 10.0;

  int num_zones() const { return n_angular * n_radial; }
  void validate() const;  // ConfigError

  // 8 zones -> 4 x 2, 32 zones -> 8 x 4; other counts throw ConfigError.
  static ZoneLayout for_zones(int num_zones, double d_r);
};

// Throws InputError when the horizontal radius exceeds d_r.
int zone_of(Vec3 location, const ZoneLayout& layout);

}  // namespace uwbpos::bench

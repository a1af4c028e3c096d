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

#include "uwbpos/marcum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "uwbpos/error.hpp"

namespace uwbpos {

double marcum_q(double m, double a, double b) {
  if (!(m >= 0.5)) throw InputError("marcum_q: order must be >= 0.5, got " + std::to_string(m));
  if (!(a >= 0.0) || !(b >= 0.0)) throw InputError("marcum_q: arguments must be non-negative");
  if (b == 0.0) return 1.0;

  const double x = 0.5 * b * b;
  const double lambda = 0.5 * a * a;
  if (lambda == 0.0) return boost::math::gamma_q(m, x);

  // Far from the bulk the answer is 0 or 1 to double precision, and the
  // series would need O(sqrt(lambda)) terms to say so.
  const double mean = 2.0 * m + a * a;
  const double sd = std::sqrt(4.0 * m + 4.0 * a * a);
  const double z = (b * b - mean) / sd;
  if (lambda > 1e4) {
    if (z < -40.0) return 1.0;
    if (z > 40.0) return 0.0;
  }
  if (lambda > 1e12) return 0.5 * std::erfc(z / std::numbers::sqrt2);

  // Poisson(k; lambda) weights are summed upward and downward from the mode
  // until they stop contributing at double precision.
  constexpr double kTiny = 1e-18;
  const double k0 = std::floor(lambda);
  const double w0 = std::exp(-lambda + k0 * std::log(lambda) - std::lgamma(k0 + 1.0));

  // Dividing by the summed weights cancels the rounding error in w0, which
  // grows with lambda through lgamma.
  double sum = 0.0;
  double total = 0.0;
  double w = w0;
  for (double k = k0; w > kTiny * w0 || k <= lambda; k += 1.0) {
    sum += w * boost::math::gamma_q(m + k, x);
    total += w;
    w *= lambda / (k + 1.0);
  }
  w = w0;
  for (double k = k0 - 1.0; k >= 0.0; k -= 1.0) {
    w *= (k + 1.0) / lambda;
    if (w < kTiny * w0) break;
    sum += w * boost::math::gamma_q(m + k, x);
    total += w;
  }
  return std::clamp(sum / total, 0.0, 1.0);
}

}  // namespace uwbpos

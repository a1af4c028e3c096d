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

#include "uwbpos/knn_kl.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uwbpos/error.hpp"

namespace uwbpos {
namespace {

double max_abs(const Matrix& m) {
  double s = 0.0;
  for (double v : m.values()) s = std::max(s, std::abs(v));
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

// u-th smallest distance from x to the rows of `set`, skipping row `skip`.
double kth_radius(std::span<const double> x, const Matrix& set, int u, std::size_t skip,
                  std::vector<double>& scratch) {
  scratch.clear();
  for (std::size_t r = 0; r < set.rows(); ++r) {
    if (r == skip) continue;
    scratch.push_back(squared_distance(x, set.row(r)));
  }
  std::nth_element(scratch.begin(), scratch.begin() + (u - 1), scratch.end());
  return std::sqrt(scratch[u - 1]);
}

constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

}  // namespace

double knn_kl(const Matrix& p, const Matrix& q, int neighbors, double dim_factor) {
  if (neighbors < 1) throw InputError("knn_kl: neighbour count must be >= 1");
  if (p.cols() != q.cols()) throw InputError("knn_kl: sample dimensions differ");
  const bool same = (&p == &q) || p == q;
  const std::size_t u = static_cast<std::size_t>(neighbors);
  if (p.rows() <= u) throw InputError("knn_kl: first sample set needs more than u points");
  if (same ? q.rows() <= u : q.rows() < u) {
    throw InputError("knn_kl: second sample set has too few points for u");
  }

  const double floor = 1e-12 * std::max({max_abs(p), max_abs(q), 1e-300});
  std::vector<double> scratch;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    const auto x = p.row(i);
    const double r_own = std::max(kth_radius(x, p, neighbors, i, scratch), floor);
    const double r_other =
        same ? r_own : std::max(kth_radius(x, q, neighbors, kNoSkip, scratch), floor);
    acc += std::log(r_other / r_own);
  }
  const double np = static_cast<double>(p.rows());
  const double nq = static_cast<double>(q.rows());
  return dim_factor / np * acc + std::log(nq / (np - 1.0));
}

double kl_score(std::span<const Matrix> zones, int neighbors, int feature_size) {
  if (zones.empty()) throw InputError("kl_score: no zones");
  if (feature_size < 1) throw InputError("kl_score: F must be >= 1");
  if (neighbors < 1) throw InputError("kl_score: neighbour count must be >= 1");
  const std::size_t nz = zones.size();
  for (std::size_t z = 0; z < nz; ++z) {
    if (zones[z].rows() <= static_cast<std::size_t>(neighbors)) {
      throw InputError("kl_score: zone " + std::to_string(z) + " has " +
                       std::to_string(zones[z].rows()) + " samples, needs more than u = " +
                       std::to_string(neighbors));
    }
    if (zones[z].cols() != zones[0].cols()) throw InputError("kl_score: zone dimensions differ");
  }

  double floor = 1e-300;
  for (const auto& z : zones) floor = std::max(floor, max_abs(z));
  floor *= 1e-12;

  // radius[i][x][j]: u-th neighbour distance of point x of zone i within zone j.
  std::vector<double> scratch;
  double total = 0.0;
  for (std::size_t i = 0; i < nz; ++i) {
    const Matrix& zi = zones[i];
    std::vector<double> log_sum(nz, 0.0);
    for (std::size_t x = 0; x < zi.rows(); ++x) {
      const auto pt = zi.row(x);
      const double r_own = std::max(kth_radius(pt, zi, neighbors, x, scratch), floor);
      for (std::size_t j = 0; j < nz; ++j) {
        if (j == i) continue;
        const double r = std::max(kth_radius(pt, zones[j], neighbors, kNoSkip, scratch), floor);
        log_sum[j] += std::log(r / r_own);
      }
    }
    const double ni = static_cast<double>(zi.rows());
    for (std::size_t j = 0; j < nz; ++j) {
      const double nj = static_cast<double>(zones[j].rows());
      total += feature_size / ni * log_sum[j] + std::log(nj / (ni - 1.0));
    }
  }
  return total / (static_cast<double>(nz * nz) * std::sqrt(static_cast<double>(feature_size)));
}

}  // namespace uwbpos

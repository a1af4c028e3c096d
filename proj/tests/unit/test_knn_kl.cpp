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
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include "uwbpos/error.hpp"
#include "uwbpos/knn_kl.hpp"

namespace uwbpos {
namespace {

Matrix gaussian(std::size_t n, std::size_t d, double mean, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(mean, 1.0);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

TEST(KnnKl, IdenticalSets) {
  const Matrix p = gaussian(500, 3, 0.0, 1);
  EXPECT_NEAR(knn_kl(p, p, 5, 3), std::log(500.0 / 499.0), 1e-12);
  const Matrix copy = p;
  EXPECT_NEAR(knn_kl(p, copy, 5, 3), std::log(500.0 / 499.0), 1e-12);
}

TEST(KnnKl, GaussianShiftMatchesClosedForm) {
  double sum = 0;
  for (int seed = 0; seed < 10; ++seed) {
    const Matrix p = gaussian(2000, 1, 0.0, 100 + seed);
    const Matrix q = gaussian(2000, 1, 1.0, 200 + seed);
    sum += knn_kl(p, q, 30, 1);
  }
  EXPECT_NEAR(sum / 10, testing::gaussian_kl(0.0, 1.0, 1.0, 1.0), 0.15);
}

TEST(KnnKl, Asymmetric) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> narrow(0.0, 0.5), wide(0.0, 2.0);
  Matrix p(1000, 1), q(1000, 1);
  for (std::size_t i = 0; i < 1000; ++i) {
    p(i, 0) = narrow(rng);
    q(i, 0) = wide(rng);
  }
  EXPECT_GT(std::abs(knn_kl(p, q, 10, 1) - knn_kl(q, p, 10, 1)), 0.05);
}

TEST(KnnKl, DuplicatesStayFinite) {
  Matrix p(50, 2, 1.0);
  Matrix q = gaussian(50, 2, 0.0, 4);
  EXPECT_TRUE(std::isfinite(knn_kl(p, q, 3, 2)));
  EXPECT_TRUE(std::isfinite(knn_kl(q, p, 3, 2)));
}

TEST(KnnKl, SizePreconditions) {
  const Matrix p = gaussian(5, 2, 0.0, 5);
  const Matrix q = gaussian(4, 2, 0.0, 6);
  EXPECT_THROW(knn_kl(p, q, 5, 2), InputError);
  EXPECT_NO_THROW(knn_kl(p, q, 4, 2));
  EXPECT_THROW(knn_kl(p, p, 5, 2), InputError);
}

TEST(KlScore, SingleZoneIsNearZero) {
  const std::vector<Matrix> zones = {gaussian(300, 4, 0.0, 7)};
  EXPECT_NEAR(kl_score(zones, 5, 4), std::log(300.0 / 299.0) / 2.0, 1e-12);
}

TEST(KlScore, MatchesPairwiseDefinition) {
  const std::vector<Matrix> zones = {gaussian(80, 3, 0.0, 8), gaussian(90, 3, 0.7, 9),
                                     gaussian(70, 3, -0.4, 10)};
  double sum = 0;
  for (const auto& a : zones)
    for (const auto& b : zones) sum += knn_kl(a, b, 4, 3);
  EXPECT_NEAR(kl_score(zones, 4, 3), sum / (9.0 * std::sqrt(3.0)), 1e-12);
}

TEST(KlScore, SeparatedZonesScoreHigher) {
  const std::vector<Matrix> apart = {gaussian(300, 2, 0.0, 11), gaussian(300, 2, 8.0, 12)};
  const std::vector<Matrix> same = {gaussian(300, 2, 0.0, 11), gaussian(300, 2, 0.0, 12)};
  EXPECT_GT(kl_score(apart, 10, 2), kl_score(same, 10, 2));
}

TEST(KlScore, CrossMinusSelfSignUnderScaling) {
  std::vector<Matrix> zones = {gaussian(200, 2, 0.0, 13), gaussian(200, 2, 1.5, 14)};
  auto split = [](const std::vector<Matrix>& z) {
    return knn_kl(z[0], z[1], 5, 2) + knn_kl(z[1], z[0], 5, 2) - knn_kl(z[0], z[0], 5, 2) -
           knn_kl(z[1], z[1], 5, 2);
  };
  const double base = split(zones);
  for (double c : {1e-3, 7.0, 1e4}) {
    std::vector<Matrix> scaled = zones;
    for (auto& m : scaled)
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (auto& v : m.row(i)) v *= c;
    EXPECT_EQ(split(scaled) > 0, base > 0);
    EXPECT_NEAR(split(scaled), base, 1e-9);
  }
}

TEST(KlScore, ZoneTooSmallIsNamed) {
  const std::vector<Matrix> zones = {gaussian(30, 2, 0.0, 15), gaussian(5, 2, 0.0, 16)};
  try {
    kl_score(zones, 5, 2);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("zone 1"), std::string::npos);
  }
}

}  // namespace
}  // namespace uwbpos

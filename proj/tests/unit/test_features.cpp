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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "uwbpos/error.hpp"
#include "uwbpos/features.hpp"

namespace uwbpos {
namespace {

const std::vector<double> kExampleVector = {53.9e-7, 26.8e-7, 17.4e-7, 12.5e-7, 9.46e-7,
                                            5.35e-7, 4.72e-7, 3.36e-7, 2.96e-7, 2.55e-7};

std::vector<PdpVector> random_pdps(int m, int nb, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<PdpVector> out(m, PdpVector(nb));
  for (auto& p : out)
    for (auto& v : p) v = e(rng);
  return out;
}

TEST(SortPdp, Small) {
  const auto s = sort_pdp({1, 3, 2});
  EXPECT_EQ(s.powers, (std::vector<double>{3, 2, 1}));
  EXPECT_EQ(s.bins, (std::vector<int>{1, 2, 0}));
}

TEST(SortPdp, TiesKeepBinOrder) {
  const auto s = sort_pdp(PdpVector(7, 2.0));
  EXPECT_EQ(s.bins, (std::vector<int>{0, 1, 2, 3, 4, 5, 6}));
  const auto t = sort_pdp({5, 1, 5, 1});
  EXPECT_EQ(t.bins, (std::vector<int>{0, 2, 1, 3}));
}

TEST(SortPdp, DescendingInputIsIdentity) {
  const auto s = sort_pdp(kExampleVector);
  std::vector<int> id(10);
  std::iota(id.begin(), id.end(), 0);
  EXPECT_EQ(s.bins, id);
}

TEST(ExtractFeatures, ExamplePermutation) {
  PdpVector p = kExampleVector;
  std::mt19937_64 rng(1);
  std::shuffle(p.begin(), p.end(), rng);
  const std::vector<PdpVector> pdps = {p};
  const auto fs = extract_features(pdps, 4);
  EXPECT_EQ(fs.sensors[0].powers,
            (std::vector<double>{53.9e-7, 26.8e-7, 17.4e-7, 12.5e-7}));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(p[fs.sensors[0].bins[i]], fs.sensors[0].powers[i]);
}

TEST(ExtractFeatures, FullAndSingle) {
  const auto pdps = random_pdps(12, 20, 2);
  const auto full = extract_features(pdps, 20);
  EXPECT_EQ(full.description_size(), 2u * 20 * 12);
  const auto one = extract_features(pdps, 1);
  for (std::size_t m = 0; m < pdps.size(); ++m) {
    const auto it = std::max_element(pdps[m].begin(), pdps[m].end());
    EXPECT_EQ(one.sensors[m].powers[0], *it);
    EXPECT_EQ(one.sensors[m].bins[0], it - pdps[m].begin());
  }
}

TEST(ExtractFeatures, RangeChecked) {
  const auto pdps = random_pdps(2, 10, 3);
  EXPECT_THROW(extract_features(pdps, 0), InputError);
  EXPECT_THROW(extract_features(pdps, 11), InputError);
}

TEST(ExtractFeatures, InvariantsAndRoundTrip) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto pdps = random_pdps(12, 30, 100 + trial);
    const int f = 1 + trial % 12;
    const auto fs = extract_features(pdps, f);
    EXPECT_EQ(fs.description_size(), 2u * f * 12);
    for (std::size_t m = 0; m < pdps.size(); ++m) {
      const auto& sf = fs.sensors[m];
      std::set<int> distinct(sf.bins.begin(), sf.bins.end());
      ASSERT_EQ(distinct.size(), static_cast<std::size_t>(f));
      ASSERT_TRUE(std::is_sorted(sf.powers.rbegin(), sf.powers.rend()));
      // Scatter back into a grid and re-sort: the top F must come back.
      PdpVector grid(30, -1.0);
      for (int i = 0; i < f; ++i) {
        ASSERT_EQ(pdps[m][sf.bins[i]], sf.powers[i]);
        grid[sf.bins[i]] = sf.powers[i];
      }
      const auto again = sort_pdp(grid);
      for (int i = 0; i < f; ++i) {
        ASSERT_EQ(again.powers[i], sf.powers[i]);
        ASSERT_EQ(again.bins[i], sf.bins[i]);
      }
    }
  }
}

TEST(Baselines, FirstF) {
  const auto pdps = random_pdps(3, 10, 4);
  const auto fs = baseline_first_f(pdps, 4);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(fs.sensors[m].bins, (std::vector<int>{0, 1, 2, 3}));
    for (int i = 0; i < 4; ++i) EXPECT_EQ(fs.sensors[m].powers[i], pdps[m][i]);
  }
  const auto all = baseline_first_f(pdps, 10);
  EXPECT_EQ(all.sensors[1].powers, pdps[1]);
}

TEST(Baselines, FirstFAgreesOnLosDominantTop) {
  PdpVector p(10, 0.01);
  p[0] = 5.0;
  const std::vector<PdpVector> pdps = {p};
  EXPECT_EQ(baseline_first_f(pdps, 3).sensors[0].powers[0],
            extract_features(pdps, 3).sensors[0].powers[0]);
}

TEST(Baselines, RandomFDistinctAndDeterministic) {
  const auto pdps = random_pdps(4, 10, 5);
  const auto a = baseline_random_f(pdps, 10, 9);
  const auto b = baseline_random_f(pdps, 10, 9);
  for (std::size_t m = 0; m < 4; ++m) {
    std::vector<int> bins = a.sensors[m].bins;
    std::sort(bins.begin(), bins.end());
    std::vector<int> id(10);
    std::iota(id.begin(), id.end(), 0);
    EXPECT_EQ(bins, id);
    EXPECT_EQ(a.sensors[m].bins, b.sensors[m].bins);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.sensors[m].powers[i], pdps[m][a.sensors[m].bins[i]]);
  }
}

TEST(Baselines, RandomFUniform) {
  const std::vector<PdpVector> pdps = {PdpVector(20, 1.0)};
  std::vector<int> count(20, 0);
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const auto fs = baseline_random_f(pdps, 5, derive_seed(3, "r", t));
    for (int b : fs.sensors[0].bins) ++count[b];
  }
  // Each bin is chosen with probability F / N_b = 0.25.
  for (int c : count) EXPECT_NEAR(static_cast<double>(c) / draws, 0.25, 0.02 * 0.25);
}

TEST(Normalization, ComputesPopulationMoments) {
  FeatureSet fs;
  fs.feature_size = 2;
  fs.num_bins = 10;
  fs.sensors = {{{4.0, 2.0}, {1, 3}}, {{6.0, 0.0}, {5, 7}}};
  const std::vector<FeatureSet> train = {fs};
  const auto st = compute_normalization(train);
  EXPECT_DOUBLE_EQ(st.power_mean, 3.0);
  EXPECT_DOUBLE_EQ(st.power_std, std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(st.bin_mean, 4.0);
  EXPECT_DOUBLE_EQ(st.bin_std, std::sqrt(5.0));
}

TEST(Normalization, ConstantFeaturesUseUnitStd) {
  FeatureSet fs;
  fs.feature_size = 1;
  fs.num_bins = 4;
  fs.sensors = {{{1.0}, {2}}, {{1.0}, {2}}};
  const std::vector<FeatureSet> train = {fs};
  const auto st = compute_normalization(train);
  EXPECT_EQ(st.power_std, 1.0);
  EXPECT_EQ(st.bin_std, 1.0);
}

TEST(Normalization, TestSplitChangesStats) {
  std::vector<FeatureSet> train, both;
  for (int i = 0; i < 20; ++i) {
    train.push_back(extract_features(random_pdps(3, 10, 200 + i), 3));
  }
  both = train;
  for (int i = 0; i < 5; ++i) both.push_back(extract_features(random_pdps(3, 10, 300 + i), 3));
  EXPECT_FALSE(compute_normalization(train) == compute_normalization(both));
}

TEST(SparseImage, SingleEntry) {
  FeatureSet fs;
  fs.feature_size = 1;
  fs.num_bins = 10;
  fs.sensors = {{{2.5}, {7}}};
  NormalizationStats st{1.0, 0.5, 0.0, 1.0};
  const Matrix img = build_sparse_image(fs, st, 10);
  for (int n = 0; n < 10; ++n) EXPECT_EQ(img(0, n), n == 7 ? 3.0 : 0.0);
}

TEST(SparseImage, EmptyFeaturesAllZero) {
  FeatureSet fs;
  fs.num_bins = 5;
  fs.sensors.resize(3);
  const Matrix img = build_sparse_image(fs, NormalizationStats::identity(), 5);
  for (double v : img.values()) EXPECT_EQ(v, 0.0);
}

TEST(SparseImage, FNonZerosPerRow) {
  const auto fs = extract_features(random_pdps(12, 40, 7), 6);
  const std::vector<FeatureSet> train = {fs};
  const Matrix img = build_sparse_image(fs, compute_normalization(train), 40);
  for (std::size_t m = 0; m < 12; ++m) {
    int nz = 0;
    for (double v : img.row(m)) nz += v != 0.0;
    EXPECT_EQ(nz, 6);
  }
}

TEST(Matrices, IdentityNormalization) {
  const auto pdps = random_pdps(4, 15, 8);
  const auto fs = extract_features(pdps, 5);
  const auto mm = build_matrices(fs, NormalizationStats::identity());
  ASSERT_EQ(mm.powers.rows(), 4u);
  ASSERT_EQ(mm.powers.cols(), 5u);
  for (std::size_t m = 0; m < 4; ++m) {
    for (int i = 0; i < 5; ++i) {
      EXPECT_EQ(mm.powers(m, i), fs.sensors[m].powers[i]);
      EXPECT_EQ(mm.bins(m, i), fs.sensors[m].bins[i]);
      EXPECT_GE(mm.bins(m, i), 0);
      EXPECT_LT(mm.bins(m, i), 15);
      if (i > 0) EXPECT_LE(mm.powers(m, i), mm.powers(m, i - 1));
    }
  }
}

TEST(Flatten, PowersThenBins) {
  const auto fs = extract_features(random_pdps(2, 6, 9), 2);
  const auto v = flatten_features(fs, NormalizationStats::identity());
  ASSERT_EQ(v.size(), 8u);
  EXPECT_EQ(v[0], fs.sensors[0].powers[0]);
  EXPECT_EQ(v[3], fs.sensors[1].powers[1]);
  EXPECT_EQ(v[4], fs.sensors[0].bins[0]);
  EXPECT_EQ(v[7], fs.sensors[1].bins[1]);
}

TEST(FeatureScheme, ParseRoundTrip) {
  for (auto s : {FeatureScheme::kProposed, FeatureScheme::kFirstF, FeatureScheme::kRandomF}) {
    EXPECT_EQ(parse_feature_scheme(to_string(s)), s);
  }
  EXPECT_THROW(parse_feature_scheme("bogus"), InputError);
}

}  // namespace
}  // namespace uwbpos

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

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uwbpos/frontend.hpp"
#include "uwbpos/matrix.hpp"

namespace uwbpos {

struct SortedPdp {
  std::vector<double> powers;  // descending
  std::vector<int> bins;       // permutation of 0..N_b-1
};

// Descending sort; equal powers keep ascending bin order.
SortedPdp sort_pdp(const PdpVector& pdp);

struct SensorFeatures {
  std::vector<double> powers;
  std::vector<int> bins;
};

// F (power, bin) pairs per sensor. For the proposed scheme powers are
// non-increasing; the baselines keep their own bin order.
struct FeatureSet {
  int feature_size = 0;  // F
  int num_bins = 0;      // N_b of the source PDPs
  std::vector<SensorFeatures> sensors;

  std::size_t num_sensors() const { return sensors.size(); }
  // Number of transmitted values, 2*F*M.
  std::size_t description_size() const { return 2 * static_cast<std::size_t>(feature_size) * sensors.size(); }
};

enum class FeatureScheme { kProposed, kFirstF, kRandomF };

std::string to_string(FeatureScheme scheme);
FeatureScheme parse_feature_scheme(const std::string& name);

// Top-F powers and their bins for every sensor. Throws InputError unless
// 1 <= F <= N_b.
FeatureSet extract_features(std::span<const PdpVector> pdps, int feature_size);
// Powers from bins 0..F-1.
FeatureSet baseline_first_f(std::span<const PdpVector> pdps, int feature_size);
// F distinct uniformly drawn bins per sensor.
FeatureSet baseline_random_f(std::span<const PdpVector> pdps, int feature_size,
                             std::uint64_t seed);

FeatureSet make_features(FeatureScheme scheme, std::span<const PdpVector> pdps, int feature_size,
                         std::uint64_t seed);

// Dataset-level standardization, shared across sensors.
struct NormalizationStats {
  double power_mean = 0.0;
  double power_std = 1.0;
  double bin_mean = 0.0;
  double bin_std = 1.0;

  static NormalizationStats identity() { return {}; }
  double power(double p) const { return (p - power_mean) / power_std; }
  double bin(double b) const { return (b - bin_mean) / bin_std; }
  bool operator==(const NormalizationStats&) const = default;
};

// Population mean/std over every (power, bin) in the training features. A
// zero std is replaced by 1.
NormalizationStats compute_normalization(std::span<const FeatureSet> training);

// M x N_b image, zero except normalized powers at (m, bin).
Matrix build_sparse_image(const FeatureSet& fs, const NormalizationStats& stats, int num_bins);

struct MeasurementMatrices {
  Matrix powers;  // E, M x F
  Matrix bins;    // B, M x F
};

MeasurementMatrices build_matrices(const FeatureSet& fs, const NormalizationStats& stats);

// Row-major E followed by row-major B: the 2FM-long vector consumed by the
// fully connected and nearest-neighbour learners and by the KL estimator.
std::vector<double> flatten_features(const FeatureSet& fs, const NormalizationStats& stats);

}  // namespace uwbpos

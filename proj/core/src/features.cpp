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

#include "uwbpos/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "uwbpos/error.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos {
namespace {

void check_size(std::span<const PdpVector> pdps, int feature_size) {
  if (pdps.empty()) throw InputError("features: no sensor PDPs given");
  const std::size_t nb = pdps.front().size();
  for (const auto& p : pdps) {
    if (p.size() != nb) throw InputError("features: sensors disagree on N_b");
  }
  if (feature_size < 1 || static_cast<std::size_t>(feature_size) > nb) {
    throw InputError("features: F = " + std::to_string(feature_size) + " outside [1, " +
                     std::to_string(nb) + "]");
  }
}

FeatureSet gather(std::span<const PdpVector> pdps, int feature_size,
                  const std::vector<std::vector<int>>& bins) {
  FeatureSet fs;
  fs.feature_size = feature_size;
  fs.num_bins = static_cast<int>(pdps.front().size());
  fs.sensors.resize(pdps.size());
  for (std::size_t m = 0; m < pdps.size(); ++m) {
    auto& s = fs.sensors[m];
    s.bins = bins[m];
    s.powers.reserve(feature_size);
    for (int b : s.bins) s.powers.push_back(pdps[m][b]);
  }
  return fs;
}

}  // namespace

SortedPdp sort_pdp(const PdpVector& pdp) {
  SortedPdp out;
  out.bins.resize(pdp.size());
  std::iota(out.bins.begin(), out.bins.end(), 0);
  std::stable_sort(out.bins.begin(), out.bins.end(),
                   [&](int a, int b) { return pdp[a] > pdp[b]; });
  out.powers.reserve(pdp.size());
  for (int b : out.bins) out.powers.push_back(pdp[b]);
  return out;
}

std::string to_string(FeatureScheme scheme) {
  switch (scheme) {
    case FeatureScheme::kProposed: return "proposed";
    case FeatureScheme::kFirstF: return "first-F";
    case FeatureScheme::kRandomF: return "random-F";
  }
  return "?";
}

FeatureScheme parse_feature_scheme(const std::string& name) {
  if (name == "proposed") return FeatureScheme::kProposed;
  if (name == "first-F" || name == "first-f" || name == "first") return FeatureScheme::kFirstF;
  if (name == "random-F" || name == "random-f" || name == "random") return FeatureScheme::kRandomF;
  throw InputError("unknown feature scheme '" + name + "' (proposed | first-F | random-F)");
}

FeatureSet extract_features(std::span<const PdpVector> pdps, int feature_size) {
  check_size(pdps, feature_size);
  std::vector<std::vector<int>> bins(pdps.size());
  for (std::size_t m = 0; m < pdps.size(); ++m) {
    auto sorted = sort_pdp(pdps[m]);
    sorted.bins.resize(feature_size);
    bins[m] = std::move(sorted.bins);
  }
  return gather(pdps, feature_size, bins);
}

FeatureSet baseline_first_f(std::span<const PdpVector> pdps, int feature_size) {
  check_size(pdps, feature_size);
  std::vector<int> first(feature_size);
  std::iota(first.begin(), first.end(), 0);
  return gather(pdps, feature_size, std::vector<std::vector<int>>(pdps.size(), first));
}

FeatureSet baseline_random_f(std::span<const PdpVector> pdps, int feature_size,
                             std::uint64_t seed) {
  check_size(pdps, feature_size);
  const int nb = static_cast<int>(pdps.front().size());
  Rng rng(seed);
  std::vector<std::vector<int>> bins(pdps.size());
  std::vector<int> all(nb);
  for (auto& b : bins) {
    // Partial Fisher-Yates: the first F entries are a uniform F-subset.
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < feature_size; ++i) {
      std::uniform_int_distribution<int> pick(i, nb - 1);
      std::swap(all[i], all[pick(rng)]);
    }
    b.assign(all.begin(), all.begin() + feature_size);
  }
  return gather(pdps, feature_size, bins);
}

FeatureSet make_features(FeatureScheme scheme, std::span<const PdpVector> pdps, int feature_size,
                         std::uint64_t seed) {
  switch (scheme) {
    case FeatureScheme::kProposed: return extract_features(pdps, feature_size);
    case FeatureScheme::kFirstF: return baseline_first_f(pdps, feature_size);
    case FeatureScheme::kRandomF: return baseline_random_f(pdps, feature_size, seed);
  }
  throw InputError("make_features: bad scheme");
}

NormalizationStats compute_normalization(std::span<const FeatureSet> training) {
  double n = 0, ps = 0, bs = 0;
  for (const auto& fs : training) {
    for (const auto& s : fs.sensors) {
      for (std::size_t i = 0; i < s.powers.size(); ++i) {
        ps += s.powers[i];
        bs += s.bins[i];
        n += 1;
      }
    }
  }
  if (n == 0) throw InputError("compute_normalization: empty training set");
  NormalizationStats st;
  st.power_mean = ps / n;
  st.bin_mean = bs / n;
  double pvar = 0, bvar = 0;
  for (const auto& fs : training) {
    for (const auto& s : fs.sensors) {
      for (std::size_t i = 0; i < s.powers.size(); ++i) {
        const double dp = s.powers[i] - st.power_mean;
        const double db = s.bins[i] - st.bin_mean;
        pvar += dp * dp;
        bvar += db * db;
      }
    }
  }
  st.power_std = std::sqrt(pvar / n);
  st.bin_std = std::sqrt(bvar / n);
  if (!(st.power_std > 0.0)) st.power_std = 1.0;
  if (!(st.bin_std > 0.0)) st.bin_std = 1.0;
  return st;
}

Matrix build_sparse_image(const FeatureSet& fs, const NormalizationStats& stats, int num_bins) {
  Matrix img(fs.num_sensors(), static_cast<std::size_t>(num_bins), 0.0);
  for (std::size_t m = 0; m < fs.num_sensors(); ++m) {
    const auto& s = fs.sensors[m];
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
      if (s.bins[i] < 0 || s.bins[i] >= num_bins) {
        throw InputError("build_sparse_image: bin index outside [0, N_b)");
      }
      img(m, s.bins[i]) = stats.power(s.powers[i]);
    }
  }
  return img;
}

MeasurementMatrices build_matrices(const FeatureSet& fs, const NormalizationStats& stats) {
  const std::size_t f = static_cast<std::size_t>(fs.feature_size);
  MeasurementMatrices out{Matrix(fs.num_sensors(), f), Matrix(fs.num_sensors(), f)};
  for (std::size_t m = 0; m < fs.num_sensors(); ++m) {
    for (std::size_t i = 0; i < f; ++i) {
      out.powers(m, i) = stats.power(fs.sensors[m].powers[i]);
      out.bins(m, i) = stats.bin(fs.sensors[m].bins[i]);
    }
  }
  return out;
}

std::vector<double> flatten_features(const FeatureSet& fs, const NormalizationStats& stats) {
  std::vector<double> v;
  v.reserve(fs.description_size());
  for (const auto& s : fs.sensors)
    for (double p : s.powers) v.push_back(stats.power(p));
  for (const auto& s : fs.sensors)
    for (int b : s.bins) v.push_back(stats.bin(b));
  return v;
}

}  // namespace uwbpos

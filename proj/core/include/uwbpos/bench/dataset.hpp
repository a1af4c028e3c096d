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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uwbpos/bench/config.hpp"
#include "uwbpos/features.hpp"
#include "uwbpos/frontend.hpp"
#include "uwbpos/vec3.hpp"

namespace uwbpos::bench {

struct Sample {
  std::uint64_t id = 0;
  int zone = 0;       // rho
  Vec3 location;      // l
  std::vector<PdpVector> pdps;      // one per sensor
  std::vector<FeatureSet> features;  // proposed features, one per stored F
};

struct DatasetHeader {
  std::string split;  // "train" or "test"
  std::uint64_t seed = 0;
  double snr_db = 0;
  double noise_var = 0;
  int num_sensors = 0;
  int num_bins = 0;
  int num_zones = 0;
  std::vector<int> feature_sizes;
  std::string config_json;  // data-shaping part of the generating configuration
};

struct Dataset {
  DatasetHeader header;
  std::vector<Sample> samples;

  // Index of F in header.feature_sizes, or -1.
  int feature_index(int feature_size) const;
  std::vector<int> zones() const;
  std::vector<Vec3> locations() const;
};

// Seeds of the train and test splits for one repeat; always distinct.
std::uint64_t split_seed(const ExperimentConfig& config, const std::string& split, int repeat);

// sigma_n^2 for the configured geometry and scenario at snr_db. LOS power is
// the reference for both conditions, so NLOS at a given SNR has the same noise.
double noise_variance(const ExperimentConfig& config, double snr_db);

// Balanced draw: zone quotas differ by at most one, targets falling in a
// full zone are rejected. Each accepted sample gets a channel and per-sensor
// noise seeded from (seed, attempt), so the result depends only on the
// arguments.
Dataset generate_dataset(const ExperimentConfig& config, const std::string& split, double snr_db,
                         int size, std::uint64_t seed);

// Features of every sample under a scheme. Proposed features come from the
// stored sets when available; random-F bins are seeded per (dataset, sample).
std::vector<FeatureSet> scheme_features(const Dataset& data, FeatureScheme scheme, int feature_size);

// Binary container: magic, JSON header, then fixed-layout sample records.
void write_dataset(std::ostream& out, const Dataset& data);
// Validates the magic, record sizes, and that every stored zone matches its
// location. Throws InputError on any inconsistency.
Dataset read_dataset(std::istream& in, const ZoneLayout& layout);
void save_dataset(const std::string& path, const Dataset& data);
Dataset load_dataset(const std::string& path, const ZoneLayout& layout);

}  // namespace uwbpos::bench

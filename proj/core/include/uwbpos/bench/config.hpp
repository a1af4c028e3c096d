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
#include <string>
#include <vector>

#include "uwbpos/bench/zones.hpp"
#include "uwbpos/channel.hpp"
#include "uwbpos/features.hpp"
#include "uwbpos/nn/model.hpp"
#include "uwbpos/signal_config.hpp"
#include "uwbpos/size_select.hpp"

namespace uwbpos::bench {

enum class Condition { kLos, kNlos };

std::string to_string(Condition c);
Condition parse_condition(const std::string& name);  // "LOS" | "NLOS"

// Ablation variants by path: DP = E/B paths, SI = sparse image, SA = attention.
struct Variant {
  std::string name;
  bool dp = false;
  bool si = false;
  bool sa = false;
};

Variant parse_variant(const std::string& name);  // e.g. "DP+SI+SA"
std::vector<Variant> default_variants();         // DP, SI, DP+SI, SI+SA, DP+SI+SA

struct ExperimentConfig {
  GeometryConfig geometry;
  ScenarioConfig scenario;
  SignalConfig signal;
  SelectionConfig selection;
  bool weight_given = false;  // otherwise 0.8 for LOS, 0.6 for NLOS

  std::vector<double> snr_db{15.0};
  Condition condition = Condition::kLos;
  FeatureScheme scheme = FeatureScheme::kProposed;
  nn::LearnerKind learner = nn::LearnerKind::kPnn;
  nn::Head head = nn::Head::kClassification;
  int feature_size = 5;  // 0: choose F with the selection criterion
  int d_train = 3000;
  int d_test = 600;
  int repeats = 3;
  std::uint64_t seed = 1;          // datasets
  std::uint64_t learner_seed = 1;  // weight init and batch order
  ZoneLayout zones;
  int noise_mc = 10000;  // Monte-Carlo targets for SNR calibration

  nn::TrainConfig train;
  nn::PnnConfig pnn;
  nn::FclConfig fcl;
  int knn_k = 11;
  std::vector<Variant> variants = default_variants();

  double selection_weight() const;
  // Scenario with los_enabled set from the condition.
  ScenarioConfig effective_scenario() const;
  // Feature sizes stored in datasets: the selection range plus feature_size.
  std::vector<int> stored_feature_sizes() const;
  void validate() const;  // ConfigError
};

// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// Canonical JSON of every field, stable across runs.
std::string config_to_json(const ExperimentConfig& config);
// Only the fields that shape generated data (geometry, scenario, signal,
// condition, zones, stored feature sizes, data seed). Learner settings are left
// out so that changing them leaves dataset files unchanged.
std::string data_config_json(const ExperimentConfig& config);

}  // namespace uwbpos::bench

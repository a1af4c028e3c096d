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
#include <memory>
#include <span>
#include <vector>

#include "uwbpos/features.hpp"
#include "uwbpos/matrix.hpp"
#include "uwbpos/nn/adam.hpp"
#include "uwbpos/nn/network.hpp"
#include "uwbpos/vec3.hpp"

namespace uwbpos::nn {

struct ModelSpec {
  LearnerKind kind = LearnerKind::kPnn;
  InputShape shape;
  PnnConfig pnn;
  FclConfig fcl;
  int knn_k = 11;
  std::uint64_t seed = 1;
};

struct TrainConfig {
  AdamConfig adam;
  int epochs = 50;
  int batch_size = 256;
};

struct TrainingSet {
  std::vector<FeatureSet> features;
  std::vector<int> zones;
  std::vector<Vec3> locations;  // used by the regression head
};

struct TrainedModel {
  ModelSpec spec;
  TrainConfig train;
  NormalizationStats stats;
  std::unique_ptr<Network> net;  // null for KNN
  Matrix knn_points;             // flattened training features (KNN)
  std::vector<int> knn_labels;
  double initial_loss = 0;        // full training-set loss before any update
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

std::unique_ptr<Network> make_network(const ModelSpec& spec);

// Normalization stats come from `data` only. Classification needs at least
// two distinct zones; regression needs one location per sample. Same spec,
// config and data give identical parameters.
TrainedModel train(const ModelSpec& spec, const TrainConfig& config, const TrainingSet& data);

// Network outputs (class probabilities or coordinates), one row per sample.
Mat predict(TrainedModel& model, std::span<const FeatureSet> features);
std::vector<int> predict_zones(TrainedModel& model, std::span<const FeatureSet> features);

// Mean loss of the current parameters over `data`.
double dataset_loss(TrainedModel& model, const TrainingSet& data);

// Binary container: magic, JSON header (spec, train config, stats, trace,
// parameter names and shapes), then raw float64 parameter values.
void save_model(std::ostream& out, TrainedModel& model);
// Rebuilds the network from the header and rejects any shape mismatch.
TrainedModel load_model(std::istream& in);

// FNV-1a over the raw bytes of every parameter, for determinism checks.
std::uint64_t parameter_checksum(TrainedModel& model);

}  // namespace uwbpos::nn

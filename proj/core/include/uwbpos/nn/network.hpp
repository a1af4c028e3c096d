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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uwbpos/features.hpp"
#include "uwbpos/nn/attention.hpp"
#include "uwbpos/nn/layers.hpp"

namespace uwbpos::nn {

enum class Head { kClassification, kRegression };
enum class LearnerKind { kPnn, kFcl, kKnn };

std::string to_string(Head head);
std::string to_string(LearnerKind kind);
Head parse_head(const std::string& name);
LearnerKind parse_learner(const std::string& name);

// Network inputs for a batch, one sample per row: the M x N_b sparse image,
// and the M x F power and bin matrices, each flattened row-major.
struct Batch {
  Mat image;
  Mat powers;
  Mat bins;
  Eigen::Index size() const { return powers.rows(); }
};

struct InputShape {
  int num_sensors = 12;   // M
  int num_bins = 100;     // N_b
  int feature_size = 5;   // F
  int outputs = 8;        // N_z for classification, 3 for regression
  Head head = Head::kClassification;
  void validate() const;
};

// Rows [first, first + count) of `features` rendered with `stats`. The image
// is only built when `with_image` is set. Throws InputError on F, M or N_b
// mismatch with `shape`.
Batch make_batch(std::span<const FeatureSet> features, std::span<const std::size_t> rows,
                 const NormalizationStats& stats, const InputShape& shape, bool with_image);

struct PnnConfig {
  std::vector<int> si_channels{16, 32};  // last entry feeds the attention layer
  std::vector<int> dp_channels{8, 16};   // used by both the E and B paths
  int kernel = 3;
  int key_dim = 8;
  std::vector<int> fc{128, 64};
  bool use_dp = true;  // E and B paths
  bool use_si = true;  // sparse-image path
  bool use_sa = true;  // attention on the sparse-image path
  void validate() const;
};

struct FclConfig {
  std::vector<int> hidden{50, 50, 50};
};

class Network {
 public:
  explicit Network(InputShape shape) : shape_(shape) {}
  virtual ~Network() = default;
  // Logits (classification) or coordinates (regression), one row per sample.
  virtual Mat forward(const Batch& batch) = 0;
  virtual void backward(const Mat& grad_out) = 0;
  virtual std::vector<Param*> params() = 0;
  virtual bool uses_image() const = 0;
  const InputShape& shape() const { return shape_; }

 private:
  InputShape shape_;
};

// Sparse-image path (convs, optional attention), E and B paths (convs),
// concatenated into fully connected layers and the output head. Disabled
// paths are left out of the concatenation. Every layer draws its weights from
// a seed derived from (seed, layer name), so variants share the weights of
// the layers they have in common.
class Pnn : public Network {
 public:
  Pnn(const InputShape& shape, const PnnConfig& config, std::uint64_t seed);
  Mat forward(const Batch& batch) override;
  void backward(const Mat& grad_out) override;
  std::vector<Param*> params() override;
  bool uses_image() const override { return config_.use_si; }
  const PnnConfig& config() const { return config_; }
  SelfAttention* attention() { return attention_; }
  Sequential& head() { return head_; }

 private:
  PnnConfig config_;
  Sequential si_, e_, b_, head_;
  SelfAttention* attention_ = nullptr;
  Eigen::Index si_width_ = 0, dp_width_ = 0;
};

// Fully connected baseline on the flattened [E | B] vector.
class Fcl : public Network {
 public:
  Fcl(const InputShape& shape, const FclConfig& config, std::uint64_t seed);
  Mat forward(const Batch& batch) override;
  void backward(const Mat& grad_out) override;
  std::vector<Param*> params() override { return net_.params(); }
  bool uses_image() const override { return false; }

 private:
  Sequential net_;
};

}  // namespace uwbpos::nn

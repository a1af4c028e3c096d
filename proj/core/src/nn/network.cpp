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

#include "uwbpos/nn/network.hpp"

#include <string>

#include "uwbpos/error.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos::nn {

std::string to_string(Head head) {
  return head == Head::kClassification ? "classification" : "regression";
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kPnn: return "pnn";
    case LearnerKind::kFcl: return "fcl";
    case LearnerKind::kKnn: return "knn";
  }
  return "?";
}

Head parse_head(const std::string& name) {
  if (name == "classification") return Head::kClassification;
  if (name == "regression") return Head::kRegression;
  throw InputError("unknown head '" + name + "' (classification | regression)");
}

LearnerKind parse_learner(const std::string& name) {
  if (name == "pnn") return LearnerKind::kPnn;
  if (name == "fcl") return LearnerKind::kFcl;
  if (name == "knn") return LearnerKind::kKnn;
  throw InputError("unknown learner '" + name + "' (pnn | fcl | knn)");
}

void InputShape::validate() const {
  if (num_sensors < 1 || num_bins < 1 || feature_size < 1 || outputs < 1) {
    throw InputError("input shape: all sizes must be positive");
  }
  if (feature_size > num_bins) throw InputError("input shape: F exceeds N_b");
  if (head == Head::kRegression && outputs != 3) {
    throw InputError("input shape: regression head has exactly 3 outputs");
  }
}

Batch make_batch(std::span<const FeatureSet> features, std::span<const std::size_t> rows,
                 const NormalizationStats& stats, const InputShape& shape, bool with_image) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const int m = shape.num_sensors, f = shape.feature_size, nb = shape.num_bins;
  Batch b;
  b.powers.resize(n, m * f);
  b.bins.resize(n, m * f);
  if (with_image) b.image.setZero(n, m * nb);
  for (Eigen::Index i = 0; i < n; ++i) {
    const FeatureSet& fs = features[rows[i]];
    if (fs.feature_size != f) {
      throw InputError("feature size " + std::to_string(fs.feature_size) +
                       " does not match the model's F = " + std::to_string(f));
    }
    if (static_cast<int>(fs.num_sensors()) != m || fs.num_bins != nb) {
      throw InputError("feature set sensor/bin counts do not match the model");
    }
    for (int s = 0; s < m; ++s) {
      const auto& sf = fs.sensors[s];
      for (int j = 0; j < f; ++j) {
        const double p = stats.power(sf.powers[j]);
        b.powers(i, s * f + j) = p;
        b.bins(i, s * f + j) = stats.bin(sf.bins[j]);
        if (with_image) b.image(i, s * nb + sf.bins[j]) = p;
      }
    }
  }
  return b;
}

void PnnConfig::validate() const {
  if (!use_dp && !use_si) throw InputError("pnn: at least one of the DP and SI paths is needed");
  if (use_sa && !use_si) throw InputError("pnn: attention requires the sparse-image path");
  if (use_si && si_channels.empty()) throw InputError("pnn: sparse-image path needs a conv layer");
  if (use_dp && dp_channels.empty()) throw InputError("pnn: E/B paths need a conv layer");
  if (use_sa && si_channels.back() != 32) {
    throw InputError("pnn: the conv feeding attention must output 32 channels");
  }
  if (kernel < 1 || kernel % 2 == 0) throw InputError("pnn: kernel must be odd");
  for (int c : si_channels)
    if (c < 1) throw InputError("pnn: channel counts must be positive");
  for (int c : dp_channels)
    if (c < 1) throw InputError("pnn: channel counts must be positive");
  for (int w : fc)
    if (w < 1) throw InputError("pnn: FC widths must be positive");
}

namespace {

Eigen::Index add_conv_stack(Sequential& seq, const std::string& prefix,
                            const std::vector<int>& channels, int kernel, int h, int w,
                            std::uint64_t seed) {
  int in = 1;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string name = prefix + ".conv" + std::to_string(i + 1);
    seq.add(std::make_unique<Conv2d>(name, in, channels[i], kernel, h, w, derive_seed(seed, name)));
    seq.add(std::make_unique<Relu>());
    in = channels[i];
  }
  return static_cast<Eigen::Index>(in) * h * w;
}

void add_dense_stack(Sequential& seq, const std::string& prefix, int in,
                     const std::vector<int>& hidden, int out, std::uint64_t seed) {
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    const std::string name = prefix + ".fc" + std::to_string(i + 1);
    seq.add(std::make_unique<Dense>(name, in, hidden[i], derive_seed(seed, name)));
    seq.add(std::make_unique<Relu>());
    in = hidden[i];
  }
  const std::string name = prefix + ".out";
  seq.add(std::make_unique<Dense>(name, in, out, derive_seed(seed, name)));
}

}  // namespace

Pnn::Pnn(const InputShape& shape, const PnnConfig& config, std::uint64_t seed)
    : Network(shape), config_(config) {
  shape.validate();
  config.validate();
  const int m = shape.num_sensors;
  if (config.use_si) {
    si_width_ = add_conv_stack(si_, "si", config.si_channels, config.kernel, m, shape.num_bins, seed);
    if (config.use_sa) {
      auto sa = std::make_unique<SelfAttention>("si.attention", 32, config.key_dim,
                                                m * shape.num_bins,
                                                derive_seed(seed, "si.attention"));
      attention_ = sa.get();
      si_.add(std::move(sa));
    }
  }
  if (config.use_dp) {
    dp_width_ = add_conv_stack(e_, "e", config.dp_channels, config.kernel, m, shape.feature_size, seed);
    add_conv_stack(b_, "b", config.dp_channels, config.kernel, m, shape.feature_size, seed);
  }
  const Eigen::Index width = si_width_ + 2 * dp_width_;
  add_dense_stack(head_, "head", static_cast<int>(width), config.fc, shape.outputs, seed);
}

Mat Pnn::forward(const Batch& batch) {
  const Eigen::Index n = batch.size();
  Mat joined(n, si_width_ + 2 * dp_width_);
  if (config_.use_si) joined.leftCols(si_width_) = si_.forward(batch.image);
  if (config_.use_dp) {
    joined.middleCols(si_width_, dp_width_) = e_.forward(batch.powers);
    joined.rightCols(dp_width_) = b_.forward(batch.bins);
  }
  return head_.forward(joined);
}

void Pnn::backward(const Mat& grad_out) {
  const Mat g = head_.backward(grad_out);
  if (config_.use_si) si_.backward(g.leftCols(si_width_));
  if (config_.use_dp) {
    e_.backward(g.middleCols(si_width_, dp_width_));
    b_.backward(g.rightCols(dp_width_));
  }
}

std::vector<Param*> Pnn::params() {
  std::vector<Param*> out;
  for (Sequential* s : {&si_, &e_, &b_, &head_})
    for (Param* p : s->params()) out.push_back(p);
  return out;
}

Fcl::Fcl(const InputShape& shape, const FclConfig& config, std::uint64_t seed) : Network(shape) {
  shape.validate();
  add_dense_stack(net_, "fcl", 2 * shape.num_sensors * shape.feature_size, config.hidden,
                  shape.outputs, seed);
}

Mat Fcl::forward(const Batch& batch) {
  Mat x(batch.size(), batch.powers.cols() + batch.bins.cols());
  x << batch.powers, batch.bins;
  return net_.forward(x);
}

void Fcl::backward(const Mat& grad_out) { net_.backward(grad_out); }

}  // namespace uwbpos::nn

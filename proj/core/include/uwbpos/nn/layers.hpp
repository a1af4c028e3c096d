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
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace uwbpos::nn {

// Activations are batches with one sample per row. Image-like tensors are
// stored channel-major inside a row: value (c, h, w) at c*H*W + h*W + w.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct Param {
  std::string name;
  Mat value;
  Mat grad;

  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}
};

// He-uniform fill, U(-sqrt(6/fan_in), sqrt(6/fan_in)), from a dedicated seed.
void he_uniform(Mat& w, int fan_in, std::uint64_t seed);

class Layer {
 public:
  virtual ~Layer() = default;
  // Caches what backward needs.
  virtual Mat forward(const Mat& x) = 0;
  // Accumulates parameter gradients and returns d(loss)/d(input).
  virtual Mat backward(const Mat& grad_out) = 0;
  virtual std::vector<Param*> params() { return {}; }
  virtual std::string kind() const = 0;
};

class Dense : public Layer {
 public:
  // Weights (out x in) drawn from `seed`; bias zero.
  Dense(std::string name, int in, int out, std::uint64_t seed);
  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  std::vector<Param*> params() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "dense"; }
  int in() const { return static_cast<int>(weight_.value.cols()); }
  int out() const { return static_cast<int>(weight_.value.rows()); }
  Param& weight() { return weight_; }
  Param& bias() { return bias_; }

 private:
  Param weight_;
  Param bias_;
  Mat input_;
};

// Square-kernel 2-D convolution with stride 1 and "same" zero padding over
// an H x W grid. Kernel size must be odd.
class Conv2d : public Layer {
 public:
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int height, int width,
         std::uint64_t seed);
  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  std::vector<Param*> params() override { return {&weight_, &bias_}; }
  std::string kind() const override { return "conv2d"; }
  int in_channels() const { return in_c_; }
  int out_channels() const { return out_c_; }
  int output_size() const { return out_c_ * h_ * w_; }
  Param& weight() { return weight_; }  // out_c x (in_c * k * k)
  Param& bias() { return bias_; }      // out_c x 1

 private:
  void im2col(const double* x, Mat& cols) const;
  void col2im(const Mat& cols, double* dx) const;

  int in_c_, out_c_, k_, h_, w_;
  Param weight_;
  Param bias_;
  Mat input_;
};

class Relu : public Layer {
 public:
  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  std::string kind() const override { return "relu"; }

 private:
  Mat output_;
};

class Sequential : public Layer {
 public:
  Sequential() = default;
  void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  std::vector<Param*> params() override;
  std::string kind() const override { return "sequential"; }
  std::size_t size() const { return layers_.size(); }
  Layer& at(std::size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace uwbpos::nn

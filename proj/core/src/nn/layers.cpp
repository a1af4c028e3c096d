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

#include "uwbpos/nn/layers.hpp"

#include <cmath>
#include <random>
#include <string>

#include "uwbpos/error.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos::nn {
namespace {

void check_cols(const Mat& x, Eigen::Index expected, const std::string& who) {
  if (x.cols() != expected) {
    throw InputError(who + ": expected " + std::to_string(expected) + " columns, got " +
                     std::to_string(x.cols()));
  }
}

}  // namespace

void he_uniform(Mat& w, int fan_in, std::uint64_t seed) {
  Rng rng(seed);
  const double limit = std::sqrt(6.0 / std::max(fan_in, 1));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
}

Dense::Dense(std::string name, int in, int out, std::uint64_t seed)
    : weight_(name + ".weight", out, in), bias_(name + ".bias", 1, out) {
  if (in < 1 || out < 1) throw InputError("dense " + name + ": sizes must be positive");
  he_uniform(weight_.value, in, seed);
}

Mat Dense::forward(const Mat& x) {
  check_cols(x, weight_.value.cols(), weight_.name);
  input_ = x;
  Mat y = x * weight_.value.transpose();
  y.rowwise() += bias_.value.row(0);
  return y;
}

Mat Dense::backward(const Mat& grad_out) {
  check_cols(grad_out, weight_.value.rows(), weight_.name);
  weight_.grad.noalias() += grad_out.transpose() * input_;
  bias_.grad += grad_out.colwise().sum();
  return grad_out * weight_.value;
}

Conv2d::Conv2d(std::string name, int in_channels, int out_channels, int kernel, int height,
               int width, std::uint64_t seed)
    : in_c_(in_channels),
      out_c_(out_channels),
      k_(kernel),
      h_(height),
      w_(width),
      weight_(name + ".weight", out_channels, in_channels * kernel * kernel),
      bias_(name + ".bias", out_channels, 1) {
  if (in_c_ < 1 || out_c_ < 1 || h_ < 1 || w_ < 1) {
    throw InputError("conv2d " + name + ": sizes must be positive");
  }
  if (k_ < 1 || k_ % 2 == 0) throw InputError("conv2d " + name + ": kernel must be odd");
  he_uniform(weight_.value, in_c_ * k_ * k_, seed);
}

void Conv2d::im2col(const double* x, Mat& cols) const {
  const int pad = k_ / 2;
  const int hw = h_ * w_;
  cols.setZero(in_c_ * k_ * k_, hw);
  for (int c = 0; c < in_c_; ++c) {
    const double* plane = x + c * hw;
    for (int ki = 0; ki < k_; ++ki) {
      for (int kj = 0; kj < k_; ++kj) {
        double* dst = cols.row((c * k_ + ki) * k_ + kj).data();
        for (int i = 0; i < h_; ++i) {
          const int si = i + ki - pad;
          if (si < 0 || si >= h_) continue;
          const int j0 = std::max(0, pad - kj);
          const int j1 = std::min(w_, w_ + pad - kj);
          for (int j = j0; j < j1; ++j) dst[i * w_ + j] = plane[si * w_ + j + kj - pad];
        }
      }
    }
  }
}

void Conv2d::col2im(const Mat& cols, double* dx) const {
  const int pad = k_ / 2;
  const int hw = h_ * w_;
  for (int c = 0; c < in_c_; ++c) {
    double* plane = dx + c * hw;
    for (int ki = 0; ki < k_; ++ki) {
      for (int kj = 0; kj < k_; ++kj) {
        const double* src = cols.row((c * k_ + ki) * k_ + kj).data();
        for (int i = 0; i < h_; ++i) {
          const int si = i + ki - pad;
          if (si < 0 || si >= h_) continue;
          const int j0 = std::max(0, pad - kj);
          const int j1 = std::min(w_, w_ + pad - kj);
          for (int j = j0; j < j1; ++j) plane[si * w_ + j + kj - pad] += src[i * w_ + j];
        }
      }
    }
  }
}

Mat Conv2d::forward(const Mat& x) {
  check_cols(x, static_cast<Eigen::Index>(in_c_) * h_ * w_, weight_.name);
  input_ = x;
  const int hw = h_ * w_;
  Mat y(x.rows(), static_cast<Eigen::Index>(out_c_) * hw);
  Mat cols;
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    im2col(x.row(s).data(), cols);
    Eigen::Map<Mat> out(y.row(s).data(), out_c_, hw);
    out.noalias() = weight_.value * cols;
    out.colwise() += bias_.value.col(0);
  }
  return y;
}

Mat Conv2d::backward(const Mat& grad_out) {
  const int hw = h_ * w_;
  check_cols(grad_out, static_cast<Eigen::Index>(out_c_) * hw, weight_.name);
  Mat dx = Mat::Zero(input_.rows(), input_.cols());
  Mat cols, dcols;
  for (Eigen::Index s = 0; s < grad_out.rows(); ++s) {
    Eigen::Map<const Mat> g(grad_out.row(s).data(), out_c_, hw);
    im2col(input_.row(s).data(), cols);
    weight_.grad.noalias() += g * cols.transpose();
    bias_.grad += g.rowwise().sum();
    dcols.noalias() = weight_.value.transpose() * g;
    col2im(dcols, dx.row(s).data());
  }
  return dx;
}

Mat Relu::forward(const Mat& x) {
  output_ = x.cwiseMax(0.0);
  return output_;
}

Mat Relu::backward(const Mat& grad_out) {
  return (output_.array() > 0.0).select(grad_out, 0.0);
}

Mat Sequential::forward(const Mat& x) {
  Mat h = x;
  for (auto& l : layers_) h = l->forward(h);
  return h;
}

Mat Sequential::backward(const Mat& grad_out) {
  Mat g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<Param*> Sequential::params() {
  std::vector<Param*> out;
  for (auto& l : layers_)
    for (Param* p : l->params()) out.push_back(p);
  return out;
}

}  // namespace uwbpos::nn

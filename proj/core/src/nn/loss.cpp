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

#include "uwbpos/nn/loss.hpp"

#include <cmath>
#include <string>

#include "uwbpos/error.hpp"

namespace uwbpos::nn {

Mat softmax_rows(const Mat& logits) {
  Mat p = logits;
  const Eigen::VectorXd mx = p.rowwise().maxCoeff();
  p.colwise() -= mx;
  p = p.array().exp();
  const Eigen::VectorXd sum = p.rowwise().sum();
  p.array().colwise() /= sum.array();
  return p;
}

LossResult softmax_xent(const Mat& logits, std::span<const int> labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows()) {
    throw InputError("softmax_xent: one label per row required");
  }
  LossResult r;
  r.grad = softmax_rows(logits);
  const double n = static_cast<double>(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= logits.cols()) {
      throw InputError("softmax_xent: label " + std::to_string(y) + " out of range");
    }
    // log-sum-exp form keeps the loss finite for saturated logits.
    const double mx = logits.row(i).maxCoeff();
    const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
    r.loss += lse - logits(i, y);
    r.grad(i, y) -= 1.0;
  }
  r.loss /= n;
  r.grad /= n;
  return r;
}

LossResult mse(const Mat& pred, const Mat& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw InputError("mse: prediction and target shapes differ");
  }
  const double n = static_cast<double>(pred.rows());
  const Mat diff = pred - target;
  return {diff.squaredNorm() / n, 2.0 * diff / n};
}

}  // namespace uwbpos::nn

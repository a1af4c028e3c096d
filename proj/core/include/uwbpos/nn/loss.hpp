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

#include <span>

#include "uwbpos/nn/layers.hpp"

namespace uwbpos::nn {

struct LossResult {
  double loss = 0;  // mean over the batch
  Mat grad;         // d(loss)/d(prediction)
};

// Row-wise softmax probabilities.
Mat softmax_rows(const Mat& logits);

// Mean cross-entropy of softmax(logits) against integer labels.
LossResult softmax_xent(const Mat& logits, std::span<const int> labels);

// Mean over samples of the summed squared error.
LossResult mse(const Mat& pred, const Mat& target);

}  // namespace uwbpos::nn

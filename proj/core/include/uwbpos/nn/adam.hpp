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

#include <vector>

#include "uwbpos/nn/layers.hpp"

namespace uwbpos::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<Param*> params, AdamConfig config = {});
  // Applies one update from the accumulated gradients, then clears them.
  void step();
  void zero_grad();
  long steps() const { return t_; }

 private:
  std::vector<Param*> params_;
  std::vector<Mat> m_, v_;
  AdamConfig cfg_;
  long t_ = 0;
};

}  // namespace uwbpos::nn

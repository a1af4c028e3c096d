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

#include "uwbpos/nn/layers.hpp"

namespace uwbpos::nn {

// Self-attention over the N = H*W positions of a C-channel map X (C x N):
//   Q = W_q X, K = W_k X, V = W_v X            (D x N each)
//   A = column-softmax(Q^T K)                  (N x N, columns sum to 1)
//   O = W_z V A                                (C x N)
//   Y = omega * O + X
// omega starts at exactly 0, so a fresh layer is the identity. Forward and
// backward stream over column blocks of the N x N map and never hold all of
// it; backward recomputes the blocks it needs and reuses the cached V A.
class SelfAttention : public Layer {
 public:
  SelfAttention(std::string name, int channels, int key_dim, int positions, std::uint64_t seed);
  Mat forward(const Mat& x) override;
  Mat backward(const Mat& grad_out) override;
  std::vector<Param*> params() override { return {&wq_, &wk_, &wv_, &wz_, &omega_}; }
  std::string kind() const override { return "attention"; }

  struct Maps {
    Mat q, k, v;
    Eigen::MatrixXd a;  // column-major so per-column softmax work is contiguous
    Mat va, o;
  };
  // Full intermediates for one sample given as a C x N map, for inspection.
  Maps compute(const Mat& x) const;

  int channels() const { return c_; }
  int positions() const { return n_; }
  Param& wq() { return wq_; }
  Param& wk() { return wk_; }
  Param& wv() { return wv_; }
  Param& wz() { return wz_; }
  Param& omega() { return omega_; }

 private:
  int c_, d_, n_;
  Param wq_, wk_, wv_, wz_, omega_;
  Mat input_;
  std::vector<Eigen::MatrixXd> va_cache_;  // V A per sample of the last forward
};

// In-place softmax of every column.
void column_softmax(Eigen::MatrixXd& s);

}  // namespace uwbpos::nn

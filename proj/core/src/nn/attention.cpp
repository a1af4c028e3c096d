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

#include "uwbpos/nn/attention.hpp"

#include <algorithm>
#include <string>

#include "uwbpos/error.hpp"
#include "uwbpos/rng.hpp"

namespace uwbpos::nn {

void column_softmax(Eigen::MatrixXd& s) {
  for (Eigen::Index j = 0; j < s.cols(); ++j) s.col(j).array() -= s.col(j).maxCoeff();
  s.array() = s.array().exp();
  for (Eigen::Index j = 0; j < s.cols(); ++j) s.col(j) /= s.col(j).sum();
}

SelfAttention::SelfAttention(std::string name, int channels, int key_dim, int positions,
                             std::uint64_t seed)
    : c_(channels),
      d_(key_dim),
      n_(positions),
      wq_(name + ".wq", key_dim, channels),
      wk_(name + ".wk", key_dim, channels),
      wv_(name + ".wv", key_dim, channels),
      wz_(name + ".wz", channels, key_dim),
      omega_(name + ".omega", 1, 1) {
  if (c_ < 1 || d_ < 1 || n_ < 1) throw InputError("attention " + name + ": sizes must be positive");
  he_uniform(wq_.value, c_, derive_seed(seed, "wq"));
  he_uniform(wk_.value, c_, derive_seed(seed, "wk"));
  he_uniform(wv_.value, c_, derive_seed(seed, "wv"));
  he_uniform(wz_.value, d_, derive_seed(seed, "wz"));
  omega_.value(0, 0) = 0.0;
}

SelfAttention::Maps SelfAttention::compute(const Mat& x) const {
  if (x.rows() != c_ || x.cols() != n_) {
    throw InputError("attention: expected a " + std::to_string(c_) + "x" + std::to_string(n_) +
                     " map");
  }
  Maps m;
  m.q.noalias() = wq_.value * x;
  m.k.noalias() = wk_.value * x;
  m.v.noalias() = wv_.value * x;
  m.a.noalias() = m.q.transpose() * m.k;
  column_softmax(m.a);
  m.va.noalias() = m.v * m.a;
  m.o.noalias() = wz_.value * m.va;
  return m;
}

namespace {

// Columns of the N x N map handled at once. Softmax normalizes each column on
// its own, so forward and backward can stream over column blocks that stay in
// cache instead of materializing the whole map.
constexpr Eigen::Index kBlock = 64;

using ColMat = Eigen::MatrixXd;

// V A, one column block of A = column-softmax(Q^T K) at a time.
ColMat attend(const ColMat& q, const ColMat& k, const ColMat& v, ColMat& block) {
  const Eigen::Index n = q.cols();
  ColMat va(v.rows(), n);
  for (Eigen::Index j0 = 0; j0 < n; j0 += kBlock) {
    const Eigen::Index b = std::min(kBlock, n - j0);
    block.resize(n, b);
    block.noalias() = q.transpose() * k.middleCols(j0, b);
    column_softmax(block);
    va.middleCols(j0, b).noalias() = v * block;
  }
  return va;
}

}  // namespace

Mat SelfAttention::forward(const Mat& x) {
  if (x.cols() != static_cast<Eigen::Index>(c_) * n_) {
    throw InputError("attention " + wq_.name + ": input width does not match C*N");
  }
  input_ = x;
  va_cache_.resize(static_cast<std::size_t>(x.rows()));
  const double omega = omega_.value(0, 0);
  Mat y = x;
  ColMat block;
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    const Eigen::Map<const Mat> xs(x.row(s).data(), c_, n_);
    const ColMat q = wq_.value * xs, k = wk_.value * xs, v = wv_.value * xs;
    va_cache_[s] = attend(q, k, v, block);
    Eigen::Map<Mat>(y.row(s).data(), c_, n_) = omega * (wz_.value * va_cache_[s]) + xs;
  }
  return y;
}

Mat SelfAttention::backward(const Mat& grad_out) {
  if (grad_out.rows() != static_cast<Eigen::Index>(va_cache_.size()) ||
      grad_out.cols() != input_.cols()) {
    throw InputError("attention " + wq_.name + ": backward does not match the last forward");
  }
  const double omega = omega_.value(0, 0);
  Mat dx(grad_out.rows(), grad_out.cols());
  ColMat a, d_s;
  for (Eigen::Index s = 0; s < grad_out.rows(); ++s) {
    const Eigen::Map<const Mat> xs(input_.row(s).data(), c_, n_);
    const Eigen::Map<const Mat> dy(grad_out.row(s).data(), c_, n_);
    const ColMat q = wq_.value * xs, k = wk_.value * xs, v = wv_.value * xs;
    const ColMat& va = va_cache_[s];

    const ColMat o = wz_.value * va;
    omega_.grad(0, 0) += (dy.array() * o.array()).sum();
    const ColMat d_o = omega * dy;
    wz_.grad.noalias() += d_o * va.transpose();
    const ColMat d_va = wz_.value.transpose() * d_o;

    ColMat d_q = ColMat::Zero(d_, n_), d_k(d_, n_), d_v = ColMat::Zero(d_, n_);
    for (Eigen::Index j0 = 0; j0 < n_; j0 += kBlock) {
      const Eigen::Index b = std::min<Eigen::Index>(kBlock, n_ - j0);
      a.resize(n_, b);
      a.noalias() = q.transpose() * k.middleCols(j0, b);
      column_softmax(a);
      const auto d_va_blk = d_va.middleCols(j0, b);
      d_v.noalias() += d_va_blk * a.transpose();
      d_s.resize(n_, b);
      d_s.noalias() = v.transpose() * d_va_blk;  // dA, turned into dS below
      // Column softmax backward: dS_ij = A_ij (dA_ij - sum_k A_kj dA_kj).
      for (Eigen::Index j = 0; j < b; ++j) {
        const auto aj = a.col(j).array();
        auto g = d_s.col(j).array();
        g = aj * (g - (aj * g).sum());
      }
      d_q.noalias() += k.middleCols(j0, b) * d_s.transpose();
      d_k.middleCols(j0, b).noalias() = q * d_s;
    }

    wq_.grad.noalias() += d_q * xs.transpose();
    wk_.grad.noalias() += d_k * xs.transpose();
    wv_.grad.noalias() += d_v * xs.transpose();
    Eigen::Map<Mat> dxs(dx.row(s).data(), c_, n_);
    dxs = dy;
    dxs.noalias() += wq_.value.transpose() * d_q;
    dxs.noalias() += wk_.value.transpose() * d_k;
    dxs.noalias() += wv_.value.transpose() * d_v;
  }
  return dx;
}

}  // namespace uwbpos::nn

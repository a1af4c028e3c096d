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

#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "grad_check.hpp"
#include "uwbpos/error.hpp"
#include "uwbpos/nn/adam.hpp"
#include "uwbpos/nn/attention.hpp"
#include "uwbpos/nn/layers.hpp"
#include "uwbpos/nn/loss.hpp"

namespace uwbpos::nn {
namespace {

using testing::numeric_gradient;
using testing::random_mat;
using testing::relative_error;

constexpr double kTol = 1e-4;

// Scalar probe loss L = sum(G .* layer(x)); dL/dy = G.
struct Probe {
  Layer& layer;
  Mat x;
  Mat g;
  double operator()() { return (layer.forward(x).array() * g.array()).sum(); }
};

void check_layer(Layer& layer, Mat x, Eigen::Index out_cols, std::mt19937_64& rng) {
  Probe probe{layer, std::move(x), random_mat(0, 0, rng)};
  probe.g = random_mat(probe.x.rows(), out_cols, rng);
  for (Param* p : layer.params()) p->grad.setZero();
  layer.forward(probe.x);
  const Mat dx = layer.backward(probe.g);

  const Mat num_dx = numeric_gradient(probe.x, std::ref(probe));
  EXPECT_LT(relative_error(dx, num_dx), kTol) << layer.kind() << " input";
  for (Param* p : layer.params()) {
    const Mat analytic = p->grad;
    const Mat numeric = numeric_gradient(p->value, std::ref(probe));
    EXPECT_LT(relative_error(analytic, numeric), kTol) << p->name;
  }
}

class GradientSuite : public ::testing::TestWithParam<int> {};

TEST_P(GradientSuite, Dense) {
  std::mt19937_64 rng(GetParam());
  Dense d("d", 7, 5, GetParam());
  d.bias().value = random_mat(1, 5, rng);
  check_layer(d, random_mat(4, 7, rng), 5, rng);
}

TEST_P(GradientSuite, Conv) {
  std::mt19937_64 rng(100 + GetParam());
  // 4 channels over a 6 x 8 grid.
  Conv2d c("c", 4, 3, 3, 6, 8, GetParam());
  c.bias().value = random_mat(3, 1, rng);
  check_layer(c, random_mat(2, 4 * 6 * 8, rng), 3 * 6 * 8, rng);
}

TEST_P(GradientSuite, ConvWideKernel) {
  std::mt19937_64 rng(200 + GetParam());
  Conv2d c("c", 2, 2, 5, 4, 3, GetParam());
  check_layer(c, random_mat(2, 2 * 4 * 3, rng), 2 * 4 * 3, rng);
}

TEST_P(GradientSuite, Relu) {
  std::mt19937_64 rng(300 + GetParam());
  Mat x = random_mat(3, 10, rng);
  // Keep inputs away from the kink so central differences are valid.
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x.data()[i]) < 0.05) x.data()[i] = 0.5;
  Relu r;
  check_layer(r, x, 10, rng);
}

TEST_P(GradientSuite, Attention) {
  std::mt19937_64 rng(400 + GetParam());
  SelfAttention a("a", 32, 8, 12, GetParam());
  a.omega().value(0, 0) = 0.7;
  // Small weights keep the softmax away from saturation.
  for (Param* p : a.params())
    if (p->value.size() > 1) p->value *= 0.3;
  check_layer(a, random_mat(2, 32 * 12, rng), 32 * 12, rng);
}

TEST_P(GradientSuite, AttentionAtZeroGate) {
  std::mt19937_64 rng(500 + GetParam());
  SelfAttention a("a", 32, 8, 12, GetParam());
  check_layer(a, random_mat(1, 32 * 12, rng), 32 * 12, rng);
}

TEST_P(GradientSuite, SoftmaxCrossEntropy) {
  std::mt19937_64 rng(600 + GetParam());
  Mat logits = random_mat(5, 4, rng);
  std::vector<int> labels = {0, 3, 1, 1, 2};
  const Mat analytic = softmax_xent(logits, labels).grad;
  const Mat numeric = numeric_gradient(logits, [&] { return softmax_xent(logits, labels).loss; });
  EXPECT_LT(relative_error(analytic, numeric), kTol);
}

TEST_P(GradientSuite, MeanSquaredError) {
  std::mt19937_64 rng(700 + GetParam());
  Mat pred = random_mat(6, 3, rng);
  const Mat target = random_mat(6, 3, rng);
  const Mat analytic = mse(pred, target).grad;
  const Mat numeric = numeric_gradient(pred, [&] { return mse(pred, target).loss; });
  EXPECT_LT(relative_error(analytic, numeric), kTol);
}

TEST_P(GradientSuite, DenseStackWithHead) {
  std::mt19937_64 rng(800 + GetParam());
  Sequential s;
  s.add(std::make_unique<Dense>("h1", 6, 9, GetParam()));
  s.add(std::make_unique<Relu>());
  s.add(std::make_unique<Dense>("h2", 9, 4, GetParam() + 1));
  Mat x = random_mat(5, 6, rng);
  const std::vector<int> labels = {0, 1, 2, 3, 1};
  for (Param* p : s.params()) p->grad.setZero();
  const LossResult l = softmax_xent(s.forward(x), labels);
  s.backward(l.grad);
  auto loss = [&] { return softmax_xent(s.forward(x), labels).loss; };
  for (Param* p : s.params()) {
    const Mat analytic = p->grad;
    EXPECT_LT(relative_error(analytic, numeric_gradient(p->value, loss)), kTol) << p->name;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, GradientSuite, ::testing::Range(1, 21));

TEST(Attention, ZeroGateIsIdentity) {
  std::mt19937_64 rng(1);
  SelfAttention a("a", 32, 8, 30, 5);
  const Mat x = random_mat(3, 32 * 30, rng);
  const Mat y = a.forward(x);
  EXPECT_TRUE((y.array() == x.array()).all());
}

TEST(Attention, ZeroQueryKeyGivesUniformMap) {
  std::mt19937_64 rng(2);
  SelfAttention a("a", 32, 8, 20, 6);
  a.wq().value.setZero();
  a.wk().value.setZero();
  const auto maps = a.compute(random_mat(32, 20, rng));
  for (Eigen::Index i = 0; i < maps.a.size(); ++i) EXPECT_NEAR(maps.a.data()[i], 1.0 / 20, 1e-15);
}

TEST(Attention, ColumnsSumToOne) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    SelfAttention a("a", 32, 8, 40, t);
    const auto maps = a.compute(random_mat(32, 40, rng, 2.0));
    const Eigen::RowVectorXd sums = maps.a.colwise().sum();
    for (Eigen::Index j = 0; j < sums.size(); ++j) ASSERT_NEAR(sums(j), 1.0, 1e-12);
  }
}

TEST(Attention, GateGradientIsInnerProduct) {
  std::mt19937_64 rng(4);
  SelfAttention a("a", 32, 8, 12, 7);
  const Mat x = random_mat(1, 32 * 12, rng);
  const Mat g = random_mat(1, 32 * 12, rng);
  a.forward(x);
  a.backward(g);
  const auto maps = a.compute(Eigen::Map<const Mat>(x.data(), 32, 12));
  const double expected = (Eigen::Map<const Mat>(g.data(), 32, 12).array() * maps.o.array()).sum();
  EXPECT_NEAR(a.omega().grad(0, 0), expected, 1e-12 * std::abs(expected));
}

TEST(Attention, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(5);
  SelfAttention a("a", 32, 8, 12, 8);
  a.omega().value(0, 0) = 0.4;
  a.forward(random_mat(2, 32 * 12, rng));
  const Mat dx = a.backward(Mat::Zero(2, 32 * 12));
  EXPECT_EQ(dx.norm(), 0.0);
  for (Param* p : a.params()) EXPECT_EQ(p->grad.norm(), 0.0) << p->name;
}

TEST(Attention, RejectsWrongShape) {
  SelfAttention a("a", 32, 8, 12, 9);
  EXPECT_THROW(a.forward(Mat::Zero(1, 32 * 11)), InputError);
}

TEST(Conv, IdentityOneByOne) {
  std::mt19937_64 rng(6);
  Conv2d c("c", 3, 3, 1, 4, 5, 1);
  c.weight().value = Mat::Identity(3, 3);
  const Mat x = random_mat(2, 3 * 20, rng);
  EXPECT_TRUE((c.forward(x).array() == x.array()).all());
}

TEST(Conv, MatchesDirectSum) {
  std::mt19937_64 rng(7);
  const int ci = 2, co = 3, k = 3, h = 4, w = 5;
  Conv2d c("c", ci, co, k, h, w, 2);
  c.bias().value = random_mat(co, 1, rng);
  const Mat x = random_mat(1, ci * h * w, rng);
  const Mat y = c.forward(x);
  for (int o = 0; o < co; ++o) {
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        double s = c.bias().value(o, 0);
        for (int q = 0; q < ci; ++q)
          for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
              const int si = i + a - 1, sj = j + b - 1;
              if (si < 0 || si >= h || sj < 0 || sj >= w) continue;
              s += c.weight().value(o, (q * k + a) * k + b) * x(0, q * h * w + si * w + sj);
            }
        EXPECT_NEAR(y(0, o * h * w + i * w + j), s, 1e-12);
      }
    }
  }
}

TEST(Conv, RejectsShapeMismatch) {
  Conv2d c("c", 2, 2, 3, 4, 4, 1);
  EXPECT_THROW(c.forward(Mat::Zero(1, 31)), InputError);
  EXPECT_THROW(Conv2d("c", 1, 1, 2, 4, 4, 1), InputError);
  Dense d("d", 3, 2, 1);
  EXPECT_THROW(d.forward(Mat::Zero(1, 4)), InputError);
}

TEST(Loss, XentVanishesForConfidentSpike) {
  double prev = INFINITY;
  for (double spike : {1.0, 5.0, 20.0, 100.0, 800.0}) {
    Mat logits = Mat::Zero(1, 4);
    logits(0, 2) = spike;
    const std::vector<int> label = {2};
    const double l = softmax_xent(logits, label).loss;
    EXPECT_LE(l, prev);
    EXPECT_GE(l, 0.0);
    EXPECT_TRUE(std::isfinite(l));
    prev = l;
  }
  EXPECT_LT(prev, 1e-12);
  Mat wrong = Mat::Zero(1, 4);
  wrong(0, 0) = 800.0;
  const std::vector<int> label = {2};
  EXPECT_NEAR(softmax_xent(wrong, label).loss, 800.0, 1e-9);
}

TEST(Loss, SoftmaxRowsSumToOne) {
  std::mt19937_64 rng(8);
  const Mat p = softmax_rows(random_mat(10, 7, rng, 30.0));
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Param p("p", 1, 3);
  p.value << 1.0, 2.0, 3.0;
  p.grad << 0.5, -2.0, 1e-3;
  Adam opt({&p}, {0.01, 0.9, 0.999, 1e-8});
  opt.step();
  // Bias-corrected first step is lr * sign(g) for |g| >> eps.
  EXPECT_NEAR(p.value(0, 0), 0.99, 1e-9);
  EXPECT_NEAR(p.value(0, 1), 2.01, 1e-9);
  EXPECT_NEAR(p.value(0, 2), 2.99, 1e-6);
  EXPECT_EQ(p.grad.norm(), 0.0);
}

TEST(Adam, MinimizesQuadratic) {
  Param p("p", 1, 2);
  p.value << 3.0, -4.0;
  Adam opt({&p}, {0.05});
  for (int i = 0; i < 2000; ++i) {
    p.grad = 2.0 * p.value;
    opt.step();
  }
  EXPECT_LT(p.value.norm(), 1e-2);
}

}  // namespace
}  // namespace uwbpos::nn

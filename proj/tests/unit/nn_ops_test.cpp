// Copyright 2026 The TerraSeg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support/oracles.hpp"
#include "terraseg/error.hpp"
#include "terraseg/nn/activation.hpp"
#include "terraseg/nn/batch_norm.hpp"
#include "terraseg/nn/conv.hpp"
#include "terraseg/nn/dropout.hpp"
#include "terraseg/nn/loss.hpp"
#include "terraseg/nn/pool.hpp"

namespace terraseg::nn {
namespace {

using testing::inner;
using testing::max_relative_error;
using testing::numeric_gradient;

constexpr double kGradTol = 1e-4;

// ---------------------------------------------------------------- conv2d

TEST(Conv2d, UnitKernelIsIdentity) {
  SeededRng rng(1);
  Tensor x = tensor_random({1, 5, 5}, rng, -1, 1);
  Tensor k({1, 1, 1, 1}, 1.0);
  Tensor b({1}, 0.0);
  EXPECT_TRUE(conv2d(x, k, b, 1, 0) == x);
}

TEST(Conv2d, ConstantInputAllOnesKernel) {
  const double c = 1.75;
  Tensor x({1, 6, 6}, c);
  Tensor k({1, 1, 3, 3}, 1.0);
  Tensor y = conv2d(x, k, Tensor({1}, 0.0), 1, 0);
  ASSERT_EQ(y.shape(), (Shape{1, 4, 4}));
  for (double v : y.values()) EXPECT_DOUBLE_EQ(v, 9 * c);
}

TEST(Conv2d, SentinelTileShape) {
  Tensor x({4, 256, 256}, 0.5);
  Tensor k({8, 4, 3, 3}, 0.01);
  Tensor y = conv2d(x, k, Tensor({8}, 0.0), 1, 1);
  EXPECT_EQ(y.shape(), (Shape{8, 256, 256}));
}

TEST(Conv2d, MatchesNaiveLoop) {
  SeededRng rng(2);
  for (std::size_t stride : {1u, 2u}) {
    for (std::size_t pad : {0u, 1u}) {
      Tensor x = tensor_random({3, 7, 7}, rng, -1, 1);
      Tensor k = tensor_random({2, 3, 3, 3}, rng, -1, 1);
      Tensor b = tensor_random({2}, rng, -1, 1);
      Tensor fast = conv2d(x, k, b, stride, pad);
      Tensor slow = testing::naive_conv2d(x, k, b, stride, pad);
      ASSERT_EQ(fast.shape(), slow.shape());
      EXPECT_LT(max_abs_diff(fast, slow), 1e-12);
    }
  }
}

TEST(Conv2d, ShapeErrors) {
  Tensor x({2, 6, 6}, 0.0);
  EXPECT_THROW(conv2d(x, Tensor({1, 3, 3, 3}, 0.0), Tensor(), 1, 0),
               ShapeError);
  // (6 - 3) / 2 is not integral.
  EXPECT_THROW(conv2d(x, Tensor({1, 2, 3, 3}, 0.0), Tensor(), 2, 0),
               ShapeError);
  EXPECT_THROW(conv2d(x, Tensor({1, 2, 7, 7}, 0.0), Tensor(), 1, 0),
               ShapeError);
}

TEST(Conv2d, GradientsMatchFiniteDifferences) {
  SeededRng rng(3);
  struct Case { std::size_t stride, pad, batch; };
  for (Case cs : {Case{1, 1, 1}, Case{2, 0, 1}, Case{1, 0, 2}}) {
    Tensor x = tensor_random({cs.batch, 2, 5, 5}, rng, -1, 1);
    Tensor k = tensor_random({3, 2, 3, 3}, rng, -1, 1);
    Tensor b = tensor_random({3}, rng, -1, 1);
    Tensor y = conv2d(x, k, b, cs.stride, cs.pad);
    Tensor r = tensor_random(y.shape(), rng, -1, 1);
    auto loss = [&](const Tensor& xx, const Tensor& kk, const Tensor& bb) {
      return inner(conv2d(xx, kk, bb, cs.stride, cs.pad), r);
    };
    ConvGrads g = conv2d_backward(x, k, cs.stride, cs.pad, r);
    EXPECT_LT(max_relative_error(
                  g.input, numeric_gradient(
                               [&](const Tensor& t) { return loss(t, k, b); }, x)),
              kGradTol);
    EXPECT_LT(max_relative_error(
                  g.kernels,
                  numeric_gradient([&](const Tensor& t) { return loss(x, t, b); },
                                   k)),
              kGradTol);
    EXPECT_LT(max_relative_error(
                  g.bias, numeric_gradient(
                              [&](const Tensor& t) { return loss(x, k, t); }, b)),
              kGradTol);
  }
}

// ------------------------------------------------------ conv2d_transpose

TEST(Conv2dTranspose, UnitKernelIsIdentity) {
  SeededRng rng(4);
  Tensor x = tensor_random({1, 4, 4}, rng, -1, 1);
  EXPECT_TRUE(conv2d_transpose(x, Tensor({1, 1, 1, 1}, 1.0), 1) == x);
}

TEST(Conv2dTranspose, StrideTwoDoubles) {
  Tensor x({1, 2, 2}, 1.0);
  Tensor k({1, 3, 2, 2}, 1.0);
  Tensor y = conv2d_transpose(x, k, 2);
  EXPECT_EQ(y.shape(), (Shape{3, 4, 4}));
  for (double v : y.values()) EXPECT_EQ(v, 1.0);
}

TEST(Conv2dTranspose, IsAdjointOfConv) {
  SeededRng rng(5);
  for (std::size_t stride : {1u, 2u}) {
    for (int trial = 0; trial < 20; ++trial) {
      Tensor x = tensor_random({2, 5, 5}, rng, -1, 1);
      Tensor k = tensor_random({3, 2, 3, 3}, rng, -1, 1);
      Tensor cx = conv2d(x, k, Tensor(), stride, 0);
      Tensor y = tensor_random(cx.shape(), rng, -1, 1);
      Tensor ty = conv2d_transpose(y, k, stride);
      ASSERT_EQ(ty.shape(), x.shape());
      EXPECT_NEAR(inner(cx, y), inner(x, ty), 1e-10);
    }
  }
}

TEST(Conv2dTranspose, GradientsMatchFiniteDifferences) {
  SeededRng rng(6);
  Tensor x = tensor_random({2, 2, 3, 3}, rng, -1, 1);
  Tensor k = tensor_random({2, 3, 2, 2}, rng, -1, 1);
  Tensor b = tensor_random({3}, rng, -1, 1);
  Tensor y = conv2d_transpose(x, k, b, 2);
  ASSERT_EQ(y.shape(), (Shape{2, 3, 6, 6}));
  Tensor r = tensor_random(y.shape(), rng, -1, 1);
  ConvGrads g = conv2d_transpose_backward(x, k, 2, r);
  auto f = [&](const Tensor& xx, const Tensor& kk, const Tensor& bb) {
    return inner(conv2d_transpose(xx, kk, bb, 2), r);
  };
  EXPECT_LT(max_relative_error(
                g.input,
                numeric_gradient([&](const Tensor& t) { return f(t, k, b); }, x)),
            kGradTol);
  EXPECT_LT(max_relative_error(
                g.kernels,
                numeric_gradient([&](const Tensor& t) { return f(x, t, b); }, k)),
            kGradTol);
  EXPECT_LT(max_relative_error(
                g.bias,
                numeric_gradient([&](const Tensor& t) { return f(x, k, t); }, b)),
            kGradTol);
}

// ------------------------------------------------------------- pooling

Tensor worked_example() {
  return Tensor({1, 4, 4}, {1, 2, 5, 6, 3, 4, 7, 8, 9, 10, 13, 14, 11, 12, 15, 16});
}

TEST(MaxPool, WorkedExample) {
  PoolResult r = max_pool2d(worked_example(), 2, 2);
  ASSERT_EQ(r.output.shape(), (Shape{1, 2, 2}));
  EXPECT_EQ(r.output[0], 4);
  EXPECT_EQ(r.output[1], 8);
  EXPECT_EQ(r.output[2], 12);
  EXPECT_EQ(r.output[3], 16);
  // Flat positions of 4, 8, 12, 16 in the 4x4 input.
  EXPECT_EQ(r.indices.flat, (std::vector<std::size_t>{5, 7, 13, 15}));
}

TEST(MaxPool, ConstantInputTieGoesToFirstCell) {
  PoolResult r = max_pool2d(Tensor({2, 4, 4}, 3.0), 2, 2);
  for (double v : r.output.values()) EXPECT_EQ(v, 3.0);
  EXPECT_EQ(r.indices.flat,
            (std::vector<std::size_t>{0, 2, 8, 10, 16, 18, 24, 26}));
}

TEST(MaxPool, HalvesSpatialDims) {
  PoolResult r = max_pool2d(Tensor({3, 16, 8}, 0.0), 2, 2);
  EXPECT_EQ(r.output.shape(), (Shape{3, 8, 4}));
}

TEST(MaxPool, ShapeErrors) {
  EXPECT_THROW(max_pool2d(Tensor({1, 1, 1}, 0.0), 2, 2), ShapeError);
  EXPECT_THROW(max_pool2d(Tensor({1, 5, 4}, 0.0), 2, 2), ShapeError);
}

TEST(MaxPool, IndicesStayInsideTheirWindow) {
  SeededRng rng(8);
  Tensor x = tensor_random({2, 3, 6, 6}, rng, -1, 1);
  PoolResult r = max_pool2d(x, 2, 2);
  const std::size_t per_plane = 9;
  for (std::size_t j = 0; j < r.indices.flat.size(); ++j) {
    const std::size_t plane = j / per_plane;
    const std::size_t oy = (j % per_plane) / 3, ox = j % 3;
    const std::size_t p = r.indices.flat[j] - plane * 36;
    EXPECT_EQ(p / 6 / 2, oy);
    EXPECT_EQ(p % 6 / 2, ox);
  }
}

TEST(MaxPool, GradientMatchesFiniteDifferences) {
  SeededRng rng(9);
  Tensor x = tensor_random({2, 4, 6}, rng, -1, 1);
  PoolResult r = max_pool2d(x, 2, 2);
  Tensor w = tensor_random(r.output.shape(), rng, -1, 1);
  Tensor g = max_pool2d_backward(w, r.indices);
  Tensor n = numeric_gradient(
      [&](const Tensor& t) { return inner(max_pool2d(t, 2, 2).output, w); }, x);
  EXPECT_LT(max_relative_error(g, n), kGradTol);
}

TEST(MinAvgPool, Values) {
  Tensor mn = min_pool2d(worked_example(), 2, 2);
  EXPECT_EQ(mn.values()[0], 1);
  EXPECT_EQ(mn.values()[3], 13);
  Tensor av = avg_pool2d(worked_example(), 2, 2);
  EXPECT_DOUBLE_EQ(av.values()[0], 2.5);
  EXPECT_DOUBLE_EQ(av.values()[3], 14.5);
}

TEST(Unpool, WorkedExamplePlacement) {
  PoolResult r = max_pool2d(worked_example(), 2, 2);
  Tensor u = unpool_with_indices(r.output, r.indices, {1, 4, 4});
  // Placement oracle: every cell equal to its window max keeps it, rest 0.
  const std::vector<double> expected{0, 0, 0, 0, 0, 4, 0, 8,
                                     0, 0, 0, 0, 0, 12, 0, 16};
  EXPECT_EQ(std::vector<double>(u.values().begin(), u.values().end()),
            expected);
  EXPECT_DOUBLE_EQ(u.sum(), r.output.sum());
}

TEST(Unpool, OutOfBoundsIndexIsCorruption) {
  PoolResult r = max_pool2d(worked_example(), 2, 2);
  r.indices.flat[2] = 99;
  EXPECT_THROW(unpool_with_indices(r.output, r.indices, {1, 4, 4}),
               IntegrityError);
}

TEST(Unpool, GradientMatchesFiniteDifferences) {
  SeededRng rng(10);
  Tensor x = tensor_random({2, 4, 4}, rng, -1, 1);
  PoolResult r = max_pool2d(x, 2, 2);
  Tensor p = tensor_random(r.output.shape(), rng, -1, 1);
  Tensor w = tensor_random(x.shape(), rng, -1, 1);
  Tensor g = unpool_backward(w, r.indices);
  Tensor n = numeric_gradient(
      [&](const Tensor& t) {
        return inner(unpool_with_indices(t, r.indices, x.shape()), w);
      },
      p);
  EXPECT_LT(max_relative_error(g, n), kGradTol);
}

// ----------------------------------------------------------- batch norm

TEST(BatchNorm, NormalizedInputPassesThrough) {
  // Channel with mean 0 and biased variance 1.
  Tensor x({1, 2, 2}, {1, -1, 1, -1});
  RunningStats rs = RunningStats::fresh(1);
  Tensor y = batch_norm(x, Tensor({1}, 1.0), Tensor({1}, 0.0), 1e-12, rs, true);
  EXPECT_LE(max_abs_diff(x, y), 1e-9);
}

TEST(BatchNorm, TrainingMomentsAndAffineLaw) {
  SeededRng rng(11);
  Tensor x = tensor_random({3, 2, 5, 5}, rng, -4, 9);
  for (auto [gm, bt] : {std::pair{1.0, 0.0}, std::pair{2.0, 3.0}}) {
    RunningStats rs = RunningStats::fresh(2);
    Tensor y = batch_norm(x, Tensor({2}, gm), Tensor({2}, bt), 1e-12, rs, true);
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0, ss = 0;
      for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t j = 0; j < 25; ++j) s += y[(n * 2 + c) * 25 + j];
      const double mean = s / 75;
      for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t j = 0; j < 25; ++j) {
          const double d = y[(n * 2 + c) * 25 + j] - mean;
          ss += d * d;
        }
      EXPECT_NEAR(mean, bt, 1e-9);
      EXPECT_NEAR(std::sqrt(ss / 75), gm, 1e-9);
    }
  }
}

TEST(BatchNorm, InferenceUsesRunningStats) {
  RunningStats rs{Tensor({1}, 2.0), Tensor({1}, 4.0), 0.9};
  Tensor x({1, 1, 2}, {2.0, 6.0});
  Tensor y = batch_norm(x, Tensor({1}, 1.0), Tensor({1}, 0.0), 1e-12, rs, false);
  EXPECT_NEAR(y[0], 0.0, 1e-12);
  EXPECT_NEAR(y[1], 2.0, 1e-9);
  EXPECT_EQ(rs.mean[0], 2.0);  // untouched
}

TEST(BatchNorm, RejectsNonPositiveEps) {
  RunningStats rs = RunningStats::fresh(1);
  Tensor x({1, 2, 2}, 1.0);
  EXPECT_THROW(batch_norm(x, Tensor({1}, 1.0), Tensor({1}, 0.0), 0.0, rs, true),
               ParameterError);
}

TEST(BatchNorm, GradientsMatchFiniteDifferences) {
  SeededRng rng(12);
  Tensor x = tensor_random({2, 3, 3, 3}, rng, -2, 2);
  Tensor gamma = tensor_random({3}, rng, 0.5, 1.5);
  Tensor beta = tensor_random({3}, rng, -1, 1);
  Tensor r = tensor_random(x.shape(), rng, -1, 1);
  for (bool training : {true, false}) {
    RunningStats base{tensor_random({3}, rng, -1, 1),
                      tensor_random({3}, rng, 0.5, 2), 0.9};
    auto f = [&](const Tensor& xx, const Tensor& gg, const Tensor& bb) {
      RunningStats rs = base;
      return inner(batch_norm(xx, gg, bb, 1e-5, rs, training), r);
    };
    RunningStats rs = base;
    BatchNormCache cache;
    batch_norm(x, gamma, beta, 1e-5, rs, training, &cache);
    BatchNormGrads g = batch_norm_backward(r, gamma, cache);
    EXPECT_LT(max_relative_error(
                  g.input, numeric_gradient(
                               [&](const Tensor& t) { return f(t, gamma, beta); },
                               x)),
              kGradTol);
    EXPECT_LT(max_relative_error(
                  g.gamma, numeric_gradient(
                               [&](const Tensor& t) { return f(x, t, beta); },
                               gamma)),
              kGradTol);
    EXPECT_LT(max_relative_error(
                  g.beta, numeric_gradient(
                              [&](const Tensor& t) { return f(x, gamma, t); },
                              beta)),
              kGradTol);
  }
}

// --------------------------------------------------------------- dropout

TEST(Dropout, IdentityCases) {
  SeededRng rng(13);
  Tensor x = tensor_random({2, 4, 4}, rng, -1, 1);
  EXPECT_TRUE(dropout(x, 0.0, rng, true) == x);
  EXPECT_TRUE(dropout(x, 0.7, rng, false) == x);
}

TEST(Dropout, InvertedScalingKeepsMean) {
  SeededRng rng(14);
  Tensor x({10000}, 1.0);
  Tensor y = dropout(x, 0.5, rng, true);
  // Each element is 0 or 2 with equal probability: sd of the mean is 0.01.
  EXPECT_NEAR(y.sum() / 10000.0, 1.0, 3 * 0.01);
  for (double v : y.values()) EXPECT_TRUE(v == 0.0 || v == 2.0);
}

TEST(Dropout, MaskIsTheBackwardRule) {
  SeededRng a(15), b(15);
  Tensor x = tensor_random({3, 3, 3}, a, -1, 1);
  Tensor mask;
  Tensor y = dropout(x, 0.3, b, true, &mask);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(y[i], x[i] * mask[i]);
}

TEST(Dropout, RejectsBadRate) {
  SeededRng rng(0);
  Tensor x({2}, 1.0);
  EXPECT_THROW(dropout(x, 1.0, rng, true), ParameterError);
  EXPECT_THROW(dropout(x, -0.1, rng, true), ParameterError);
}

// ----------------------------------------------------------- activations

TEST(Activation, FixedPoints) {
  EXPECT_EQ(activate(Activation::sigmoid(), 0.0), 0.5);
  EXPECT_EQ(activate(Activation::tanh(), 0.0), 0.0);
  EXPECT_EQ(activate(Activation::elu(), 0.0), 0.0);
  EXPECT_EQ(activate(Activation::relu(), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(activate(Activation::leaky_relu(0.1), -1.0), -0.1);
}

TEST(Activation, RejectsNonPositiveAlpha) {
  EXPECT_THROW(Activation::elu(0.0), ParameterError);
  EXPECT_THROW(Activation::leaky_relu(-0.2), ParameterError);
  Activation bad{ActivationKind::kElu, 0.0};
  EXPECT_THROW(activate(bad, Tensor({1}, 0.0)), ParameterError);
}

TEST(Activation, RangesOnRandomInputs) {
  SeededRng rng(16);
  Tensor x = tensor_random({5000}, rng, -30, 30);
  const Activation elu = Activation::elu(0.3);
  for (double v : x.values()) {
    const double s = activate(Activation::sigmoid(), v);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    const double t = activate(Activation::tanh(), v);
    EXPECT_GE(t, -1.0);
    EXPECT_LE(t, 1.0);
    EXPECT_GE(activate(Activation::relu(), v), 0.0);
    if (v != 0.0) EXPECT_NE(activate(Activation::leaky_relu(), v), 0.0);
    EXPECT_GT(activate(elu, v), -0.3);
  }
}

TEST(Activation, DerivativesMatchFiniteDifferences) {
  SeededRng rng(17);
  const std::vector<Activation> kinds{
      Activation::sigmoid(), Activation::tanh(), Activation::elu(0.2),
      Activation::relu(), Activation::leaky_relu(0.3)};
  for (const auto& act : kinds) {
    Tensor x = tensor_random({200}, rng, -4, 4);
    // Keep evaluation points off the kink at 0.
    for (auto& v : x.values()) {
      if (std::abs(v) < 1e-3) v = v < 0 ? -1e-3 : 1e-3;
    }
    Tensor analytic = activate_grad(act, x);
    Tensor numeric(x.shape(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double h = testing::kFiniteDiffStep;
      numeric[i] = (activate(act, x[i] + h) - activate(act, x[i] - h)) / (2 * h);
    }
    EXPECT_LT(max_relative_error(analytic, numeric), kGradTol)
        << to_string(act.kind);
  }
}

TEST(Activation, ClosedFormDerivativesAgree) {
  // sigma' = e^-x / (1 + e^-x)^2 and ELU' = ELU + alpha for x <= 0.
  const Activation elu = Activation::elu(0.25);
  for (double x : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
    const double e = std::exp(-x);
    EXPECT_NEAR(activate_grad(Activation::sigmoid(), x), e / ((1 + e) * (1 + e)),
                1e-15);
    if (x <= 0) {
      EXPECT_NEAR(activate_grad(elu, x), 0.25 * std::exp(x), 1e-15);
    }
  }
  EXPECT_EQ(activate_grad(Activation::relu(), 0.0), 0.0);
  EXPECT_EQ(activate_grad(Activation::leaky_relu(0.1), 0.0), 0.1);
}

// --------------------------------------------------------------- softmax

TEST(Softmax, UniformAndWorkedExample) {
  Tensor u = softmax(Tensor({2, 1, 1}, 0.0));
  EXPECT_EQ(u[0], 0.5);
  EXPECT_EQ(u[1], 0.5);

  Tensor s = softmax(Tensor({3, 1, 1}, {1, 2, 3}));
  // Long-double evaluation of e^x_i / sum e^x_j.
  long double z = std::exp(1.0L) + std::exp(2.0L) + std::exp(3.0L);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(s[i], static_cast<double>(std::exp(1.0L + i) / z), 1e-15);
  }
  EXPECT_NEAR(s[0], 0.090031, 1e-6);
  EXPECT_NEAR(s[1], 0.244728, 1e-6);
  EXPECT_NEAR(s[2], 0.665241, 1e-6);
}

TEST(Softmax, ShiftInvarianceAndNoOverflow) {
  SeededRng rng(18);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor x = tensor_random({4, 3, 3}, rng, -5, 5);
    Tensor shifted = x;
    for (auto& v : shifted.values()) v += 100.0;
    EXPECT_LE(max_abs_diff(softmax(x), softmax(shifted)), 1e-12);
  }
  Tensor big = softmax(Tensor({2, 1, 1}, {1000.0, 999.0}));
  EXPECT_TRUE(std::isfinite(big[0]));
  EXPECT_NEAR(big[0] + big[1], 1.0, 1e-12);
}

TEST(Softmax, DistributionAndArgmaxProperties) {
  SeededRng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    Tensor x = tensor_random({2, 5, 3, 3}, rng, -8, 8);
    Tensor p = softmax(x);
    Tensor am_x = argmax_channels(x);
    Tensor am_p = argmax_channels(p);
    EXPECT_TRUE(am_x == am_p);
    for (std::size_t n = 0; n < 2; ++n)
      for (std::size_t j = 0; j < 9; ++j) {
        double s = 0;
        for (std::size_t c = 0; c < 5; ++c) {
          const double v = p[(n * 5 + c) * 9 + j];
          EXPECT_GT(v, 0.0);
          EXPECT_LT(v, 1.0);
          s += v;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
  }
}

TEST(Softmax, BackwardMatchesFiniteDifferences) {
  SeededRng rng(20);
  Tensor x = tensor_random({2, 4, 2, 3}, rng, -2, 2);
  Tensor w = tensor_random(x.shape(), rng, -1, 1);
  Tensor g = softmax_backward(softmax(x), w);
  Tensor n = numeric_gradient(
      [&](const Tensor& t) { return inner(softmax(t), w); }, x);
  EXPECT_LT(max_relative_error(g, n), kGradTol);
}

// ---------------------------------------------------------- cross entropy

Tensor onehot(const std::vector<int>& labels, std::size_t classes) {
  Tensor t({classes, 1, labels.size()}, 0.0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    t[labels[j] * labels.size() + j] = 1.0;
  }
  return t;
}

TEST(CrossEntropy, PerfectPredictionIsZero) {
  Tensor t = onehot({0, 2, 1}, 3);
  LossResult r = categorical_cross_entropy(t, t, Tensor());
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.valid_pixels, 3u);
}

TEST(CrossEntropy, UniformPredictionIsLogC) {
  for (std::size_t c : {2u, 4u, 8u}) {
    Tensor p({c, 1, 3}, 1.0 / static_cast<double>(c));
    Tensor t = onehot({0, 1, 1}, c);
    EXPECT_NEAR(categorical_cross_entropy(p, t, Tensor()).loss,
                std::log(static_cast<double>(c)), 1e-12);
  }
}

TEST(CrossEntropy, FullyIgnoredTileIsEmptyLoss) {
  Tensor t = onehot({0, 1}, 2);
  EXPECT_THROW(categorical_cross_entropy(t, t, Tensor({1, 2}, 1.0)), DataError);
}

TEST(CrossEntropy, RejectsUnnormalizedPrediction) {
  Tensor t = onehot({0, 1}, 2);
  EXPECT_THROW(categorical_cross_entropy(Tensor({2, 1, 2}, 0.7), t, Tensor()),
               DataError);
}

TEST(CrossEntropy, FoldedGradientMatchesFiniteDifferences) {
  SeededRng rng(21);
  Tensor logits = tensor_random({2, 3, 2, 2}, rng, -2, 2);
  Tensor target({2, 3, 2, 2}, 0.0);
  Tensor mask({2, 1, 2, 2}, 0.0);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t j = 0; j < 4; ++j) {
      target[(n * 3 + rng.below(3)) * 4 + j] = 1.0;
      mask[n * 4 + j] = rng.bernoulli(0.3) ? 1.0 : 0.0;
    }
  mask[0] = 0.0;
  LossResult r = categorical_cross_entropy(softmax(logits), target, mask);
  Tensor n = numeric_gradient(
      [&](const Tensor& z) {
        return categorical_cross_entropy(softmax(z), target, mask).loss;
      },
      logits);
  EXPECT_LT(max_relative_error(r.grad_logits, n), kGradTol);
  // Ignored pixels contribute no gradient.
  for (std::size_t nn = 0; nn < 2; ++nn)
    for (std::size_t j = 0; j < 4; ++j)
      if (mask[nn * 4 + j] != 0.0)
        for (std::size_t c = 0; c < 3; ++c)
          EXPECT_EQ(r.grad_logits[(nn * 3 + c) * 4 + j], 0.0);
}

}  // namespace
}  // namespace terraseg::nn

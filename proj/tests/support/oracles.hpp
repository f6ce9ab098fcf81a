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

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#ifndef TERRASEG_TESTS_SUPPORT_ORACLES_HPP_
#define TERRASEG_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "terraseg/tensor.hpp"

namespace terraseg::testing {

inline constexpr double kFiniteDiffStep = 1e-5;
// Gradient entries smaller than this are compared on an absolute scale.
inline constexpr double kRelErrorFloor = 1e-4;

/// Central finite differences of a scalar function of a tensor.
inline Tensor numeric_gradient(const std::function<double(const Tensor&)>& f,
                               const Tensor& x,
                               double h = kFiniteDiffStep) {
  Tensor g(x.shape(), 0.0);
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double fp = f(probe);
    probe[i] = orig - h;
    const double fm = f(probe);
    probe[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor).
inline double max_relative_error(const Tensor& analytic, const Tensor& numeric,
                                 double floor = kRelErrorFloor) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

/// <a, b> over all elements.
inline double inner(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Straightforward quadruple loop convolution used to cross-check shapes and
/// values: out[o][y][x] = b[o] + sum_i,ky,kx in[i][y*s+ky-p][x*s+kx-p] k[o][i][ky][kx].
inline Tensor naive_conv2d(const Tensor& in, const Tensor& k, const Tensor& b,
                           std::size_t s, std::size_t p) {
  const std::size_t C = in.extent(0), H = in.extent(1), W = in.extent(2);
  const std::size_t O = k.extent(0), KH = k.extent(2), KW = k.extent(3);
  const std::size_t OH = (H + 2 * p - KH) / s + 1;
  const std::size_t OW = (W + 2 * p - KW) / s + 1;
  Tensor out({O, OH, OW}, 0.0);
  for (std::size_t o = 0; o < O; ++o)
    for (std::size_t y = 0; y < OH; ++y)
      for (std::size_t x = 0; x < OW; ++x) {
        double acc = b.empty() ? 0.0 : b[o];
        for (std::size_t i = 0; i < C; ++i)
          for (std::size_t ky = 0; ky < KH; ++ky)
            for (std::size_t kx = 0; kx < KW; ++kx) {
              const long yy = static_cast<long>(y * s + ky) - static_cast<long>(p);
              const long xx = static_cast<long>(x * s + kx) - static_cast<long>(p);
              if (yy < 0 || xx < 0 || yy >= static_cast<long>(H) ||
                  xx >= static_cast<long>(W))
                continue;
              acc += in.at(i, yy, xx) *
                     k[((o * C + i) * KH + ky) * KW + kx];
            }
        out.at(o, y, x) = acc;
      }
  return out;
}

}  // namespace terraseg::testing

#endif  // TERRASEG_TESTS_SUPPORT_ORACLES_HPP_

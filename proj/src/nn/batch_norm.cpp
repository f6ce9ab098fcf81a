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

#include "terraseg/nn/batch_norm.hpp"

#include <cmath>

#include "terraseg/error.hpp"

namespace terraseg::nn {

RunningStats RunningStats::fresh(std::size_t channels, double momentum) {
  return {Tensor({channels}, 0.0), Tensor({channels}, 1.0), momentum};
}

Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                  double eps, RunningStats& running, bool training,
                  BatchNormCache* cache) {
  if (!(eps > 0.0)) throw ParameterError("batch_norm requires eps > 0");
  const ImageDims d = image_dims(input);
  if (gamma.size() != d.channels || beta.size() != d.channels ||
      running.mean.size() != d.channels ||
      running.variance.size() != d.channels) {
    throw ShapeError("batch_norm: per-channel parameters must have " +
                     std::to_string(d.channels) + " entries");
  }
  const std::size_t plane = d.plane();
  const double count = static_cast<double>(d.batch * plane);

  Tensor out(input.shape(), 0.0);
  Tensor normalized(input.shape(), 0.0);
  std::vector<double> inv_std(d.channels);

  for (std::size_t c = 0; c < d.channels; ++c) {
    double mean;
    double var;
    if (training) {
      double s = 0.0;
      for (std::size_t n = 0; n < d.batch; ++n) {
        const double* p = input.data() + (n * d.channels + c) * plane;
        for (std::size_t j = 0; j < plane; ++j) s += p[j];
      }
      mean = s / count;
      double ss = 0.0;
      for (std::size_t n = 0; n < d.batch; ++n) {
        const double* p = input.data() + (n * d.channels + c) * plane;
        for (std::size_t j = 0; j < plane; ++j) {
          const double dv = p[j] - mean;
          ss += dv * dv;
        }
      }
      var = ss / count;
      running.mean[c] =
          running.momentum * running.mean[c] + (1.0 - running.momentum) * mean;
      running.variance[c] = running.momentum * running.variance[c] +
                            (1.0 - running.momentum) * var;
    } else {
      mean = running.mean[c];
      var = running.variance[c];
    }
    inv_std[c] = 1.0 / std::sqrt(var + eps);
    for (std::size_t n = 0; n < d.batch; ++n) {
      const std::size_t off = (n * d.channels + c) * plane;
      for (std::size_t j = 0; j < plane; ++j) {
        const double xh = (input[off + j] - mean) * inv_std[c];
        normalized[off + j] = xh;
        out[off + j] = gamma[c] * xh + beta[c];
      }
    }
  }
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
    cache->training = training;
  }
  return out;
}

BatchNormGrads batch_norm_backward(const Tensor& grad_output,
                                   const Tensor& gamma,
                                   const BatchNormCache& cache) {
  if (grad_output.shape() != cache.normalized.shape()) {
    throw ShapeError("batch_norm_backward: gradient shape mismatch");
  }
  const ImageDims d = image_dims(grad_output);
  const std::size_t plane = d.plane();
  const double count = static_cast<double>(d.batch * plane);

  BatchNormGrads g{Tensor(grad_output.shape(), 0.0), Tensor({d.channels}, 0.0),
                   Tensor({d.channels}, 0.0)};
  for (std::size_t c = 0; c < d.channels; ++c) {
    double sum_g = 0.0;
    double sum_g_xh = 0.0;
    for (std::size_t n = 0; n < d.batch; ++n) {
      const std::size_t off = (n * d.channels + c) * plane;
      for (std::size_t j = 0; j < plane; ++j) {
        sum_g += grad_output[off + j];
        sum_g_xh += grad_output[off + j] * cache.normalized[off + j];
      }
    }
    g.beta[c] = sum_g;
    g.gamma[c] = sum_g_xh;
    const double scale = gamma[c] * cache.inv_std[c];
    for (std::size_t n = 0; n < d.batch; ++n) {
      const std::size_t off = (n * d.channels + c) * plane;
      for (std::size_t j = 0; j < plane; ++j) {
        if (cache.training) {
          g.input[off + j] =
              scale * (grad_output[off + j] - sum_g / count -
                       cache.normalized[off + j] * sum_g_xh / count);
        } else {
          g.input[off + j] = scale * grad_output[off + j];
        }
      }
    }
  }
  return g;
}

}  // namespace terraseg::nn

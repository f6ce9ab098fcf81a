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

#include "terraseg/nn/loss.hpp"

#include <cmath>
#include <limits>

#include "terraseg/error.hpp"

namespace terraseg::nn {

Tensor softmax(const Tensor& logits) {
  const ImageDims d = image_dims(logits);
  const std::size_t plane = d.plane();
  Tensor out(logits.shape(), 0.0);
  for (std::size_t n = 0; n < d.batch; ++n) {
    const std::size_t base = n * d.channels * plane;
    for (std::size_t j = 0; j < plane; ++j) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < d.channels; ++c) {
        m = std::max(m, logits[base + c * plane + j]);
      }
      double z = 0.0;
      for (std::size_t c = 0; c < d.channels; ++c) {
        const double e = std::exp(logits[base + c * plane + j] - m);
        out[base + c * plane + j] = e;
        z += e;
      }
      for (std::size_t c = 0; c < d.channels; ++c) {
        out[base + c * plane + j] /= z;
      }
    }
  }
  return out;
}

Tensor softmax_backward(const Tensor& probs, const Tensor& grad_probs) {
  if (probs.shape() != grad_probs.shape()) {
    throw ShapeError("softmax_backward: shape mismatch");
  }
  const ImageDims d = image_dims(probs);
  const std::size_t plane = d.plane();
  Tensor out(probs.shape(), 0.0);
  for (std::size_t n = 0; n < d.batch; ++n) {
    const std::size_t base = n * d.channels * plane;
    for (std::size_t j = 0; j < plane; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d.channels; ++c) {
        const std::size_t k = base + c * plane + j;
        dot += probs[k] * grad_probs[k];
      }
      for (std::size_t c = 0; c < d.channels; ++c) {
        const std::size_t k = base + c * plane + j;
        out[k] = probs[k] * (grad_probs[k] - dot);
      }
    }
  }
  return out;
}

LossResult categorical_cross_entropy(const Tensor& probs,
                                     const Tensor& target_onehot,
                                     const Tensor& ignore_mask) {
  if (probs.shape() != target_onehot.shape()) {
    throw ShapeError("cross entropy: prediction " +
                     shape_to_string(probs.shape()) + " vs target " +
                     shape_to_string(target_onehot.shape()));
  }
  const ImageDims d = image_dims(probs);
  const std::size_t plane = d.plane();
  const bool masked = !ignore_mask.empty();
  if (masked && ignore_mask.size() != d.batch * plane) {
    throw ShapeError("cross entropy: ignore mask has " +
                     std::to_string(ignore_mask.size()) + " entries, expected " +
                     std::to_string(d.batch * plane));
  }

  std::size_t valid = 0;
  for (std::size_t i = 0; i < d.batch * plane; ++i) {
    if (!masked || ignore_mask[i] == 0.0) ++valid;
  }
  if (valid == 0) {
    throw DataError("cross entropy: every pixel is ignored (empty loss)");
  }

  LossResult r;
  r.valid_pixels = valid;
  r.grad_logits = Tensor(probs.shape(), 0.0);
  const double inv_valid = 1.0 / static_cast<double>(valid);
  double total = 0.0;
  for (std::size_t n = 0; n < d.batch; ++n) {
    const std::size_t base = n * d.channels * plane;
    for (std::size_t j = 0; j < plane; ++j) {
      if (masked && ignore_mask[n * plane + j] != 0.0) continue;
      double psum = 0.0;
      double tsum = 0.0;
      for (std::size_t c = 0; c < d.channels; ++c) {
        const std::size_t k = base + c * plane + j;
        psum += probs[k];
        tsum += target_onehot[k];
        if (target_onehot[k] != 0.0) {
          total -= target_onehot[k] *
                   std::log(std::max(probs[k],
                                     std::numeric_limits<double>::min()));
        }
        r.grad_logits[k] = (probs[k] - target_onehot[k]) * inv_valid;
      }
      if (std::abs(psum - 1.0) > 1e-6) {
        throw DataError("cross entropy: prediction at pixel " +
                        std::to_string(j) + " does not sum to 1");
      }
      if (std::abs(tsum - 1.0) > 1e-12) {
        throw DataError("cross entropy: target at pixel " + std::to_string(j) +
                        " is not one-hot");
      }
    }
  }
  r.loss = total * inv_valid;
  return r;
}

Tensor argmax_channels(const Tensor& t) {
  const ImageDims d = image_dims(t);
  const std::size_t plane = d.plane();
  Shape shape = t.rank() == 3 ? Shape{d.height, d.width}
                              : Shape{d.batch, d.height, d.width};
  Tensor out(shape, 0.0);
  for (std::size_t n = 0; n < d.batch; ++n) {
    const std::size_t base = n * d.channels * plane;
    for (std::size_t j = 0; j < plane; ++j) {
      std::size_t best = 0;
      double best_value = t[base + j];
      for (std::size_t c = 1; c < d.channels; ++c) {
        const double v = t[base + c * plane + j];
        if (v > best_value) {
          best_value = v;
          best = c;
        }
      }
      out[n * plane + j] = static_cast<double>(best);
    }
  }
  return out;
}

}  // namespace terraseg::nn

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

#include "terraseg/nn/pool.hpp"

#include <limits>

#include "terraseg/error.hpp"

namespace terraseg::nn {

namespace {

struct PoolGeometry {
  ImageDims in;
  std::size_t oh;
  std::size_t ow;
};

PoolGeometry pool_geometry(const Tensor& input, std::size_t window,
                           std::size_t stride) {
  const ImageDims d = image_dims(input);
  if (window == 0 || stride == 0) {
    throw ShapeError("pool window and stride must be >= 1");
  }
  if (window > d.height || window > d.width) {
    throw ShapeError("pool window " + std::to_string(window) +
                     " larger than input " + shape_to_string(input.shape()));
  }
  if ((d.height - window) % stride != 0 || (d.width - window) % stride != 0) {
    throw ShapeError("pool window/stride do not divide input " +
                     shape_to_string(input.shape()));
  }
  return {d, (d.height - window) / stride + 1, (d.width - window) / stride + 1};
}

template <typename Reduce>
Tensor reduce_pool(const Tensor& input, std::size_t window, std::size_t stride,
                   Reduce reduce) {
  const PoolGeometry g = pool_geometry(input, window, stride);
  Tensor out(image_shape_like(input, g.in.batch, g.in.channels, g.oh, g.ow),
             0.0);
  double* dst = out.data();
  for (std::size_t plane = 0; plane < g.in.batch * g.in.channels; ++plane) {
    const double* src = input.data() + plane * g.in.plane();
    for (std::size_t y = 0; y < g.oh; ++y) {
      for (std::size_t x = 0; x < g.ow; ++x) {
        *dst++ = reduce(src, y * stride, x * stride, g.in.width);
      }
    }
  }
  return out;
}

}  // namespace

PoolResult max_pool2d(const Tensor& input, std::size_t window,
                      std::size_t stride) {
  const PoolGeometry g = pool_geometry(input, window, stride);
  PoolResult result;
  result.output =
      Tensor(image_shape_like(input, g.in.batch, g.in.channels, g.oh, g.ow),
             0.0);
  PoolIndices& idx = result.indices;
  idx.input_shape = input.shape();
  idx.output_shape = result.output.shape();
  idx.window = window;
  idx.stride = stride;
  idx.flat.resize(result.output.size());

  std::size_t j = 0;
  for (std::size_t plane = 0; plane < g.in.batch * g.in.channels; ++plane) {
    const std::size_t base = plane * g.in.plane();
    const double* src = input.data() + base;
    for (std::size_t y = 0; y < g.oh; ++y) {
      for (std::size_t x = 0; x < g.ow; ++x, ++j) {
        std::size_t best = (y * stride) * g.in.width + x * stride;
        double best_value = src[best];
        for (std::size_t wy = 0; wy < window; ++wy) {
          for (std::size_t wx = 0; wx < window; ++wx) {
            const std::size_t p = (y * stride + wy) * g.in.width + x * stride + wx;
            // Strict comparison keeps the first maximum in scan order.
            if (src[p] > best_value) {
              best_value = src[p];
              best = p;
            }
          }
        }
        result.output[j] = best_value;
        idx.flat[j] = base + best;
      }
    }
  }
  return result;
}

Tensor min_pool2d(const Tensor& input, std::size_t window, std::size_t stride) {
  return reduce_pool(input, window, stride,
                     [window](const double* src, std::size_t y0,
                              std::size_t x0, std::size_t width) {
                       double m = std::numeric_limits<double>::infinity();
                       for (std::size_t wy = 0; wy < window; ++wy) {
                         for (std::size_t wx = 0; wx < window; ++wx) {
                           const double v = src[(y0 + wy) * width + x0 + wx];
                           if (v < m) m = v;
                         }
                       }
                       return m;
                     });
}

Tensor avg_pool2d(const Tensor& input, std::size_t window, std::size_t stride) {
  const double scale = 1.0 / static_cast<double>(window * window);
  return reduce_pool(input, window, stride,
                     [window, scale](const double* src, std::size_t y0,
                                     std::size_t x0, std::size_t width) {
                       double s = 0.0;
                       for (std::size_t wy = 0; wy < window; ++wy) {
                         for (std::size_t wx = 0; wx < window; ++wx) {
                           s += src[(y0 + wy) * width + x0 + wx];
                         }
                       }
                       return s * scale;
                     });
}

Tensor max_pool2d_backward(const Tensor& grad_output,
                           const PoolIndices& indices) {
  if (grad_output.shape() != indices.output_shape) {
    throw ShapeError("max_pool2d_backward: gradient shape mismatch");
  }
  Tensor grad(indices.input_shape, 0.0);
  for (std::size_t j = 0; j < grad_output.size(); ++j) {
    grad[indices.flat[j]] += grad_output[j];
  }
  return grad;
}

Tensor unpool_with_indices(const Tensor& pooled, const PoolIndices& indices,
                           const Shape& out_shape) {
  if (pooled.shape() != indices.output_shape ||
      indices.flat.size() != pooled.size()) {
    throw ShapeError("unpool: pooled shape " + shape_to_string(pooled.shape()) +
                     " does not match indices " +
                     shape_to_string(indices.output_shape));
  }
  Tensor out(out_shape, 0.0);
  for (std::size_t j = 0; j < pooled.size(); ++j) {
    const std::size_t p = indices.flat[j];
    if (p >= out.size()) {
      throw IntegrityError("unpool: index " + std::to_string(p) +
                           " out of bounds for " + shape_to_string(out_shape));
    }
    out[p] = pooled[j];
  }
  return out;
}

Tensor unpool_backward(const Tensor& grad_output, const PoolIndices& indices) {
  Tensor grad(indices.output_shape, 0.0);
  for (std::size_t j = 0; j < grad.size(); ++j) {
    const std::size_t p = indices.flat[j];
    if (p >= grad_output.size()) {
      throw IntegrityError("unpool: index " + std::to_string(p) +
                           " out of bounds");
    }
    grad[j] = grad_output[p];
  }
  return grad;
}

}  // namespace terraseg::nn

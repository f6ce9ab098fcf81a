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

#ifndef TERRASEG_NN_POOL_HPP_
#define TERRASEG_NN_POOL_HPP_

#include <cstddef>
#include <vector>

#include "terraseg/tensor.hpp"

namespace terraseg::nn {

/// Argmax positions recorded by max_pool2d. `flat[j]` is the flat index, into
/// the pre-pool input, of the winner for pooled element j.
struct PoolIndices {
  Shape input_shape;
  Shape output_shape;
  std::size_t window = 0;
  std::size_t stride = 0;
  std::vector<std::size_t> flat;
};

struct PoolResult {
  Tensor output;
  PoolIndices indices;
};

/// Max pooling over window x window patches.
///
/// Spatial extents must satisfy (extent - window) % stride == 0; anything else
/// is rejected rather than implicitly padded. Ties go to the first cell of
/// the window in row-major scan order.
PoolResult max_pool2d(const Tensor& input, std::size_t window,
                      std::size_t stride);
Tensor min_pool2d(const Tensor& input, std::size_t window, std::size_t stride);
Tensor avg_pool2d(const Tensor& input, std::size_t window, std::size_t stride);

/// Input gradient of max_pool2d. Overlapping windows accumulate.
Tensor max_pool2d_backward(const Tensor& grad_output,
                           const PoolIndices& indices);

/// Places each pooled value at its recorded argmax in a zero tensor of
/// `out_shape`.
Tensor unpool_with_indices(const Tensor& pooled, const PoolIndices& indices,
                           const Shape& out_shape);

/// Gradient of unpool_with_indices with respect to the pooled tensor: gathers
/// the upstream gradient at each recorded index.
Tensor unpool_backward(const Tensor& grad_output, const PoolIndices& indices);

}  // namespace terraseg::nn

#endif  // TERRASEG_NN_POOL_HPP_

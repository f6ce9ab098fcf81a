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

#ifndef TERRASEG_NN_CONV_HPP_
#define TERRASEG_NN_CONV_HPP_

#include <cstddef>

#include "terraseg/tensor.hpp"

namespace terraseg::nn {

struct ConvGrads {
  Tensor input;
  Tensor kernels;
  Tensor bias;
};

/// 2-D cross-correlation (no kernel flip).
///
/// input is [in_ch, h, w] or [batch, in_ch, h, w]; kernels are
/// [out_ch, in_ch, kh, kw]; bias is [out_ch] or an empty tensor for none.
/// Output extent per axis is (h + 2*padding - kh) / stride + 1 and must be
/// integral.
Tensor conv2d(const Tensor& input, const Tensor& kernels, const Tensor& bias,
              std::size_t stride, std::size_t padding);

ConvGrads conv2d_backward(const Tensor& input, const Tensor& kernels,
                          std::size_t stride, std::size_t padding,
                          const Tensor& grad_output);

/// Transposed convolution, the adjoint of a valid conv2d with the same
/// kernels and stride.
///
/// kernels are [in_ch, out_ch, kh, kw], i.e. the kernel tensor of the conv2d
/// this operation is the adjoint of. Output extent is (h - 1) * stride + kh,
/// so a 2x2 kernel at stride 2 exactly doubles each spatial axis.
Tensor conv2d_transpose(const Tensor& input, const Tensor& kernels,
                        std::size_t stride);
Tensor conv2d_transpose(const Tensor& input, const Tensor& kernels,
                        const Tensor& bias, std::size_t stride);

ConvGrads conv2d_transpose_backward(const Tensor& input, const Tensor& kernels,
                                    std::size_t stride,
                                    const Tensor& grad_output);

}  // namespace terraseg::nn

#endif  // TERRASEG_NN_CONV_HPP_

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

#ifndef TERRASEG_NN_LOSS_HPP_
#define TERRASEG_NN_LOSS_HPP_

#include <cstddef>

#include "terraseg/tensor.hpp"

namespace terraseg::nn {

/// Softmax across the channel axis of a rank-3 or rank-4 image tensor, i.e.
/// independently for every pixel. Max-subtracted, so it never overflows.
Tensor softmax(const Tensor& logits);

/// Vector-Jacobian product of softmax: given probabilities p and dL/dp,
/// returns dL/dlogits = p * (g - <p, g>) per pixel.
Tensor softmax_backward(const Tensor& probs, const Tensor& grad_probs);

struct LossResult {
  double loss = 0.0;
  /// Gradient with respect to the logits that produced `probs` through
  /// softmax: (p - t) / valid_pixels on scored pixels, 0 on ignored ones.
  Tensor grad_logits;
  std::size_t valid_pixels = 0;
};

/// Mean of -log p_true over pixels that are not ignored.
///
/// probs and target_onehot share an image shape; ignore_mask holds one value
/// per pixel (any rank with batch*height*width elements), nonzero meaning
/// "excluded". An empty ignore_mask scores every pixel. Throws
/// DataError (empty loss) when every pixel is ignored.
LossResult categorical_cross_entropy(const Tensor& probs,
                                     const Tensor& target_onehot,
                                     const Tensor& ignore_mask);

/// Per-pixel argmax over channels; returns [batch, h, w] (or [h, w] for a
/// rank-3 input) class indices stored as doubles.
Tensor argmax_channels(const Tensor& t);

}  // namespace terraseg::nn

#endif  // TERRASEG_NN_LOSS_HPP_

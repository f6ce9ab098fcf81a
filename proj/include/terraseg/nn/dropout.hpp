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

#ifndef TERRASEG_NN_DROPOUT_HPP_
#define TERRASEG_NN_DROPOUT_HPP_

#include "terraseg/rng.hpp"
#include "terraseg/tensor.hpp"

namespace terraseg::nn {

/// Inverted dropout: in training, each element is zeroed with probability
/// `rate` and survivors are scaled by 1 / (1 - rate); in inference it is the
/// identity. When `mask` is non-null it receives the per-element multiplier,
/// which is also the backward rule (grad_in = grad_out * mask).
Tensor dropout(const Tensor& input, double rate, SeededRng& rng, bool training,
               Tensor* mask = nullptr);

}  // namespace terraseg::nn

#endif  // TERRASEG_NN_DROPOUT_HPP_

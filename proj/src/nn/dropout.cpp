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

#include "terraseg/nn/dropout.hpp"

#include "terraseg/error.hpp"

namespace terraseg::nn {

Tensor dropout(const Tensor& input, double rate, SeededRng& rng, bool training,
               Tensor* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ParameterError("dropout rate must lie in [0, 1)");
  }
  if (!training || rate == 0.0) {
    if (mask) *mask = Tensor(input.shape(), 1.0);
    return input;
  }
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor m(input.shape(), 0.0);
  Tensor out = input;
  for (std::size_t i = 0; i < out.size(); ++i) {
    m[i] = rng.bernoulli(rate) ? 0.0 : keep_scale;
    out[i] *= m[i];
  }
  if (mask) *mask = std::move(m);
  return out;
}

}  // namespace terraseg::nn

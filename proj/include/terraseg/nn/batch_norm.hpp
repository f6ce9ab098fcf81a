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

#ifndef TERRASEG_NN_BATCH_NORM_HPP_
#define TERRASEG_NN_BATCH_NORM_HPP_

#include <cstddef>
#include <vector>

#include "terraseg/tensor.hpp"

namespace terraseg::nn {

/// Exponential moving averages used at inference time.
///
/// With batch size 1 the batch statistics are per-sample (instance)
/// statistics; that is allowed but worth knowing when reading results.
struct RunningStats {
  Tensor mean;      // [channels]
  Tensor variance;  // [channels]
  double momentum = 0.9;

  static RunningStats fresh(std::size_t channels, double momentum = 0.9);
};

/// Saved forward state for batch_norm_backward.
struct BatchNormCache {
  Tensor normalized;             // x_hat, same shape as the input
  std::vector<double> inv_std;   // per channel
  bool training = false;
};

struct BatchNormGrads {
  Tensor input;
  Tensor gamma;
  Tensor beta;
};

/// Per-channel normalization followed by gamma * x_hat + beta.
///
/// Training mode normalizes with the biased batch moments over (batch, h, w)
/// and folds them into `running`; inference mode normalizes with `running`.
/// `cache` may be null when no backward pass follows.
Tensor batch_norm(const Tensor& input, const Tensor& gamma, const Tensor& beta,
                  double eps, RunningStats& running, bool training,
                  BatchNormCache* cache = nullptr);

BatchNormGrads batch_norm_backward(const Tensor& grad_output,
                                   const Tensor& gamma,
                                   const BatchNormCache& cache);

}  // namespace terraseg::nn

#endif  // TERRASEG_NN_BATCH_NORM_HPP_

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

#ifndef TERRASEG_TRAIN_OPTIMIZER_HPP_
#define TERRASEG_TRAIN_OPTIMIZER_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "terraseg/tensor.hpp"

namespace terraseg::train {

enum class OptimizerKind { kSgd, kAdam };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& name);

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  std::uint64_t t = 0;
  std::vector<Tensor> m;  // first moments, lazily shaped like the params
  std::vector<Tensor> v;  // second moments

  static OptimizerState sgd(double learning_rate);
  static OptimizerState adam(double learning_rate = 0.001, double beta1 = 0.9,
                             double beta2 = 0.999, double epsilon = 1e-7);
};

/// Throws ParameterError on lr <= 0, beta outside (0, 1) or epsilon <= 0.
void validate(const OptimizerState& state);

/// p <- p - lr * g. No momentum.
void sgd_step(OptimizerState& state, std::span<Tensor* const> params,
              std::span<const Tensor> grads);

/// Bias-corrected Adam update; increments t.
void adam_step(OptimizerState& state, std::span<Tensor* const> params,
               std::span<const Tensor> grads);

/// Dispatches on state.kind.
void optimizer_step(OptimizerState& state, std::span<Tensor* const> params,
                    std::span<const Tensor> grads);

}  // namespace terraseg::train

#endif  // TERRASEG_TRAIN_OPTIMIZER_HPP_

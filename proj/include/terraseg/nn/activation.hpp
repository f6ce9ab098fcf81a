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

#ifndef TERRASEG_NN_ACTIVATION_HPP_
#define TERRASEG_NN_ACTIVATION_HPP_

#include <string>
#include <string_view>

#include "terraseg/tensor.hpp"

namespace terraseg::nn {

enum class ActivationKind { kSigmoid, kTanh, kElu, kRelu, kLeakyRelu };

inline constexpr double kDefaultEluAlpha = 0.1;
inline constexpr double kDefaultLeakyAlpha = 0.1;

/// An activation function plus its slope parameter. alpha is only consulted
/// by ELU and LeakyReLU, where it must be positive.
struct Activation {
  ActivationKind kind = ActivationKind::kRelu;
  double alpha = 0.0;

  static Activation sigmoid() { return {ActivationKind::kSigmoid, 0.0}; }
  static Activation tanh() { return {ActivationKind::kTanh, 0.0}; }
  static Activation relu() { return {ActivationKind::kRelu, 0.0}; }
  static Activation elu(double alpha = kDefaultEluAlpha);
  static Activation leaky_relu(double alpha = kDefaultLeakyAlpha);

  /// Kinks at 0 (ReLU, LeakyReLU, ELU) make finite differences unreliable
  /// there.
  bool has_kink() const noexcept;

  friend bool operator==(const Activation&, const Activation&) = default;
};

void validate(const Activation& act);

double activate(const Activation& act, double x);
double activate_grad(const Activation& act, double x);

Tensor activate(const Activation& act, const Tensor& x);
/// Element-wise derivative evaluated at x.
Tensor activate_grad(const Activation& act, const Tensor& x);
/// grad_output * f'(x).
Tensor activate_backward(const Activation& act, const Tensor& x,
                         const Tensor& grad_output);

std::string to_string(ActivationKind kind);
/// Accepts "sigmoid", "tanh", "elu", "relu", "leaky_relu" (also "lrelu").
ActivationKind parse_activation_kind(std::string_view name);

}  // namespace terraseg::nn

#endif  // TERRASEG_NN_ACTIVATION_HPP_

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

#include "terraseg/nn/activation.hpp"

#include <cmath>

#include "terraseg/error.hpp"

namespace terraseg::nn {

Activation Activation::elu(double alpha) {
  Activation a{ActivationKind::kElu, alpha};
  validate(a);
  return a;
}

Activation Activation::leaky_relu(double alpha) {
  Activation a{ActivationKind::kLeakyRelu, alpha};
  validate(a);
  return a;
}

bool Activation::has_kink() const noexcept {
  return kind == ActivationKind::kRelu || kind == ActivationKind::kLeakyRelu ||
         kind == ActivationKind::kElu;
}

void validate(const Activation& act) {
  if ((act.kind == ActivationKind::kElu ||
       act.kind == ActivationKind::kLeakyRelu) &&
      !(act.alpha > 0.0)) {
    throw ParameterError(to_string(act.kind) + " requires alpha > 0");
  }
}

double activate(const Activation& act, double x) {
  switch (act.kind) {
    case ActivationKind::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::kTanh:
      return std::tanh(x);
    case ActivationKind::kElu:
      return x < 0.0 ? act.alpha * std::expm1(x) : x;
    case ActivationKind::kRelu:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::kLeakyRelu:
      return x > 0.0 ? x : act.alpha * x;
  }
  return x;
}

double activate_grad(const Activation& act, double x) {
  switch (act.kind) {
    case ActivationKind::kSigmoid: {
      // e^-x / (1 + e^-x)^2, written as s(1 - s) to avoid overflow of e^-x.
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case ActivationKind::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::kElu:
      return x <= 0.0 ? activate(act, x) + act.alpha : 1.0;
    case ActivationKind::kRelu:
      return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::kLeakyRelu:
      return x > 0.0 ? 1.0 : act.alpha;
  }
  return 1.0;
}

Tensor activate(const Activation& act, const Tensor& x) {
  validate(act);
  Tensor out = x;
  for (auto& v : out.values()) v = activate(act, v);
  return out;
}

Tensor activate_grad(const Activation& act, const Tensor& x) {
  validate(act);
  Tensor out = x;
  for (auto& v : out.values()) v = activate_grad(act, v);
  return out;
}

Tensor activate_backward(const Activation& act, const Tensor& x,
                         const Tensor& grad_output) {
  if (x.shape() != grad_output.shape()) {
    throw ShapeError("activation gradient shape mismatch");
  }
  Tensor out = grad_output;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] *= activate_grad(act, x[i]);
  }
  return out;
}

std::string to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid: return "sigmoid";
    case ActivationKind::kTanh: return "tanh";
    case ActivationKind::kElu: return "elu";
    case ActivationKind::kRelu: return "relu";
    case ActivationKind::kLeakyRelu: return "leaky_relu";
  }
  return "unknown";
}

ActivationKind parse_activation_kind(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::kSigmoid;
  if (name == "tanh") return ActivationKind::kTanh;
  if (name == "elu") return ActivationKind::kElu;
  if (name == "relu") return ActivationKind::kRelu;
  if (name == "leaky_relu" || name == "lrelu") return ActivationKind::kLeakyRelu;
  throw ParameterError("unknown activation '" + std::string(name) + "'");
}

}  // namespace terraseg::nn

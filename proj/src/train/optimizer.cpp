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

#include "terraseg/train/optimizer.hpp"

#include <cmath>

#include "terraseg/error.hpp"

namespace terraseg::train {

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd" || name == "SGD") return OptimizerKind::kSgd;
  if (name == "adam" || name == "Adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + name + "'");
}

OptimizerState OptimizerState::sgd(double learning_rate) {
  OptimizerState s;
  s.kind = OptimizerKind::kSgd;
  s.learning_rate = learning_rate;
  validate(s);
  return s;
}

OptimizerState OptimizerState::adam(double learning_rate, double beta1,
                                    double beta2, double epsilon) {
  OptimizerState s;
  s.learning_rate = learning_rate;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.epsilon = epsilon;
  validate(s);
  return s;
}

void validate(const OptimizerState& s) {
  if (!(s.learning_rate > 0.0)) throw ParameterError("learning rate must be > 0");
  if (s.kind == OptimizerKind::kAdam) {
    if (!(s.beta1 > 0.0 && s.beta1 < 1.0) || !(s.beta2 > 0.0 && s.beta2 < 1.0)) {
      throw ParameterError("Adam betas must lie in (0, 1)");
    }
    if (!(s.epsilon > 0.0)) throw ParameterError("Adam epsilon must be > 0");
  }
}

namespace {

void check_shapes(std::span<Tensor* const> params,
                  std::span<const Tensor> grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("optimizer: " + std::to_string(params.size()) +
                     " parameters but " + std::to_string(grads.size()) +
                     " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->shape() != grads[i].shape()) {
      throw ShapeError("optimizer: gradient " + shape_to_string(grads[i].shape()) +
                       " does not match parameter " +
                       shape_to_string(params[i]->shape()));
    }
  }
}

}  // namespace

void sgd_step(OptimizerState& state, std::span<Tensor* const> params,
              std::span<const Tensor> grads) {
  check_shapes(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] -= state.learning_rate * grads[i][k];
    }
  }
  ++state.t;
}

void adam_step(OptimizerState& state, std::span<Tensor* const> params,
               std::span<const Tensor> grads) {
  check_shapes(params, grads);
  if (state.m.empty() && state.t == 0) {
    for (Tensor* p : params) {
      state.m.emplace_back(p->shape(), 0.0);
      state.v.emplace_back(p->shape(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw StateError("Adam moments were built for a different parameter list");
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    if (m.shape() != p.shape()) {
      throw StateError("Adam moment shape differs from its parameter");
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double g = grads[i][k];
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g;
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      p[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

void optimizer_step(OptimizerState& state, std::span<Tensor* const> params,
                    std::span<const Tensor> grads) {
  if (state.kind == OptimizerKind::kSgd) {
    sgd_step(state, params, grads);
  } else {
    adam_step(state, params, grads);
  }
}

}  // namespace terraseg::train

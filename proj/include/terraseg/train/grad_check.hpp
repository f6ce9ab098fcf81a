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

#ifndef TERRASEG_TRAIN_GRAD_CHECK_HPP_
#define TERRASEG_TRAIN_GRAD_CHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "terraseg/tensor.hpp"
#include "terraseg/train/graph.hpp"

namespace terraseg::train {

struct GradCheckOptions {
  double step = 1e-5;        // central-difference step
  double floor = 1e-4;       // denominator floor of the relative error
  bool training = true;      // batch statistics in batch-norm nodes
  std::uint64_t dropout_seed = 0;
  std::size_t max_parameters = 10000;
  /// When nonzero, checks this many coordinates drawn with `sample_seed`
  /// instead of every one; required above max_parameters.
  std::size_t sample = 0;
  std::uint64_t sample_seed = 0;
  int max_nudges = 4;
  double nudge = 1e-3;
  bool include_input = false;  // also check d(loss)/d(input)
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst;          // "<node>.<param>[index]"
  std::size_t checked = 0;
  std::size_t nudged = 0;     // coordinates moved off a kink
  std::size_t skipped = 0;    // still straddling after max_nudges
};

/// Scalar loss used by grad_check: cross-entropy against `target` when the
/// graph ends in softmax, else 0.5 * ||output - target||^2. `ignore` may be
/// empty.
double check_loss(NetworkGraph& graph, const Tensor& input, const Tensor& target,
                  const Tensor& ignore, const GradCheckOptions& options = {});

/// Worst relative error max|a - n| / max(|a|, |n|, floor) between analytic
/// and central-difference gradients.
///
/// A coordinate whose +/-step evaluations change which side of a
/// non-differentiable point any activation input or pooling argmax sits on
/// is moved by +/- nudge * k (k = 1, 2, ...) and retried; after max_nudges
/// it is skipped and counted. Batch-norm running statistics are restored
/// afterwards. Throws ParameterError above max_parameters without sampling.
GradCheckResult grad_check(NetworkGraph& graph, const Tensor& input,
                           const Tensor& target, const Tensor& ignore = {},
                           const GradCheckOptions& options = {});

}  // namespace terraseg::train

#endif  // TERRASEG_TRAIN_GRAD_CHECK_HPP_

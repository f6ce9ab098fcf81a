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

#ifndef TERRASEG_TRAIN_ENGINE_HPP_
#define TERRASEG_TRAIN_ENGINE_HPP_

#include <cstdint>
#include <vector>

#include "terraseg/nn/batch_norm.hpp"
#include "terraseg/nn/pool.hpp"
#include "terraseg/tensor.hpp"
#include "terraseg/train/graph.hpp"

namespace terraseg::train {

/// Everything backward needs from one forward pass. Tensors are batched
/// [N, C, H, W] regardless of the rank of the input that was fed in.
struct ForwardCache {
  std::size_t graph_size = 0;
  bool training = false;
  bool batched_input = false;
  std::vector<Tensor> outputs;               // per node
  std::vector<nn::PoolIndices> pool_indices;  // per node, kMaxPool only
  std::vector<nn::BatchNormCache> bn;        // per node, kBatchNorm only
  std::vector<Tensor> dropout_masks;         // per node, kDropout only

  /// The graph output, in the rank of the original input.
  Tensor output(const NetworkGraph& graph) const;
};

struct Gradients {
  std::vector<Tensor> params;  // aligned with NetworkGraph::parameters()
  Tensor input;                // same rank as the original input
};

/// Evaluates every node in insertion order. Accepts [C,H,W] or [N,C,H,W].
/// Training mode uses batch statistics (and updates the running ones) and
/// samples dropout masks from `dropout_seed`.
ForwardCache forward(NetworkGraph& graph, const Tensor& input, bool training,
                     std::uint64_t dropout_seed = 0);

/// Output of a pure inference pass.
Tensor predict(NetworkGraph& graph, const Tensor& input);

/// Chain rule from the graph output.
Gradients backward(const NetworkGraph& graph, const ForwardCache& cache,
                   const Tensor& grad_output);

/// Chain rule seeded at an arbitrary node; nodes after it are skipped. The
/// trainer seeds the input of the softmax head with the folded
/// cross-entropy gradient.
Gradients backward_from(const NetworkGraph& graph, const ForwardCache& cache,
                        NodeId seed_node, const Tensor& grad);

/// Places `inner` centered inside a zero tensor of spatial size h x w; the
/// adjoint of crop_center.
Tensor uncrop_center(const Tensor& inner, std::size_t h, std::size_t w);

}  // namespace terraseg::train

#endif  // TERRASEG_TRAIN_ENGINE_HPP_

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

#include "terraseg/train/engine.hpp"

#include <algorithm>

#include "terraseg/error.hpp"
#include "terraseg/nn/activation.hpp"
#include "terraseg/nn/conv.hpp"
#include "terraseg/nn/dropout.hpp"
#include "terraseg/nn/loss.hpp"
#include "terraseg/rng.hpp"

namespace terraseg::train {

namespace {

Tensor as_batched(const Tensor& t) {
  if (t.rank() == 4) return t;
  const ImageDims d = image_dims(t);
  return t.reshape({1, d.channels, d.height, d.width});
}

Tensor as_caller_rank(const Tensor& t, bool batched) {
  if (batched) return t;
  const ImageDims d = image_dims(t);
  return t.reshape({d.channels, d.height, d.width});
}

void accumulate(Tensor& into, const Tensor& g) {
  if (into.empty()) {
    into = g;
    return;
  }
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += g[i];
}

Tensor sum_cropped(const std::vector<Tensor>& outs,
                   const std::vector<NodeId>& ids, std::size_t h,
                   std::size_t w) {
  Tensor acc = crop_center(outs[ids[0]], h, w);
  for (std::size_t k = 1; k < ids.size(); ++k) {
    const Tensor part = crop_center(outs[ids[k]], h, w);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += part[i];
  }
  return acc;
}

}  // namespace

Tensor uncrop_center(const Tensor& inner, std::size_t h, std::size_t w) {
  const ImageDims d = image_dims(inner);
  if (h < d.height || w < d.width) {
    throw ShapeError("uncrop target smaller than " +
                     shape_to_string(inner.shape()));
  }
  if (h == d.height && w == d.width) return inner;
  Tensor out(image_shape_like(inner, d.batch, d.channels, h, w), 0.0);
  const std::size_t oy = (h - d.height) / 2;
  const std::size_t ox = (w - d.width) / 2;
  for (std::size_t p = 0; p < d.batch * d.channels; ++p)
    for (std::size_t y = 0; y < d.height; ++y)
      for (std::size_t x = 0; x < d.width; ++x)
        out[(p * h + y + oy) * w + x + ox] =
            inner[(p * d.height + y) * d.width + x];
  return out;
}

Tensor ForwardCache::output(const NetworkGraph& graph) const {
  return as_caller_rank(outputs.at(graph.output_node()), batched_input);
}

ForwardCache forward(NetworkGraph& graph, const Tensor& input, bool training,
                     std::uint64_t dropout_seed) {
  if (input.rank() != 3 && input.rank() != 4) {
    throw GraphError("input must be [C,H,W] or [N,C,H,W], got " +
                     shape_to_string(input.shape()));
  }
  const NodeId in_id = graph.input_node();
  const Shape& want = graph.input_shape();
  const Tensor x = as_batched(input);
  if (!std::equal(want.begin(), want.end(), x.shape().begin() + 1)) {
    throw GraphError("node '" + graph.node(in_id).name + "': input " +
                     shape_to_string(input.shape()) + " does not match " +
                     shape_to_string(want));
  }

  const std::size_t n = graph.size();
  ForwardCache c;
  c.graph_size = n;
  c.training = training;
  c.batched_input = input.rank() == 4;
  c.outputs.resize(n);
  c.pool_indices.resize(n);
  c.bn.resize(n);
  c.dropout_masks.resize(n);

  for (NodeId i = 0; i < n; ++i) {
    Node& node = graph.node(i);
    auto in = [&](std::size_t k) -> const Tensor& {
      return c.outputs[node.inputs[k]];
    };
    try {
      switch (node.kind) {
        case NodeKind::kInput:
          c.outputs[i] = x;
          break;
        case NodeKind::kConv2d:
          c.outputs[i] = nn::conv2d(in(0), node.params[0].value,
                                    node.params[1].value, node.stride,
                                    node.padding);
          break;
        case NodeKind::kConvTranspose2d:
          c.outputs[i] = nn::conv2d_transpose(in(0), node.params[0].value,
                                              node.params[1].value, node.stride);
          break;
        case NodeKind::kMaxPool: {
          nn::PoolResult r = nn::max_pool2d(in(0), node.kernel, node.stride);
          c.outputs[i] = std::move(r.output);
          c.pool_indices[i] = std::move(r.indices);
          break;
        }
        case NodeKind::kUnpool: {
          const nn::PoolIndices& idx = c.pool_indices[node.pool_node];
          c.outputs[i] = nn::unpool_with_indices(in(0), idx, idx.input_shape);
          break;
        }
        case NodeKind::kBatchNorm:
          c.outputs[i] = nn::batch_norm(in(0), node.params[0].value,
                                        node.params[1].value, node.eps,
                                        node.running, training, &c.bn[i]);
          break;
        case NodeKind::kActivation:
          c.outputs[i] = nn::activate(node.activation, in(0));
          break;
        case NodeKind::kDropout: {
          SeededRng rng(derive_seed(dropout_seed, i, 0));
          c.outputs[i] = nn::dropout(in(0), node.rate, rng, training,
                                     &c.dropout_masks[i]);
          break;
        }
        case NodeKind::kConcat: {
          const std::size_t h = node.output_shape[1], w = node.output_shape[2];
          Tensor acc = crop_center(in(0), h, w);
          for (std::size_t k = 1; k < node.inputs.size(); ++k) {
            acc = concat_channels(acc, crop_center(in(k), h, w));
          }
          c.outputs[i] = std::move(acc);
          break;
        }
        case NodeKind::kAdd:
          c.outputs[i] = sum_cropped(c.outputs, node.inputs,
                                     node.output_shape[1], node.output_shape[2]);
          break;
        case NodeKind::kSoftmax:
          c.outputs[i] = nn::softmax(in(0));
          break;
      }
    } catch (const ShapeError& e) {
      throw GraphError("node '" + node.name + "': " + e.what());
    }
  }
  return c;
}

Tensor predict(NetworkGraph& graph, const Tensor& input) {
  return forward(graph, input, false).output(graph);
}

Gradients backward(const NetworkGraph& graph, const ForwardCache& cache,
                   const Tensor& grad_output) {
  return backward_from(graph, cache, graph.output_node(), grad_output);
}

Gradients backward_from(const NetworkGraph& graph, const ForwardCache& cache,
                        NodeId seed_node, const Tensor& grad) {
  const std::size_t n = graph.size();
  if (cache.graph_size != n || cache.outputs.size() != n ||
      cache.outputs.empty() || cache.outputs[0].empty()) {
    throw StateError("backward needs the cache of a forward pass over this graph");
  }
  if (seed_node >= n) throw GraphError("backward seed node out of range");
  const Tensor g0 = as_batched(grad);
  if (g0.shape() != cache.outputs[seed_node].shape()) {
    throw GraphError("node '" + graph.node(seed_node).name + "': gradient " +
                     shape_to_string(grad.shape()) + " does not match output " +
                     shape_to_string(cache.outputs[seed_node].shape()));
  }

  // Offsets of each node's parameters in the flat parameters() list.
  std::vector<std::size_t> first_param(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    first_param[i + 1] = first_param[i] + graph.node(i).params.size();
  }
  Gradients out;
  out.params.resize(first_param[n]);
  for (NodeId i = 0; i < n; ++i)
    for (std::size_t k = 0; k < graph.node(i).params.size(); ++k)
      out.params[first_param[i] + k] =
          Tensor(graph.node(i).params[k].value.shape(), 0.0);

  std::vector<Tensor> g(n);
  g[seed_node] = g0;
  for (NodeId ii = seed_node + 1; ii-- > 0;) {
    if (g[ii].empty()) continue;
    const Node& node = graph.node(ii);
    const Tensor& gi = g[ii];
    auto input_of = [&](std::size_t k) -> const Tensor& {
      return cache.outputs[node.inputs[k]];
    };
    auto push = [&](std::size_t k, const Tensor& t) {
      accumulate(g[node.inputs[k]], t);
    };
    switch (node.kind) {
      case NodeKind::kInput:
        break;
      case NodeKind::kConv2d:
      case NodeKind::kConvTranspose2d: {
        nn::ConvGrads cg =
            node.kind == NodeKind::kConv2d
                ? nn::conv2d_backward(input_of(0), node.params[0].value,
                                      node.stride, node.padding, gi)
                : nn::conv2d_transpose_backward(input_of(0), node.params[0].value,
                                                node.stride, gi);
        out.params[first_param[ii]] = std::move(cg.kernels);
        out.params[first_param[ii] + 1] = std::move(cg.bias);
        push(0, cg.input);
        break;
      }
      case NodeKind::kMaxPool:
        push(0, nn::max_pool2d_backward(gi, cache.pool_indices[ii]));
        break;
      case NodeKind::kUnpool:
        push(0, nn::unpool_backward(gi, cache.pool_indices[node.pool_node]));
        break;
      case NodeKind::kBatchNorm: {
        nn::BatchNormGrads bg =
            nn::batch_norm_backward(gi, node.params[0].value, cache.bn[ii]);
        out.params[first_param[ii]] = std::move(bg.gamma);
        out.params[first_param[ii] + 1] = std::move(bg.beta);
        push(0, bg.input);
        break;
      }
      case NodeKind::kActivation:
        push(0, nn::activate_backward(node.activation, input_of(0), gi));
        break;
      case NodeKind::kDropout: {
        Tensor t = gi;
        const Tensor& m = cache.dropout_masks[ii];
        if (!m.empty())
          for (std::size_t k = 0; k < t.size(); ++k) t[k] *= m[k];
        push(0, t);
        break;
      }
      case NodeKind::kConcat: {
        std::size_t off = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          const Tensor& src = input_of(k);
          const ImageDims d = image_dims(src);
          push(k, uncrop_center(slice_channels(gi, off, off + d.channels),
                                d.height, d.width));
          off += d.channels;
        }
        break;
      }
      case NodeKind::kAdd:
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          const ImageDims d = image_dims(input_of(k));
          push(k, uncrop_center(gi, d.height, d.width));
        }
        break;
      case NodeKind::kSoftmax:
        push(0, nn::softmax_backward(cache.outputs[ii], gi));
        break;
    }
  }
  const NodeId in_id = graph.input_node();
  out.input = g[in_id].empty() ? Tensor(cache.outputs[in_id].shape(), 0.0)
                               : g[in_id];
  out.input = as_caller_rank(out.input, cache.batched_input);
  return out;
}

}  // namespace terraseg::train

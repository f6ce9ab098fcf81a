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

#ifndef TERRASEG_TRAIN_GRAPH_HPP_
#define TERRASEG_TRAIN_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "terraseg/nn/activation.hpp"
#include "terraseg/nn/batch_norm.hpp"
#include "terraseg/nn/pool.hpp"
#include "terraseg/rng.hpp"
#include "terraseg/tensor.hpp"

namespace terraseg::train {

using NodeId = std::size_t;

enum class NodeKind {
  kInput,
  kConv2d,
  kConvTranspose2d,
  kMaxPool,
  kUnpool,
  kBatchNorm,
  kActivation,
  kDropout,
  kConcat,  // center-crops every input to the smallest, then stacks channels
  kAdd,     // center-crops every input to the smallest, then sums
  kSoftmax,
};

std::string to_string(NodeKind kind);
NodeKind parse_node_kind(const std::string& name);

struct Parameter {
  std::string name;
  Tensor value;
};

struct Node {
  std::string name;
  NodeKind kind = NodeKind::kInput;
  std::vector<NodeId> inputs;

  // Hyperparameters; each kind reads only its own.
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;
  NodeId pool_node = 0;  // kUnpool: the kMaxPool whose indices it reuses
  nn::Activation activation;
  double eps = 1e-3;
  double rate = 0.0;

  std::vector<Parameter> params;  // learnable
  nn::RunningStats running;       // kBatchNorm only; not learnable

  Shape output_shape;  // per sample, [channels, height, width]
};

/// Feed-forward layer graph.
///
/// Nodes can only consume nodes that already exist, so insertion order is a
/// topological order and the graph is acyclic by construction. Every add_*
/// call infers the node's output shape and throws GraphError, naming the
/// node, when the inputs are inconsistent.
class NetworkGraph {
 public:
  /// `seed` drives parameter initialization.
  explicit NetworkGraph(std::uint64_t seed = 0);

  NodeId add_input(const std::string& name, Shape chw);
  NodeId add_conv(const std::string& name, NodeId input,
                  std::size_t out_channels, std::size_t kernel,
                  std::size_t stride = 1, std::size_t padding = 0);
  NodeId add_conv_transpose(const std::string& name, NodeId input,
                            std::size_t out_channels, std::size_t kernel,
                            std::size_t stride);
  NodeId add_max_pool(const std::string& name, NodeId input,
                      std::size_t window = 2, std::size_t stride = 2);
  NodeId add_unpool(const std::string& name, NodeId input, NodeId pool);
  NodeId add_batch_norm(const std::string& name, NodeId input,
                        double eps = 1e-3);
  NodeId add_activation(const std::string& name, NodeId input,
                        nn::Activation activation);
  NodeId add_dropout(const std::string& name, NodeId input, double rate);
  NodeId add_concat(const std::string& name, std::vector<NodeId> inputs);
  NodeId add_add(const std::string& name, std::vector<NodeId> inputs);
  NodeId add_softmax(const std::string& name, NodeId input);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  Node& node(NodeId id) { return nodes_.at(id); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  NodeId input_node() const;
  /// The graph output: the last node added unless set explicitly.
  NodeId output_node() const;
  void set_output(NodeId id);

  const Shape& input_shape() const;
  const Shape& output_shape() const;

  /// Learnable tensors in a fixed order: node order, then per-node order.
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  /// Qualified names "<node>.<param>" aligned with parameters().
  std::vector<std::string> parameter_names() const;
  std::size_t parameter_count() const;

  /// Topology without parameter values.
  nlohmann::json descriptor() const;
  /// Rebuilds the topology. Weights and biases are zero and batch-norm
  /// nodes start at the identity until values are assigned.
  static NetworkGraph from_descriptor(const nlohmann::json& descriptor);

 private:
  NodeId push(Node node);
  Tensor init_uniform(const Shape& shape, std::size_t fan_in,
                      std::size_t fan_out);
  [[noreturn]] void fail(const std::string& name, const std::string& what) const;

  std::vector<Node> nodes_;
  std::vector<std::string> names_;
  NodeId output_ = 0;
  bool output_set_ = false;
  SeededRng rng_;
  bool zero_init_ = false;
};

/// count_parameters: number of learnable scalars (running statistics
/// excluded). An empty graph has 0.
std::size_t count_parameters(const NetworkGraph& graph);

}  // namespace terraseg::train

#endif  // TERRASEG_TRAIN_GRAPH_HPP_

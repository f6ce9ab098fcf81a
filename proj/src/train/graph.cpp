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

#include "terraseg/train/graph.hpp"

#include <algorithm>
#include <cmath>

#include "terraseg/error.hpp"

namespace terraseg::train {

namespace {

constexpr const char* kKindNames[] = {
    "input",      "conv2d",  "conv_transpose2d", "max_pool", "unpool",
    "batch_norm", "activation", "dropout",       "concat",   "add",
    "softmax"};

}  // namespace

std::string to_string(NodeKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

NodeKind parse_node_kind(const std::string& name) {
  for (int i = 0; i < static_cast<int>(std::size(kKindNames)); ++i) {
    if (name == kKindNames[i]) return static_cast<NodeKind>(i);
  }
  throw FormatError("unknown node kind '" + name + "'", 0);
}

NetworkGraph::NetworkGraph(std::uint64_t seed) : rng_(seed) {}

void NetworkGraph::fail(const std::string& name,
                        const std::string& what) const {
  throw GraphError("node '" + name + "': " + what);
}

NodeId NetworkGraph::push(Node node) {
  if (node.name.empty()) fail(node.name, "empty node name");
  if (std::find(names_.begin(), names_.end(), node.name) != names_.end()) {
    fail(node.name, "duplicate node name");
  }
  for (NodeId in : node.inputs) {
    if (in >= nodes_.size()) fail(node.name, "input refers to a missing node");
  }
  names_.push_back(node.name);
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

Tensor NetworkGraph::init_uniform(const Shape& shape, std::size_t fan_in,
                                  std::size_t fan_out) {
  if (zero_init_) return Tensor(shape, 0.0);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return tensor_random(shape, rng_, -limit, limit);
}

NodeId NetworkGraph::add_input(const std::string& name, Shape chw) {
  if (chw.size() != 3 || shape_volume(chw) == 0) {
    fail(name, "input shape must be [channels, height, width] with extents >= 1");
  }
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::kInput) fail(name, "graph already has an input");
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kInput;
  n.output_shape = std::move(chw);
  return push(std::move(n));
}

NodeId NetworkGraph::add_conv(const std::string& name, NodeId input,
                              std::size_t out_channels, std::size_t kernel,
                              std::size_t stride, std::size_t padding) {
  const Shape& in = node(input).output_shape;
  if (out_channels == 0 || kernel == 0 || stride == 0) {
    fail(name, "channels, kernel and stride must be >= 1");
  }
  const std::size_t ph = in[1] + 2 * padding;
  const std::size_t pw = in[2] + 2 * padding;
  if (kernel > ph || kernel > pw || (ph - kernel) % stride != 0 ||
      (pw - kernel) % stride != 0) {
    fail(name, "kernel " + std::to_string(kernel) + " / stride " +
                   std::to_string(stride) + " does not fit input " +
                   shape_to_string(in));
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kConv2d;
  n.inputs = {input};
  n.out_channels = out_channels;
  n.kernel = kernel;
  n.stride = stride;
  n.padding = padding;
  n.output_shape = {out_channels, (ph - kernel) / stride + 1,
                    (pw - kernel) / stride + 1};
  const std::size_t k2 = kernel * kernel;
  n.params.push_back({"kernels", init_uniform({out_channels, in[0], kernel, kernel},
                                              in[0] * k2, out_channels * k2)});
  n.params.push_back({"bias", Tensor({out_channels}, 0.0)});
  return push(std::move(n));
}

NodeId NetworkGraph::add_conv_transpose(const std::string& name, NodeId input,
                                        std::size_t out_channels,
                                        std::size_t kernel, std::size_t stride) {
  const Shape& in = node(input).output_shape;
  if (out_channels == 0 || kernel == 0 || stride == 0) {
    fail(name, "channels, kernel and stride must be >= 1");
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kConvTranspose2d;
  n.inputs = {input};
  n.out_channels = out_channels;
  n.kernel = kernel;
  n.stride = stride;
  n.output_shape = {out_channels, (in[1] - 1) * stride + kernel,
                    (in[2] - 1) * stride + kernel};
  const std::size_t k2 = kernel * kernel;
  n.params.push_back({"kernels", init_uniform({in[0], out_channels, kernel, kernel},
                                              in[0] * k2, out_channels * k2)});
  n.params.push_back({"bias", Tensor({out_channels}, 0.0)});
  return push(std::move(n));
}

NodeId NetworkGraph::add_max_pool(const std::string& name, NodeId input,
                                  std::size_t window, std::size_t stride) {
  const Shape& in = node(input).output_shape;
  if (window == 0 || stride == 0 || window > in[1] || window > in[2] ||
      (in[1] - window) % stride != 0 || (in[2] - window) % stride != 0) {
    fail(name, "pool " + std::to_string(window) + "/" + std::to_string(stride) +
                   " does not divide input " + shape_to_string(in));
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kMaxPool;
  n.inputs = {input};
  n.kernel = window;
  n.stride = stride;
  n.output_shape = {in[0], (in[1] - window) / stride + 1,
                    (in[2] - window) / stride + 1};
  return push(std::move(n));
}

NodeId NetworkGraph::add_unpool(const std::string& name, NodeId input,
                                NodeId pool) {
  if (pool >= nodes_.size() || node(pool).kind != NodeKind::kMaxPool) {
    fail(name, "unpool must reference a max_pool node");
  }
  for (const auto& other : nodes_) {
    if (other.kind == NodeKind::kUnpool && other.pool_node == pool) {
      fail(name, "pool '" + node(pool).name + "' already has an unpool");
    }
  }
  const Node& p = node(pool);
  if (node(input).output_shape != p.output_shape) {
    fail(name, "input " + shape_to_string(node(input).output_shape) +
                   " does not match pooled shape " +
                   shape_to_string(p.output_shape));
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kUnpool;
  n.inputs = {input};
  n.pool_node = pool;
  n.output_shape = node(p.inputs[0]).output_shape;
  return push(std::move(n));
}

NodeId NetworkGraph::add_batch_norm(const std::string& name, NodeId input,
                                    double eps) {
  if (!(eps > 0.0)) fail(name, "eps must be > 0");
  const Shape& in = node(input).output_shape;
  Node n;
  n.name = name;
  n.kind = NodeKind::kBatchNorm;
  n.inputs = {input};
  n.eps = eps;
  n.output_shape = in;
  n.params.push_back({"gamma", Tensor({in[0]}, 1.0)});
  n.params.push_back({"beta", Tensor({in[0]}, 0.0)});
  n.running = nn::RunningStats::fresh(in[0]);
  return push(std::move(n));
}

NodeId NetworkGraph::add_activation(const std::string& name, NodeId input,
                                    nn::Activation activation) {
  try {
    nn::validate(activation);
  } catch (const Error& e) {
    fail(name, e.what());
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kActivation;
  n.inputs = {input};
  n.activation = activation;
  n.output_shape = node(input).output_shape;
  return push(std::move(n));
}

NodeId NetworkGraph::add_dropout(const std::string& name, NodeId input,
                                 double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) fail(name, "rate must lie in [0, 1)");
  Node n;
  n.name = name;
  n.kind = NodeKind::kDropout;
  n.inputs = {input};
  n.rate = rate;
  n.output_shape = node(input).output_shape;
  return push(std::move(n));
}

NodeId NetworkGraph::add_concat(const std::string& name,
                                std::vector<NodeId> inputs) {
  if (inputs.size() < 2) fail(name, "concat needs at least two inputs");
  std::size_t h = SIZE_MAX, w = SIZE_MAX, c = 0;
  for (NodeId id : inputs) {
    const Shape& s = node(id).output_shape;
    h = std::min(h, s[1]);
    w = std::min(w, s[2]);
    c += s[0];
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kConcat;
  n.inputs = std::move(inputs);
  n.output_shape = {c, h, w};
  return push(std::move(n));
}

NodeId NetworkGraph::add_add(const std::string& name,
                             std::vector<NodeId> inputs) {
  if (inputs.size() < 2) fail(name, "add needs at least two inputs");
  std::size_t h = SIZE_MAX, w = SIZE_MAX;
  const std::size_t c = node(inputs[0]).output_shape[0];
  for (NodeId id : inputs) {
    const Shape& s = node(id).output_shape;
    if (s[0] != c) {
      fail(name, "channel mismatch " + shape_to_string(s) + " vs " +
                     shape_to_string(node(inputs[0]).output_shape));
    }
    h = std::min(h, s[1]);
    w = std::min(w, s[2]);
  }
  Node n;
  n.name = name;
  n.kind = NodeKind::kAdd;
  n.inputs = std::move(inputs);
  n.output_shape = {c, h, w};
  return push(std::move(n));
}

NodeId NetworkGraph::add_softmax(const std::string& name, NodeId input) {
  Node n;
  n.name = name;
  n.kind = NodeKind::kSoftmax;
  n.inputs = {input};
  n.output_shape = node(input).output_shape;
  return push(std::move(n));
}

NodeId NetworkGraph::input_node() const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == NodeKind::kInput) return i;
  }
  throw GraphError("graph has no input node");
}

NodeId NetworkGraph::output_node() const {
  if (nodes_.empty()) throw GraphError("graph is empty");
  return output_set_ ? output_ : nodes_.size() - 1;
}

void NetworkGraph::set_output(NodeId id) {
  if (id >= nodes_.size()) throw GraphError("output refers to a missing node");
  output_ = id;
  output_set_ = true;
}

const Shape& NetworkGraph::input_shape() const {
  return node(input_node()).output_shape;
}

const Shape& NetworkGraph::output_shape() const {
  return node(output_node()).output_shape;
}

std::vector<Tensor*> NetworkGraph::parameters() {
  std::vector<Tensor*> out;
  for (auto& n : nodes_)
    for (auto& p : n.params) out.push_back(&p.value);
  return out;
}

std::vector<const Tensor*> NetworkGraph::parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& n : nodes_)
    for (const auto& p : n.params) out.push_back(&p.value);
  return out;
}

std::vector<std::string> NetworkGraph::parameter_names() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_)
    for (const auto& p : n.params) out.push_back(n.name + "." + p.name);
  return out;
}

std::size_t NetworkGraph::parameter_count() const {
  std::size_t total = 0;
  for (const auto& n : nodes_)
    for (const auto& p : n.params) total += p.value.size();
  return total;
}

std::size_t count_parameters(const NetworkGraph& graph) {
  return graph.parameter_count();
}

nlohmann::json NetworkGraph::descriptor() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nlohmann::json j;
    j["name"] = n.name;
    j["kind"] = to_string(n.kind);
    j["inputs"] = n.inputs;
    switch (n.kind) {
      case NodeKind::kInput:
        j["shape"] = n.output_shape;
        break;
      case NodeKind::kConv2d:
        j["out_channels"] = n.out_channels;
        j["kernel"] = n.kernel;
        j["stride"] = n.stride;
        j["padding"] = n.padding;
        break;
      case NodeKind::kConvTranspose2d:
        j["out_channels"] = n.out_channels;
        j["kernel"] = n.kernel;
        j["stride"] = n.stride;
        break;
      case NodeKind::kMaxPool:
        j["window"] = n.kernel;
        j["stride"] = n.stride;
        break;
      case NodeKind::kUnpool:
        j["pool"] = n.pool_node;
        break;
      case NodeKind::kBatchNorm:
        j["eps"] = n.eps;
        j["momentum"] = n.running.momentum;
        break;
      case NodeKind::kActivation:
        j["activation"] = nn::to_string(n.activation.kind);
        j["alpha"] = n.activation.alpha;
        break;
      case NodeKind::kDropout:
        j["rate"] = n.rate;
        break;
      case NodeKind::kConcat:
      case NodeKind::kAdd:
      case NodeKind::kSoftmax:
        break;
    }
    nodes.push_back(std::move(j));
  }
  nlohmann::json d;
  d["nodes"] = std::move(nodes);
  d["output"] = output_node();
  return d;
}

NetworkGraph NetworkGraph::from_descriptor(const nlohmann::json& descriptor) {
  NetworkGraph g;
  g.zero_init_ = true;
  try {
    for (const auto& j : descriptor.at("nodes")) {
      const std::string name = j.at("name").get<std::string>();
      const NodeKind kind = parse_node_kind(j.at("kind").get<std::string>());
      const auto inputs = j.at("inputs").get<std::vector<NodeId>>();
      auto in0 = [&]() -> NodeId {
        if (inputs.empty()) throw FormatError("node '" + name + "' lacks inputs", 0);
        return inputs[0];
      };
      switch (kind) {
        case NodeKind::kInput:
          g.add_input(name, j.at("shape").get<Shape>());
          break;
        case NodeKind::kConv2d:
          g.add_conv(name, in0(), j.at("out_channels"), j.at("kernel"),
                     j.at("stride"), j.at("padding"));
          break;
        case NodeKind::kConvTranspose2d:
          g.add_conv_transpose(name, in0(), j.at("out_channels"), j.at("kernel"),
                               j.at("stride"));
          break;
        case NodeKind::kMaxPool:
          g.add_max_pool(name, in0(), j.at("window"), j.at("stride"));
          break;
        case NodeKind::kUnpool:
          g.add_unpool(name, in0(), j.at("pool"));
          break;
        case NodeKind::kBatchNorm: {
          NodeId id = g.add_batch_norm(name, in0(), j.at("eps"));
          g.node(id).running.momentum = j.at("momentum").get<double>();
          break;
        }
        case NodeKind::kActivation:
          g.add_activation(name, in0(),
                           {nn::parse_activation_kind(j.at("activation").get<std::string>()),
                            j.at("alpha").get<double>()});
          break;
        case NodeKind::kDropout:
          g.add_dropout(name, in0(), j.at("rate"));
          break;
        case NodeKind::kConcat:
          g.add_concat(name, inputs);
          break;
        case NodeKind::kAdd:
          g.add_add(name, inputs);
          break;
        case NodeKind::kSoftmax:
          g.add_softmax(name, in0());
          break;
      }
    }
    if (!g.nodes_.empty()) g.set_output(descriptor.at("output").get<NodeId>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed graph descriptor: ") + e.what(), 0);
  }
  g.zero_init_ = false;
  return g;
}

}  // namespace terraseg::train

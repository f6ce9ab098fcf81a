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

#include "terraseg/models/topologies.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "terraseg/error.hpp"

namespace terraseg::models {

using train::NetworkGraph;
using train::NodeId;

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kUNet:
      return "unet";
    case TopologyKind::kSegNet:
      return "segnet";
    case TopologyKind::kResUNet:
      return "resunet";
  }
  return "?";
}

TopologyKind parse_topology_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  if (s == "unet") return TopologyKind::kUNet;
  if (s == "segnet") return TopologyKind::kSegNet;
  if (s == "resunet" || s == "resnet") return TopologyKind::kResUNet;
  throw ConfigError("unknown topology '" + name + "'");
}

namespace {

// Spatial extent after an unpadded U-Net walk, or 0 if it collapses.
std::size_t unpadded_walk(std::size_t h, std::size_t depth) {
  std::vector<std::size_t> skips;
  for (std::size_t i = 0; i < depth; ++i) {
    if (h <= 4) return 0;
    h -= 4;
    if (h % 2 != 0) return 0;
    skips.push_back(h);
    h /= 2;
  }
  if (h <= 4) return 0;
  h -= 4;
  for (std::size_t i = depth; i-- > 0;) {
    h = 2 * h;
    if (h > skips[i] || h <= 4) return 0;
    h -= 4;
  }
  return h;
}

std::string stage(const char* prefix, std::size_t i, const char* what) {
  return std::string(prefix) + std::to_string(i) + "_" + what;
}

NodeId conv_act(NetworkGraph& g, const std::string& name, NodeId x,
                std::size_t c, const TopologySpec& s) {
  x = g.add_conv(name, x, c, 3, 1, s.padded ? 1 : 0);
  return g.add_activation(name + "_act", x, s.activation);
}

NodeId conv_bn_act(NetworkGraph& g, const std::string& name, NodeId x,
                   std::size_t c, const TopologySpec& s) {
  x = g.add_conv(name, x, c, 3, 1, 1);
  x = g.add_batch_norm(name + "_bn", x);
  return g.add_activation(name + "_act", x, s.activation);
}

void add_head(NetworkGraph& g, NodeId x, const TopologySpec& s) {
  x = g.add_conv("head", x, s.num_classes, 1);
  g.add_softmax("softmax", x);
}

NodeId maybe_dropout(NetworkGraph& g, NodeId x, const TopologySpec& s) {
  return s.dropout > 0.0 ? g.add_dropout("bottleneck_dropout", x, s.dropout) : x;
}

// Shared scaffold of U-Net and ResUNet; `block` turns a node into a stage
// output at the given channel count.
template <typename Block>
NetworkGraph build_u(const TopologySpec& s, Block block) {
  validate(s);
  NetworkGraph g(s.seed);
  NodeId x = g.add_input("input", {s.in_channels, s.input_height, s.input_width});
  std::vector<NodeId> skips;
  for (std::size_t i = 0; i < s.depth; ++i) {
    x = block(g, stage("enc", i, "block"), x, s.base_channels << i);
    skips.push_back(x);
    x = g.add_max_pool(stage("enc", i, "pool"), x);
  }
  x = block(g, "bottleneck", x, s.base_channels << s.depth);
  x = maybe_dropout(g, x, s);
  for (std::size_t i = s.depth; i-- > 0;) {
    const std::size_t c = s.base_channels << i;
    NodeId up = g.add_conv_transpose(stage("dec", i, "up"), x, c, 2, 2);
    x = g.add_concat(stage("dec", i, "concat"), {skips[i], up});
    x = block(g, stage("dec", i, "block"), x, c);
  }
  add_head(g, x, s);
  return g;
}

}  // namespace

void validate(const TopologySpec& s) {
  if (s.depth < 1) throw ParameterError("topology depth must be >= 1");
  if (s.num_classes < 2) throw ParameterError("num_classes must be >= 2");
  if (s.base_channels < 1 || s.in_channels < 1) {
    throw ParameterError("channel counts must be >= 1");
  }
  if (s.depth > 16) throw ParameterError("topology depth must be <= 16");
  if (!(s.dropout >= 0.0 && s.dropout < 1.0)) {
    throw ParameterError("dropout must lie in [0, 1)");
  }
  nn::validate(s.activation);
  const std::size_t m = std::size_t{1} << s.depth;
  if (s.input_height == 0 || s.input_width == 0 || s.input_height % m != 0 ||
      s.input_width % m != 0) {
    throw ShapeError("input " + std::to_string(s.input_height) + "x" +
                     std::to_string(s.input_width) + " is not divisible by 2^" +
                     std::to_string(s.depth));
  }
  if (!s.padded) {
    if (s.kind != TopologyKind::kUNet) {
      throw ParameterError("unpadded convolutions are only supported for U-Net");
    }
    if (unpadded_walk(s.input_height, s.depth) == 0 ||
        unpadded_walk(s.input_width, s.depth) == 0) {
      throw ShapeError("unpadded U-Net of depth " + std::to_string(s.depth) +
                       " does not fit a " + std::to_string(s.input_height) +
                       "x" + std::to_string(s.input_width) + " input");
    }
  }
}

NetworkGraph build_unet(const TopologySpec& spec) {
  return build_u(spec, [&](NetworkGraph& g, const std::string& name, NodeId x,
                           std::size_t c) {
    x = conv_act(g, name + "_conv1", x, c, spec);
    return conv_act(g, name + "_conv2", x, c, spec);
  });
}

NetworkGraph build_resunet(const TopologySpec& spec) {
  return build_u(spec, [&](NetworkGraph& g, const std::string& name, NodeId x,
                           std::size_t c) {
    return add_residual_unit(g, name, x, c, spec.activation);
  });
}

NodeId add_residual_unit(NetworkGraph& g, const std::string& name, NodeId x,
                         std::size_t channels, nn::Activation activation) {
  NodeId main = g.add_conv(name + "_conv1", x, channels, 3, 1, 1);
  main = g.add_activation(name + "_conv1_act", main, activation);
  main = g.add_conv(name + "_conv2", main, channels, 3, 1, 1);
  NodeId skip = x;
  if (g.node(x).output_shape[0] != channels) {
    skip = g.add_conv(name + "_proj", x, channels, 1);
  }
  const NodeId sum = g.add_add(name + "_add", {main, skip});
  return g.add_activation(name + "_act", sum, activation);
}

NetworkGraph build_segnet(const TopologySpec& spec) {
  validate(spec);
  if (spec.kind != TopologyKind::kSegNet) {
    TopologySpec s = spec;
    s.kind = TopologyKind::kSegNet;
    return build_segnet(s);
  }
  const TopologySpec& s = spec;
  NetworkGraph g(s.seed);
  NodeId x = g.add_input("input", {s.in_channels, s.input_height, s.input_width});
  std::vector<NodeId> pools;
  for (std::size_t i = 0; i < s.depth; ++i) {
    const std::size_t c = s.base_channels << i;
    x = conv_bn_act(g, stage("enc", i, "conv1"), x, c, s);
    x = conv_bn_act(g, stage("enc", i, "conv2"), x, c, s);
    x = g.add_max_pool(stage("enc", i, "pool"), x);
    pools.push_back(x);
  }
  x = maybe_dropout(g, x, s);
  for (std::size_t i = s.depth; i-- > 0;) {
    x = g.add_unpool(stage("dec", i, "unpool"), x, pools[i]);
    const std::size_t c = s.base_channels << i;
    x = conv_bn_act(g, stage("dec", i, "conv1"), x, c, s);
    x = conv_bn_act(g, stage("dec", i, "conv2"), x, i > 0 ? c / 2 : c, s);
  }
  add_head(g, x, s);
  return g;
}

NetworkGraph build_topology(const TopologySpec& spec) {
  switch (spec.kind) {
    case TopologyKind::kUNet:
      return build_unet(spec);
    case TopologyKind::kSegNet:
      return build_segnet(spec);
    case TopologyKind::kResUNet:
      return build_resunet(spec);
  }
  throw ParameterError("unknown topology kind");
}

}  // namespace terraseg::models

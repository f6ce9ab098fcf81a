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

#ifndef TERRASEG_MODELS_TOPOLOGIES_HPP_
#define TERRASEG_MODELS_TOPOLOGIES_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

#include "terraseg/nn/activation.hpp"
#include "terraseg/train/graph.hpp"

namespace terraseg::models {

enum class TopologyKind { kUNet, kSegNet, kResUNet };

std::string to_string(TopologyKind kind);
/// Accepts "unet", "segnet", "resunet" in any letter case.
TopologyKind parse_topology_kind(const std::string& name);

struct TopologySpec {
  TopologyKind kind = TopologyKind::kUNet;
  std::size_t depth = 2;  // number of 2x2 pooling stages
  std::size_t base_channels = 8;
  std::size_t in_channels = 4;
  std::size_t num_classes = 8;
  nn::Activation activation = nn::Activation::relu();
  std::size_t input_height = 32;
  std::size_t input_width = 32;
  /// 3x3 convolutions pad by 1 so every skip has the decoder's size. When
  /// false (U-Net only) they are unpadded, skips are center-cropped and the
  /// output is smaller than the input.
  bool padded = true;
  double dropout = 0.0;  // applied after the bottleneck when > 0
  std::uint64_t seed = 0;
};

/// ParameterError for depth 0, fewer than 2 classes or zero channels;
/// ShapeError when the input extent is not divisible by 2^depth or an
/// unpadded walk runs out of pixels.
void validate(const TopologySpec& spec);

/// Encoder stage i: two 3x3 conv + activation at base * 2^i channels, then
/// 2x2/2 max pool. Bottleneck at base * 2^depth. Decoder stage i: 2x2/2
/// transpose conv to base * 2^i, concat with the stage-i skip, two 3x3
/// conv + activation. Head: 1x1 conv to num_classes, softmax.
train::NetworkGraph build_unet(const TopologySpec& spec);

/// Encoder stage i: (3x3 conv, batch norm, activation) x 2 at base * 2^i,
/// then max pool keeping indices. Decoder stage i unpools with the stage-i
/// indices, then (conv, batch norm, activation) at base * 2^i and again at
/// base * 2^(i-1) (base for stage 0). Head: 1x1 conv, softmax.
train::NetworkGraph build_segnet(const TopologySpec& spec);

/// The U-Net scaffold with each conv pair replaced by a residual unit.
train::NetworkGraph build_resunet(const TopologySpec& spec);

/// Dispatches on spec.kind.
train::NetworkGraph build_topology(const TopologySpec& spec);

/// act(conv3(act(conv3(x))) + skip), where skip is x itself or, when the
/// channel count changes, a 1x1 projection of x. Returns the output node.
train::NodeId add_residual_unit(train::NetworkGraph& graph,
                                const std::string& name, train::NodeId input,
                                std::size_t channels, nn::Activation activation);

}  // namespace terraseg::models

#endif  // TERRASEG_MODELS_TOPOLOGIES_HPP_

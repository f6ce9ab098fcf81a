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

#ifndef TERRASEG_TRAIN_CHECKPOINT_HPP_
#define TERRASEG_TRAIN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "terraseg/train/graph.hpp"

namespace terraseg::train {

enum class MonitorMode { kMin, kMax };

/// Loss-like monitors (name contains "loss") are minimized, others maximized.
MonitorMode monitor_mode_for(const std::string& monitor);

/// True when `candidate` beats `best` by more than `min_delta`.
bool improves(double candidate, double best, MonitorMode mode,
              double min_delta = 0.0);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  std::optional<double> monitor_value;
  MonitorMode mode = MonitorMode::kMin;
};

struct LoadedCheckpoint {
  NetworkGraph graph;
  CheckpointHeader header;
};

// Layout, little-endian throughout:
//   "TSEG" | u32 version | u8 has_monitor | u8 mode | f64 monitor
//   | u64 descriptor length | descriptor JSON
//   | u32 tensor count | per tensor: u32 name length, name, u32 rank,
//     u64 extents, f64 values
//   | u32 CRC-32 of everything before it
// Tensors are the learnable parameters in parameters() order, then the
// running mean and variance of every batch-norm node.

std::vector<std::uint8_t> checkpoint_encode(const NetworkGraph& graph,
                                            const CheckpointHeader& header);
/// Throws FormatError carrying the byte offset of the first bad field.
LoadedCheckpoint checkpoint_decode(const std::vector<std::uint8_t>& bytes);

/// Writes unconditionally through a temporary file and rename.
void checkpoint_write(const NetworkGraph& graph,
                      const std::filesystem::path& path,
                      const CheckpointHeader& header = {});

/// Writes only when `monitor_value` improves on the value stored in an
/// existing file at `path`. Returns whether the file was written.
bool checkpoint_save(const NetworkGraph& graph,
                     const std::filesystem::path& path, double monitor_value,
                     MonitorMode mode = MonitorMode::kMin);

LoadedCheckpoint checkpoint_load(const std::filesystem::path& path);

}  // namespace terraseg::train

#endif  // TERRASEG_TRAIN_CHECKPOINT_HPP_

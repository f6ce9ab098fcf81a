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

#ifndef TERRASEG_STORE_CHUNK_STORE_HPP_
#define TERRASEG_STORE_CHUNK_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "terraseg/tensor.hpp"

namespace terraseg::store {

enum class DType { kU8, kU16, kI32, kF32, kF64 };
enum class Codec { kRaw, kDeflate };

std::string to_string(DType dtype);
std::string to_string(Codec codec);
DType parse_dtype(std::string_view name);   // ParameterError
Codec parse_codec(std::string_view name);   // ParameterError
std::size_t dtype_size(DType dtype);

/// Valid names match [A-Za-z0-9._-]+ and do not start with '.', which is
/// reserved for metadata files.
bool valid_name(std::string_view name);

struct ArraySpec {
  Shape shape;
  Shape chunks;
  DType dtype = DType::kF64;
  Codec codec = Codec::kDeflate;
  double fill = 0.0;
};

struct StoreGroup {
  std::string path;  // "" is the root
  nlohmann::json attributes = nlohmann::json::object();
};

enum class NodeKind { kGroup, kArray };

struct TreeEntry {
  std::string path;
  NodeKind kind = NodeKind::kGroup;
  Shape shape;  // arrays only
};

class StoredArray {
 public:
  StoredArray(std::filesystem::path root, std::string path);

  const std::string& path() const noexcept { return path_; }
  /// Metadata as currently stored on disk.
  ArraySpec spec() const;
  nlohmann::json attributes() const;
  void set_attributes(const nlohmann::json& attributes);

  /// Writes `data` (same rank as the array) at `offsets`. Partially covered
  /// chunks are read, modified and rewritten. Holds the writer lock for the
  /// duration; a second writer gets ConflictError.
  void write_region(const Shape& offsets, const Tensor& data);
  /// Unwritten cells read as the fill value. Throws IntegrityError when a
  /// chunk fails its checksum.
  Tensor read_region(const Shape& offsets, const Shape& extents) const;
  Tensor read_all() const;

  /// Encoded bytes of one chunk file, or empty when it was never written.
  std::string chunk_bytes(const Shape& chunk_index) const;
  std::filesystem::path chunk_path(const Shape& chunk_index) const;

 private:
  std::filesystem::path root_;
  std::string path_;
  std::filesystem::path dir_;
};

class ChunkStore {
 public:
  /// Opens the store rooted at `root`, creating the root group if needed.
  explicit ChunkStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Creates one group under an existing parent. Idempotent for groups;
  /// ConflictError when an array already uses the path.
  StoreGroup create_group(std::string_view path);
  /// Like create_group but creates missing ancestors.
  StoreGroup require_group(std::string_view path);
  StoreGroup group(std::string_view path) const;
  void set_group_attributes(std::string_view path, const nlohmann::json& attributes);

  StoredArray create_array(std::string_view group_path, std::string_view name,
                           const ArraySpec& spec);
  StoredArray open_array(std::string_view path) const;

  bool exists(std::string_view path) const;
  NodeKind kind(std::string_view path) const;  // NotFoundError

  /// Depth-first listing below `path` (excluding it), children sorted by name.
  std::vector<TreeEntry> list_tree(std::string_view path = "") const;

 private:
  std::filesystem::path root_;
};

/// One line per entry, indented two spaces per level; arrays show shapes.
std::string format_tree(const std::vector<TreeEntry>& entries);

}  // namespace terraseg::store

#endif  // TERRASEG_STORE_CHUNK_STORE_HPP_

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

#include "terraseg/store/chunk_store.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <functional>
#include <sstream>

#include "internal/fileio.hpp"
#include "terraseg/error.hpp"

namespace terraseg::store {

static_assert(std::endian::native == std::endian::little,
              "chunk codec assumes a little-endian host");

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kGroupMeta = ".group.json";
constexpr const char* kArrayMeta = ".array.json";
constexpr const char* kLockFile = ".lock";
constexpr int kFormat = 1;
constexpr const char* kDTypeNames[] = {"u8", "u16", "i32", "f32", "f64"};
constexpr const char* kCodecNames[] = {"raw", "deflate"};

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = std::min(path.find('/', start), path.size());
    if (end > start) {
      std::string name(path.substr(start, end - start));
      if (!valid_name(name)) throw NameError("invalid store name '" + name + "'");
      parts.push_back(std::move(name));
    } else if (end < path.size()) {
      throw NameError("empty component in store path '" + std::string(path) + "'");
    }
    start = end + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += '/';
    out += parts[i];
  }
  return out;
}

fs::path dir_of(const fs::path& root, const std::vector<std::string>& parts) {
  fs::path p = root;
  for (const auto& s : parts) p /= s;
  return p;
}

json read_json(const fs::path& p) {
  const std::string text = internal::read_file(p);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("metadata " + p.string() + ": " + e.what(), e.byte);
  }
}

void write_json(const fs::path& p, const json& j) {
  internal::write_file_atomic(p, j.dump(2) + "\n");
}

std::size_t volume(const Shape& s) {
  std::size_t v = 1;
  for (std::size_t d : s) v *= d;
  return v;
}

bool fits(DType t, double v) {
  auto in = [v](double lo, double hi) { return v >= lo && v <= hi && v == std::floor(v); };
  switch (t) {
    case DType::kU8: return in(0, 255);
    case DType::kU16: return in(0, 65535);
    case DType::kI32: return in(-2147483648.0, 2147483647.0);
    case DType::kF32: return std::isnan(v) || static_cast<double>(static_cast<float>(v)) == v;
    case DType::kF64: return true;
  }
  return false;
}

template <typename T>
void put(std::string& out, std::size_t i, double v) {
  const T s = static_cast<T>(v);
  std::memcpy(out.data() + i * sizeof(T), &s, sizeof(T));
}

template <typename T>
double get(const std::string& in, std::size_t i) {
  T s;
  std::memcpy(&s, in.data() + i * sizeof(T), sizeof(T));
  return static_cast<double>(s);
}

std::string to_bytes(DType t, const std::vector<double>& v) {
  std::string out(v.size() * dtype_size(t), '\0');
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (t) {
      case DType::kU8: put<std::uint8_t>(out, i, v[i]); break;
      case DType::kU16: put<std::uint16_t>(out, i, v[i]); break;
      case DType::kI32: put<std::int32_t>(out, i, v[i]); break;
      case DType::kF32: put<float>(out, i, v[i]); break;
      case DType::kF64: put<double>(out, i, v[i]); break;
    }
  }
  return out;
}

std::vector<double> from_bytes(DType t, const std::string& in) {
  std::vector<double> v(in.size() / dtype_size(t));
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (t) {
      case DType::kU8: v[i] = get<std::uint8_t>(in, i); break;
      case DType::kU16: v[i] = get<std::uint16_t>(in, i); break;
      case DType::kI32: v[i] = get<std::int32_t>(in, i); break;
      case DType::kF32: v[i] = get<float>(in, i); break;
      case DType::kF64: v[i] = get<double>(in, i); break;
    }
  }
  return v;
}

std::string encode(Codec codec, const std::string& raw) {
  if (codec == Codec::kRaw) return raw;
  uLongf size = compressBound(static_cast<uLong>(raw.size()));
  std::string out(size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &size,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                Z_DEFAULT_COMPRESSION) != Z_OK) {
    throw IoError("deflate failed");
  }
  out.resize(size);
  return out;
}

std::string decode(Codec codec, const std::string& stored, std::size_t raw_size,
                   const std::string& where) {
  if (codec == Codec::kRaw) {
    if (stored.size() != raw_size) throw IntegrityError(where + ": wrong chunk length");
    return stored;
  }
  std::string out(raw_size, '\0');
  uLongf size = static_cast<uLongf>(raw_size);
  if (uncompress(reinterpret_cast<Bytef*>(out.data()), &size,
                 reinterpret_cast<const Bytef*>(stored.data()),
                 static_cast<uLong>(stored.size())) != Z_OK ||
      size != raw_size) {
    throw IntegrityError(where + ": chunk does not inflate to " + std::to_string(raw_size) +
                         " bytes");
  }
  return out;
}

std::string chunk_name(const Shape& index) {
  std::string s = "c";
  for (std::size_t i : index) s += "." + std::to_string(i);
  return s;
}

json spec_to_json(const ArraySpec& s) {
  return {{"kind", "array"},         {"format", kFormat},
          {"shape", s.shape},        {"chunks", s.chunks},
          {"dtype", to_string(s.dtype)}, {"codec", to_string(s.codec)},
          {"fill", std::isnan(s.fill) ? json("nan") : json(s.fill)},
          {"attributes", json::object()}, {"checksums", json::object()}};
}

ArraySpec spec_from_json(const json& j, const fs::path& where) {
  try {
    ArraySpec s;
    s.shape = j.at("shape").get<Shape>();
    s.chunks = j.at("chunks").get<Shape>();
    s.dtype = parse_dtype(j.at("dtype").get<std::string>());
    s.codec = parse_codec(j.at("codec").get<std::string>());
    const json& f = j.at("fill");
    s.fill = f.is_string() ? std::numeric_limits<double>::quiet_NaN() : f.get<double>();
    return s;
  } catch (const json::exception& e) {
    throw FormatError("array metadata " + where.string() + ": " + e.what(), 0);
  }
}

void validate_spec(const ArraySpec& s) {
  if (s.shape.empty()) throw ParameterError("array rank must be >= 1");
  if (s.chunks.size() != s.shape.size()) {
    throw ParameterError("chunk rank " + std::to_string(s.chunks.size()) +
                         " differs from array rank " + std::to_string(s.shape.size()));
  }
  for (std::size_t d = 0; d < s.shape.size(); ++d) {
    if (s.shape[d] == 0) throw ParameterError("array extents must be >= 1");
    if (s.chunks[d] == 0 || s.chunks[d] > s.shape[d]) {
      throw ParameterError("chunk extent " + std::to_string(s.chunks[d]) + " on axis " +
                           std::to_string(d) + " must lie in [1, " +
                           std::to_string(s.shape[d]) + "]");
    }
  }
  if (!fits(s.dtype, s.fill)) {
    throw ParameterError("fill value does not fit dtype " + to_string(s.dtype));
  }
}

void check_region(const ArraySpec& s, const Shape& offsets, const Shape& extents) {
  if (offsets.size() != s.shape.size() || extents.size() != s.shape.size()) {
    throw ShapeError("region rank differs from array rank " + std::to_string(s.shape.size()));
  }
  for (std::size_t d = 0; d < s.shape.size(); ++d) {
    if (offsets[d] > s.shape[d] || extents[d] > s.shape[d] - offsets[d]) {
      throw RangeError("region [" + std::to_string(offsets[d]) + ", +" +
                       std::to_string(extents[d]) + ") exceeds axis " + std::to_string(d) +
                       " of extent " + std::to_string(s.shape[d]));
    }
  }
}

// Visits the chunk grid indices touched by a region, row-major.
template <typename F>
void for_each_chunk(const ArraySpec& s, const Shape& offsets, const Shape& extents, F&& f) {
  const std::size_t rank = s.shape.size();
  if (volume(extents) == 0) return;
  Shape lo(rank), hi(rank), idx(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    lo[d] = offsets[d] / s.chunks[d];
    hi[d] = (offsets[d] + extents[d] - 1) / s.chunks[d];
  }
  idx = lo;
  while (true) {
    f(idx);
    std::size_t d = rank;
    while (d > 0) {
      --d;
      if (idx[d] < hi[d]) {
        ++idx[d];
        break;
      }
      idx[d] = lo[d];
      if (d == 0) return;
    }
  }
}

// Copies the overlap of a chunk and a region between their buffers.
template <bool kToChunk>
void copy_overlap(const ArraySpec& s, const Shape& chunk_index, const Shape& offsets,
                  const Shape& extents, std::vector<double>& chunk, std::span<double> region) {
  const std::size_t rank = s.shape.size();
  Shape begin(rank), end(rank);
  for (std::size_t d = 0; d < rank; ++d) {
    const std::size_t c0 = chunk_index[d] * s.chunks[d];
    begin[d] = std::max(c0, offsets[d]);
    end[d] = std::min(c0 + s.chunks[d], offsets[d] + extents[d]);
  }
  Shape pos = begin;
  const std::size_t run = end[rank - 1] - begin[rank - 1];
  while (true) {
    std::size_t ci = 0, ri = 0;
    for (std::size_t d = 0; d < rank; ++d) {
      ci = ci * s.chunks[d] + (pos[d] - chunk_index[d] * s.chunks[d]);
      ri = ri * extents[d] + (pos[d] - offsets[d]);
    }
    if constexpr (kToChunk) {
      std::copy_n(region.begin() + static_cast<std::ptrdiff_t>(ri), run,
                  chunk.begin() + static_cast<std::ptrdiff_t>(ci));
    } else {
      std::copy_n(chunk.begin() + static_cast<std::ptrdiff_t>(ci), run,
                  region.begin() + static_cast<std::ptrdiff_t>(ri));
    }
    if (rank == 1) return;
    std::size_t d = rank - 1;
    while (d > 0) {
      --d;
      if (++pos[d] < end[d]) break;
      pos[d] = begin[d];
      if (d == 0) return;
    }
  }
}

class WriterLock {
 public:
  explicit WriterLock(fs::path path) : path_(std::move(path)) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      throw ConflictError("array is locked by another writer (" + path_.string() + ")");
    }
    ::close(fd);
  }
  ~WriterLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  WriterLock(const WriterLock&) = delete;
  WriterLock& operator=(const WriterLock&) = delete;

 private:
  fs::path path_;
};

}  // namespace

std::string to_string(DType dtype) { return kDTypeNames[static_cast<int>(dtype)]; }
std::string to_string(Codec codec) { return kCodecNames[static_cast<int>(codec)]; }

DType parse_dtype(std::string_view name) {
  for (int i = 0; i < 5; ++i)
    if (name == kDTypeNames[i]) return static_cast<DType>(i);
  throw ParameterError("unknown dtype '" + std::string(name) + "'");
}

Codec parse_codec(std::string_view name) {
  for (int i = 0; i < 2; ++i)
    if (name == kCodecNames[i]) return static_cast<Codec>(i);
  throw ParameterError("unknown codec '" + std::string(name) + "'");
}

std::size_t dtype_size(DType dtype) {
  constexpr std::size_t sizes[] = {1, 2, 4, 4, 8};
  return sizes[static_cast<int>(dtype)];
}

bool valid_name(std::string_view name) {
  if (name.empty() || name.front() == '.') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-';
  });
}

StoredArray::StoredArray(fs::path root, std::string path)
    : root_(std::move(root)), path_(std::move(path)), dir_(dir_of(root_, split_path(path_))) {
  if (!fs::exists(dir_ / kArrayMeta)) throw NotFoundError("no array at '" + path_ + "'");
}

ArraySpec StoredArray::spec() const {
  return spec_from_json(read_json(dir_ / kArrayMeta), dir_ / kArrayMeta);
}

json StoredArray::attributes() const {
  return read_json(dir_ / kArrayMeta).value("attributes", json::object());
}

void StoredArray::set_attributes(const json& attributes) {
  if (!attributes.is_object()) throw ParameterError("attributes must be a JSON object");
  WriterLock lock(dir_ / kLockFile);
  json meta = read_json(dir_ / kArrayMeta);
  meta["attributes"] = attributes;
  write_json(dir_ / kArrayMeta, meta);
}

fs::path StoredArray::chunk_path(const Shape& chunk_index) const {
  return dir_ / chunk_name(chunk_index);
}

std::string StoredArray::chunk_bytes(const Shape& chunk_index) const {
  const fs::path p = chunk_path(chunk_index);
  if (!fs::exists(p)) return {};
  return internal::read_file(p);
}

namespace {

std::vector<double> load_chunk(const fs::path& dir, const ArraySpec& s, const json& checksums,
                               const Shape& index) {
  const std::string name = chunk_name(index);
  const fs::path p = dir / name;
  const std::size_t n = volume(s.chunks);
  if (!checksums.contains(name)) {
    if (fs::exists(p)) throw IntegrityError(p.string() + ": chunk has no recorded checksum");
    return std::vector<double>(n, s.fill);
  }
  const std::string stored = internal::read_file(p);
  const auto expected = checksums.at(name).get<std::uint32_t>();
  if (internal::crc32_of(stored.data(), stored.size()) != expected) {
    throw IntegrityError(p.string() + ": checksum mismatch");
  }
  return from_bytes(s.dtype, decode(s.codec, stored, n * dtype_size(s.dtype), p.string()));
}

}  // namespace

void StoredArray::write_region(const Shape& offsets, const Tensor& data) {
  WriterLock lock(dir_ / kLockFile);
  json meta = read_json(dir_ / kArrayMeta);
  const ArraySpec s = spec_from_json(meta, dir_ / kArrayMeta);
  check_region(s, offsets, data.shape());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!fits(s.dtype, data[i])) {
      throw RangeError("value " + std::to_string(data[i]) + " at element " +
                       std::to_string(i) + " does not fit dtype " + to_string(s.dtype));
    }
  }
  json& checksums = meta["checksums"];
  std::vector<double> region(data.values().begin(), data.values().end());
  for_each_chunk(s, offsets, data.shape(), [&](const Shape& index) {
    bool full = true;
    for (std::size_t d = 0; d < s.shape.size(); ++d) {
      const std::size_t c0 = index[d] * s.chunks[d];
      full = full && offsets[d] <= c0 && c0 + s.chunks[d] <= offsets[d] + data.shape()[d];
    }
    std::vector<double> chunk = full ? std::vector<double>(volume(s.chunks), s.fill)
                                     : load_chunk(dir_, s, checksums, index);
    copy_overlap<true>(s, index, offsets, data.shape(), chunk, region);
    const std::string stored = encode(s.codec, to_bytes(s.dtype, chunk));
    internal::write_file_atomic(chunk_path(index), stored);
    checksums[chunk_name(index)] = internal::crc32_of(stored.data(), stored.size());
  });
  write_json(dir_ / kArrayMeta, meta);
}

Tensor StoredArray::read_region(const Shape& offsets, const Shape& extents) const {
  const json meta = read_json(dir_ / kArrayMeta);
  const ArraySpec s = spec_from_json(meta, dir_ / kArrayMeta);
  check_region(s, offsets, extents);
  const json checksums = meta.value("checksums", json::object());
  Tensor out(extents, s.fill);
  for_each_chunk(s, offsets, extents, [&](const Shape& index) {
    std::vector<double> chunk = load_chunk(dir_, s, checksums, index);
    copy_overlap<false>(s, index, offsets, extents, chunk, out.values());
  });
  return out;
}

Tensor StoredArray::read_all() const {
  const ArraySpec s = spec();
  return read_region(Shape(s.shape.size(), 0), s.shape);
}

ChunkStore::ChunkStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw IoError("cannot create store root " + root_.string() + ": " + ec.message());
  if (fs::exists(root_ / kArrayMeta)) throw ConflictError(root_.string() + " is an array");
  if (!fs::exists(root_ / kGroupMeta)) {
    write_json(root_ / kGroupMeta,
               {{"kind", "group"}, {"format", kFormat}, {"attributes", json::object()}});
  }
}

bool ChunkStore::exists(std::string_view path) const {
  const fs::path d = dir_of(root_, split_path(path));
  return fs::exists(d / kGroupMeta) || fs::exists(d / kArrayMeta);
}

NodeKind ChunkStore::kind(std::string_view path) const {
  const fs::path d = dir_of(root_, split_path(path));
  if (fs::exists(d / kGroupMeta)) return NodeKind::kGroup;
  if (fs::exists(d / kArrayMeta)) return NodeKind::kArray;
  throw NotFoundError("no store node at '" + std::string(path) + "'");
}

StoreGroup ChunkStore::create_group(std::string_view path) {
  const auto parts = split_path(path);
  if (parts.empty()) return group("");
  const std::string parent = join(parts, parts.size() - 1);
  if (!exists(parent) || kind(parent) != NodeKind::kGroup) {
    throw NotFoundError("parent group '" + parent + "' does not exist");
  }
  const fs::path d = dir_of(root_, parts);
  if (fs::exists(d / kArrayMeta)) {
    throw ConflictError("'" + join(parts, parts.size()) + "' is already an array");
  }
  if (!fs::exists(d / kGroupMeta)) {
    if (fs::exists(d) && !fs::is_empty(d)) {
      throw ConflictError("'" + join(parts, parts.size()) + "' exists and is not a group");
    }
    fs::create_directories(d);
    write_json(d / kGroupMeta,
               {{"kind", "group"}, {"format", kFormat}, {"attributes", json::object()}});
  }
  return group(join(parts, parts.size()));
}

StoreGroup ChunkStore::require_group(std::string_view path) {
  const auto parts = split_path(path);
  StoreGroup g = group("");
  for (std::size_t i = 1; i <= parts.size(); ++i) g = create_group(join(parts, i));
  return g;
}

StoreGroup ChunkStore::group(std::string_view path) const {
  const auto parts = split_path(path);
  const fs::path meta = dir_of(root_, parts) / kGroupMeta;
  if (!fs::exists(meta)) throw NotFoundError("no group at '" + std::string(path) + "'");
  return {join(parts, parts.size()), read_json(meta).value("attributes", json::object())};
}

void ChunkStore::set_group_attributes(std::string_view path, const json& attributes) {
  if (!attributes.is_object()) throw ParameterError("attributes must be a JSON object");
  const fs::path meta = dir_of(root_, split_path(path)) / kGroupMeta;
  if (!fs::exists(meta)) throw NotFoundError("no group at '" + std::string(path) + "'");
  json j = read_json(meta);
  j["attributes"] = attributes;
  write_json(meta, j);
}

StoredArray ChunkStore::create_array(std::string_view group_path, std::string_view name,
                                     const ArraySpec& spec) {
  if (!valid_name(name)) throw NameError("invalid store name '" + std::string(name) + "'");
  auto parts = split_path(group_path);
  if (!fs::exists(dir_of(root_, parts) / kGroupMeta)) {
    throw NotFoundError("no group at '" + std::string(group_path) + "'");
  }
  validate_spec(spec);
  parts.emplace_back(name);
  const std::string path = join(parts, parts.size());
  const fs::path d = dir_of(root_, parts);
  if (fs::exists(d)) throw ConflictError("'" + path + "' already exists");
  fs::create_directories(d);
  write_json(d / kArrayMeta, spec_to_json(spec));
  return StoredArray(root_, path);
}

StoredArray ChunkStore::open_array(std::string_view path) const {
  const auto parts = split_path(path);
  return StoredArray(root_, join(parts, parts.size()));
}

std::vector<TreeEntry> ChunkStore::list_tree(std::string_view path) const {
  const auto parts = split_path(path);
  const std::string base = join(parts, parts.size());
  if (kind(base) != NodeKind::kGroup) return {};
  std::vector<TreeEntry> out;
  // Depth-first with sorted children: visit a group, then its subtree.
  std::function<void(const std::string&)> walk = [&](const std::string& g) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir_of(root_, split_path(g)))) {
      if (!e.is_directory()) continue;
      const std::string name = e.path().filename().string();
      if (valid_name(name) && (fs::exists(e.path() / kGroupMeta) ||
                               fs::exists(e.path() / kArrayMeta))) {
        names.push_back(name);
      }
    }
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
      const std::string child = g.empty() ? name : g + "/" + name;
      if (kind(child) == NodeKind::kGroup) {
        out.push_back({child, NodeKind::kGroup, {}});
        walk(child);
      } else {
        out.push_back({child, NodeKind::kArray, open_array(child).spec().shape});
      }
    }
  };
  walk(base);
  return out;
}

std::string format_tree(const std::vector<TreeEntry>& entries) {
  std::ostringstream os;
  for (const auto& e : entries) {
    const auto depth = static_cast<std::size_t>(std::count(e.path.begin(), e.path.end(), '/'));
    const std::size_t slash = e.path.rfind('/');
    os << std::string(2 * depth, ' ')
       << (slash == std::string::npos ? e.path : e.path.substr(slash + 1));
    if (e.kind == NodeKind::kArray) {
      os << " [";
      for (std::size_t i = 0; i < e.shape.size(); ++i) os << (i ? ", " : "") << e.shape[i];
      os << "]";
    } else {
      os << "/";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace terraseg::store

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

#include "terraseg/train/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "internal/fileio.hpp"
#include "terraseg/error.hpp"

namespace terraseg::train {

static_assert(std::endian::native == std::endian::little,
              "checkpoint codec assumes a little-endian host");

MonitorMode monitor_mode_for(const std::string& monitor) {
  return monitor.find("loss") != std::string::npos ? MonitorMode::kMin
                                                   : MonitorMode::kMax;
}

bool improves(double candidate, double best, MonitorMode mode,
              double min_delta) {
  return mode == MonitorMode::kMin ? candidate < best - min_delta
                                   : candidate > best + min_delta;
}

namespace {

constexpr char kMagic[4] = {'T', 'S', 'E', 'G'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void str(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, data_ + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str(const char* what, std::size_t limit) {
    const std::size_t at = pos_;
    const auto n = get<std::uint32_t>(what);
    if (n > limit) throw FormatError(std::string(what) + " length is implausible", at);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  void need(std::size_t n, const char* what) const {
    if (n > size_ - pos_) {
      throw FormatError(std::string("truncated ") + what, pos_);
    }
  }
  std::size_t pos() const { return pos_; }
  const std::uint8_t* cursor() const { return data_ + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  return internal::crc32_of(data, n);
}

struct NamedTensor {
  std::string name;
  const Tensor* value;
};

std::vector<NamedTensor> stored_tensors(const NetworkGraph& graph) {
  std::vector<NamedTensor> out;
  for (const auto& n : graph.nodes())
    for (const auto& p : n.params) out.push_back({n.name + "." + p.name, &p.value});
  for (const auto& n : graph.nodes()) {
    if (n.kind != NodeKind::kBatchNorm) continue;
    out.push_back({n.name + ".running_mean", &n.running.mean});
    out.push_back({n.name + ".running_variance", &n.running.variance});
  }
  return out;
}

std::vector<Tensor*> stored_tensors_mut(NetworkGraph& graph) {
  std::vector<Tensor*> out = graph.parameters();
  for (std::size_t i = 0; i < graph.size(); ++i) {
    Node& n = graph.node(i);
    if (n.kind != NodeKind::kBatchNorm) continue;
    out.push_back(&n.running.mean);
    out.push_back(&n.running.variance);
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> checkpoint_encode(const NetworkGraph& graph,
                                            const CheckpointHeader& header) {
  Writer w;
  w.bytes(kMagic, 4);
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint8_t>(header.monitor_value ? 1 : 0);
  w.put<std::uint8_t>(header.mode == MonitorMode::kMin ? 0 : 1);
  w.put<double>(header.monitor_value.value_or(0.0));
  const std::string desc = graph.descriptor().dump();
  w.put<std::uint64_t>(desc.size());
  w.bytes(desc.data(), desc.size());
  const auto tensors = stored_tensors(graph);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.str(t.name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.value->rank()));
    for (auto e : t.value->shape()) w.put<std::uint64_t>(e);
    w.bytes(t.value->data(), t.value->size() * sizeof(double));
  }
  const std::uint32_t crc = crc_of(w.buffer().data(), w.buffer().size());
  w.put<std::uint32_t>(crc);
  return std::move(w.buffer());
}

LoadedCheckpoint checkpoint_decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a checkpoint: bad magic", 0);
  }
  if (bytes.size() < 8) throw FormatError("truncated version", 4);
  const std::size_t body = bytes.size() - 4;
  Reader r(bytes.data(), body);
  r.skip(4);
  const std::size_t version_at = r.pos();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version),
                      version_at);
  }
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + body, 4);
  if (crc_of(bytes.data(), body) != stored_crc) {
    throw FormatError("checksum mismatch", body);
  }

  LoadedCheckpoint out;
  const auto has_monitor = r.get<std::uint8_t>("monitor flag");
  const std::size_t mode_at = r.pos();
  const auto mode = r.get<std::uint8_t>("monitor mode");
  if (has_monitor > 1 || mode > 1) throw FormatError("bad monitor block", mode_at);
  const double value = r.get<double>("monitor value");
  out.header.mode = mode == 0 ? MonitorMode::kMin : MonitorMode::kMax;
  if (has_monitor) out.header.monitor_value = value;

  const std::size_t desc_at = r.pos();
  const auto desc_len = r.get<std::uint64_t>("descriptor length");
  r.need(desc_len, "descriptor");
  nlohmann::json desc;
  try {
    desc = nlohmann::json::parse(r.cursor(), r.cursor() + desc_len);
  } catch (const nlohmann::json::exception&) {
    throw FormatError("descriptor is not valid JSON", desc_at + 8);
  }
  r.skip(desc_len);
  try {
    out.graph = NetworkGraph::from_descriptor(desc);
  } catch (const Error& e) {
    throw FormatError(std::string("descriptor does not build a graph: ") + e.what(),
                      desc_at + 8);
  }

  std::vector<Tensor*> slots = stored_tensors_mut(out.graph);
  const auto expected = stored_tensors(out.graph);
  const std::size_t count_at = r.pos();
  const auto count = r.get<std::uint32_t>("tensor count");
  if (count != slots.size()) {
    throw FormatError("expected " + std::to_string(slots.size()) +
                          " tensors, found " + std::to_string(count),
                      count_at);
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::size_t at = r.pos();
    const std::string name = r.str("tensor name", 4096);
    if (name != expected[i].name) {
      throw FormatError("expected tensor '" + expected[i].name + "', found '" +
                            name + "'",
                        at);
    }
    const std::size_t shape_at = r.pos();
    const auto rank = r.get<std::uint32_t>("tensor rank");
    Shape shape;
    for (std::uint32_t k = 0; k < rank && k < 8; ++k) {
      shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>("extent")));
    }
    if (shape != slots[i]->shape()) {
      throw FormatError("tensor '" + name + "' has shape " +
                            shape_to_string(shape) + ", expected " +
                            shape_to_string(slots[i]->shape()),
                        shape_at);
    }
    const std::size_t n = slots[i]->size() * sizeof(double);
    r.need(n, "tensor data");
    std::memcpy(slots[i]->data(), r.cursor(), n);
    r.skip(n);
  }
  if (r.pos() != body) throw FormatError("trailing bytes before checksum", r.pos());
  return out;
}

void checkpoint_write(const NetworkGraph& graph,
                      const std::filesystem::path& path,
                      const CheckpointHeader& header) {
  const auto bytes = checkpoint_encode(graph, header);
  internal::write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

bool checkpoint_save(const NetworkGraph& graph,
                     const std::filesystem::path& path, double monitor_value,
                     MonitorMode mode) {
  if (std::filesystem::exists(path)) {
    const CheckpointHeader old = checkpoint_load(path).header;
    if (old.monitor_value && old.mode == mode &&
        !improves(monitor_value, *old.monitor_value, mode)) {
      return false;
    }
  }
  checkpoint_write(graph, path, {monitor_value, mode});
  return true;
}

LoadedCheckpoint checkpoint_load(const std::filesystem::path& path) {
  const std::string raw = internal::read_file(path);
  const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
  return checkpoint_decode(bytes);
}

}  // namespace terraseg::train

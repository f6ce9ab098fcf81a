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

#include "terraseg/pipeline/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "internal/fileio.hpp"
#include "terraseg/geo/ops.hpp"
#include "terraseg/geo/wkt.hpp"
#include "terraseg/models/topologies.hpp"
#include "terraseg/nn/activation.hpp"
#include "terraseg/nn/loss.hpp"
#include "terraseg/pipeline/catalog.hpp"
#include "terraseg/rng.hpp"
#include "terraseg/split/datasplit.hpp"
#include "terraseg/store/chunk_store.hpp"
#include "terraseg/train/checkpoint.hpp"
#include "terraseg/train/engine.hpp"

namespace terraseg::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;
using store::ArraySpec;
using store::ChunkStore;
using store::StoredArray;

int exit_code_for(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kConfig:
    case ErrorCategory::kParameter:
    case ErrorCategory::kName:
      return kExitConfig;
    case ErrorCategory::kData:
    case ErrorCategory::kParse:
    case ErrorCategory::kFormat:
    case ErrorCategory::kNotFound:
    case ErrorCategory::kIntegrity:
    case ErrorCategory::kExtent:
    case ErrorCategory::kRange:
    case ErrorCategory::kUndefinedMetric:
      return kExitData;
    default:
      return kExitRuntime;
  }
}

namespace {

constexpr double kNoLabel = 255.0;
constexpr const char* kClassesArray = "classes";
constexpr const char* kFoldArray = "multilabel_stratified_kfolds";
constexpr std::uint64_t kSplitStream = 0x5350;  // seed stream for fold assignment

void say(const LogFn& log, const std::string& msg) {
  if (log) log(msg);
}

std::string under(const std::string& group, const std::string& rel) {
  return group.empty() ? rel : group + "/" + rel;
}

std::pair<std::string, std::string> split_parent(const std::string& path) {
  const std::size_t slash = path.rfind('/');
  if (slash == std::string::npos) return {"", path};
  return {path.substr(0, slash), path.substr(slash + 1)};
}

std::string fmt(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// Creates the array, or reuses an existing one with the same layout.
StoredArray ensure_array(ChunkStore& s, const std::string& path, const ArraySpec& spec) {
  const auto [parent, name] = split_parent(path);
  s.require_group(parent);
  if (s.exists(path)) {
    StoredArray a = s.open_array(path);
    const ArraySpec old = a.spec();
    const bool same_fill = std::isnan(old.fill) ? std::isnan(spec.fill) : old.fill == spec.fill;
    if (old.shape != spec.shape || old.chunks != spec.chunks || old.dtype != spec.dtype ||
        old.codec != spec.codec || !same_fill) {
      throw ConflictError("store array '" + path +
                          "' exists with a different layout; remove it to re-ingest");
    }
    return a;
  }
  return s.create_array(parent, name, spec);
}

store::DType dtype_for_sidecar(const fs::path& raster) {
  const json j = json::parse(internal::read_file(geo::sidecar_path(raster)), nullptr, false);
  const std::string t = j.is_object() ? j.value("dtype", std::string("float64")) : "float64";
  if (t == "uint8") return store::DType::kU8;
  if (t == "uint16") return store::DType::kU16;
  if (t == "int16" || t == "int32") return store::DType::kI32;
  if (t == "float32") return store::DType::kF32;
  return store::DType::kF64;
}

geo::GeoRaster load_input(const fs::path& path) {
  try {
    return geo::load_raster(path);
  } catch (const NotFoundError& e) {
    throw DataError(std::string("missing raster or sidecar: ") + e.what());
  }
}

// Nearest-neighbor resampling onto the reference grid.
geo::GeoRaster onto_grid(const geo::GeoRaster& src, const geo::GeoRaster& ref,
                         const std::string& what) {
  if (src.crs() != ref.crs()) {
    throw DataError(what + ": CRS '" + src.crs() + "' differs from the reference '" + ref.crs() +
                    "'");
  }
  if (src.width() == ref.width() && src.height() == ref.height() &&
      src.transform() == ref.transform()) {
    return src;
  }
  geo::GeoRaster out(ref.width(), ref.height(), src.channels(), ref.transform(), ref.crs(),
                     src.nodata());
  for (std::size_t r = 0; r < ref.height(); ++r) {
    for (std::size_t c = 0; c < ref.width(); ++c) {
      const auto [x, y] = ref.pixel_center(c, r);
      const auto [pc, pr] = src.transform().to_pixel(x, y);
      const double fc = std::floor(pc), fr = std::floor(pr);
      if (fc < 0 || fr < 0 || fc >= static_cast<double>(src.width()) ||
          fr >= static_cast<double>(src.height())) {
        continue;
      }
      for (std::size_t ch = 0; ch < src.channels(); ++ch) {
        out.at(ch, r, c) = src.at(ch, static_cast<std::size_t>(fr), static_cast<std::size_t>(fc));
      }
    }
  }
  return out;
}

std::vector<geo::Burn> label_burns(const IngestSettings& in, const std::string& crs) {
  std::vector<LabelPolygon> polys = in.polygons;
  if (!in.labels_file.empty()) {
    std::istringstream lines(internal::read_file(in.labels_file));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      const std::size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      const std::size_t gap = line.find_first_of(" \t", start);
      LabelPolygon lp;
      const char* first = line.data() + start;
      const char* last = line.data() + (gap == std::string::npos ? line.size() : gap);
      const auto [p, ec] = std::from_chars(first, last, lp.code);
      if (ec != std::errc() || p != last || gap == std::string::npos) {
        throw DataError(in.labels_file.string() + ":" + std::to_string(lineno) +
                        ": expected '<code> <WKT>'");
      }
      lp.wkt = line.substr(gap + 1);
      polys.push_back(std::move(lp));
    }
  }
  std::vector<geo::Burn> burns;
  for (const auto& p : polys) {
    std::int64_t cls = p.code;
    if (!in.class_map.empty()) {
      const auto it = in.class_map.find(p.code);
      if (it == in.class_map.end()) {
        throw DataError("label code " + std::to_string(p.code) + " has no class_map entry");
      }
      cls = it->second;
    }
    if (cls < 0 || cls > 254) {
      throw DataError("class id " + std::to_string(cls) + " is outside [0, 254]");
    }
    geo::Burn b{geo::parse_wkt(p.wkt), static_cast<double>(cls)};
    b.geometry.crs = crs;
    burns.push_back(std::move(b));
  }
  return burns;
}

// Channel-planar tile raster to a [1, ..., ts, ts, ch] tensor.
Tensor tile_tensor(const geo::GeoRaster& t, Shape lead) {
  const std::size_t ts = t.width(), ch = t.channels();
  Shape shape = std::move(lead);
  shape.insert(shape.end(), {ts, ts});
  if (ch > 1) shape.push_back(ch);
  Tensor out(shape, 0.0);
  for (std::size_t r = 0; r < ts; ++r)
    for (std::size_t c = 0; c < ts; ++c)
      for (std::size_t k = 0; k < ch; ++k) out[(r * ts + c) * ch + k] = t.at(k, r, c);
  return out;
}

json grid_attributes(const geo::GeoRaster& ref, std::size_t tile_size, const geo::TileGrid& g) {
  return {{"width", ref.width()},         {"height", ref.height()},
          {"tile_size", tile_size},       {"tiles_x", g.cols},
          {"tiles_y", g.rows},            {"crs", ref.crs()},
          {"geotransform", ref.transform().c}};
}

// Read-side view of an ingested store.
struct Dataset {
  ChunkStore store;
  std::vector<StoredArray> inputs;
  std::vector<std::size_t> input_channels;
  StoredArray labels;
  StoredArray ignore;
  std::size_t timestamps = 0;
  std::size_t tiles_y = 0;
  std::size_t tiles_x = 0;
  std::size_t tile_size = 0;
  json grid;
  double input_scale = 1.0;

  std::size_t tiles() const { return tiles_y * tiles_x; }
  std::size_t channels() const {
    std::size_t n = 0;
    for (std::size_t c : input_channels) n += c;
    return n;
  }
};

StoredArray open_required(const ChunkStore& s, const std::string& path, const char* hint) {
  if (!s.exists(path)) {
    throw DataError("store has no '" + path + "'; run " + hint + " first");
  }
  return s.open_array(path);
}

Dataset open_dataset(const PipelineConfig& c) {
  if (!fs::exists(c.data_source.source / ".group.json")) {
    throw DataError("no store at " + c.data_source.source.string() + "; run ingest first");
  }
  ChunkStore s(c.data_source.source);
  const std::string& g = c.data_source.group;
  StoredArray labels = open_required(s, under(g, c.data_source.target), "ingest");
  StoredArray ignore = open_required(s, under(g, c.data_source.ignore), "ingest");
  Dataset d{s, {}, {}, labels, ignore, 0, 0, 0, 0, json::object(), 1.0};
  const ArraySpec ls = labels.spec();
  if (ls.shape.size() != 4) throw DataError("label array must be [tiles_y, tiles_x, ts, ts]");
  d.tiles_y = ls.shape[0];
  d.tiles_x = ls.shape[1];
  d.tile_size = ls.shape[2];
  d.timestamps = ignore.spec().shape.at(0);
  d.grid = labels.attributes();
  d.input_scale = c.data_source.input_scale;
  for (const auto& comp : c.data_source.inputs) {
    StoredArray a = open_required(s, under(g, comp), "ingest");
    const ArraySpec sp = a.spec();
    if (sp.shape.size() != 6 || sp.shape[0] != d.timestamps || sp.shape[1] != d.tiles_y ||
        sp.shape[2] != d.tiles_x || sp.shape[3] != d.tile_size) {
      throw DataError("input component '" + comp + "' does not share the label tile grid");
    }
    d.input_channels.push_back(sp.shape[5]);
    d.inputs.push_back(std::move(a));
  }
  return d;
}

struct TileKey {
  std::size_t t;
  std::size_t tile;
};

// Tiles as training samples. Labels and ignore masks are center-cropped to
// `out` when a network with unpadded convolutions predicts a smaller map.
class StoreSource : public train::SampleSource {
 public:
  StoreSource(const Dataset& d, std::vector<TileKey> keys, std::size_t out = 0)
      : d_(d), keys_(std::move(keys)), out_(out == 0 ? d.tile_size : out) {}
  std::size_t size() const override { return keys_.size(); }

  train::Sample get(std::size_t index) const override {
    const TileKey k = keys_.at(index);
    const std::size_t ty = k.tile / d_.tiles_x, tx = k.tile % d_.tiles_x, ts = d_.tile_size;
    train::Sample s;
    s.input = Tensor({d_.channels(), ts, ts}, 0.0);
    std::size_t base = 0;
    for (std::size_t i = 0; i < d_.inputs.size(); ++i) {
      const std::size_t ch = d_.input_channels[i];
      const Tensor raw = d_.inputs[i].read_region({k.t, ty, tx, 0, 0, 0}, {1, 1, 1, ts, ts, ch});
      for (std::size_t p = 0; p < ts * ts; ++p)
        for (std::size_t c = 0; c < ch; ++c)
          s.input[(base + c) * ts * ts + p] = raw[p * ch + c] * d_.input_scale;
      base += ch;
    }
    s.labels = d_.labels.read_region({ty, tx, 0, 0}, {1, 1, ts, ts}).reshape({ts, ts});
    s.ignore = d_.ignore.read_region({k.t, ty, tx, 0, 0}, {1, 1, 1, ts, ts}).reshape({ts, ts});
    for (std::size_t p = 0; p < ts * ts; ++p) {
      if (s.labels[p] == kNoLabel) {
        s.ignore[p] = 1.0;
        s.labels[p] = 0.0;
      }
    }
    if (out_ != ts) {
      s.labels = crop_center(s.labels.reshape({1, ts, ts}), out_, out_).reshape({out_, out_});
      s.ignore = crop_center(s.ignore.reshape({1, ts, ts}), out_, out_).reshape({out_, out_});
    }
    return s;
  }

 private:
  const Dataset& d_;
  std::vector<TileKey> keys_;
  std::size_t out_;
};

std::pair<std::size_t, std::size_t> time_range(const PipelineConfig& c, const Dataset& d) {
  if (!c.data_source.slice_timestamps) return {0, d.timestamps};
  const auto [b, e] = *c.data_source.slice_timestamps;
  if (e > d.timestamps) {
    throw ConfigError("data_source.slice_timestamps: end " + std::to_string(e) +
                      " exceeds the " + std::to_string(d.timestamps) + " stored timestamps");
  }
  return {b, e};
}

std::vector<std::size_t> read_folds(const PipelineConfig& c, const Dataset& d) {
  const std::string path = under(c.data_source.group, c.data_source.samples + "/" + kFoldArray);
  const Tensor folds = open_required(d.store, path, "split").read_all();
  if (folds.size() != d.tiles()) throw DataError("fold array does not match the tile count");
  std::vector<std::size_t> out(folds.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::size_t>(folds[i]);
  return out;
}

std::vector<TileKey> keys_for(const PipelineConfig& c, const Dataset& d,
                              const std::vector<std::size_t>& folds,
                              std::optional<std::size_t> fold, bool in_fold) {
  const auto [b, e] = time_range(c, d);
  std::vector<TileKey> keys;
  for (std::size_t t = b; t < e; ++t)
    for (std::size_t i = 0; i < d.tiles(); ++i)
      if (!fold || ((folds[i] == *fold) == in_fold)) keys.push_back({t, i});
  return keys;
}

models::TopologySpec topology_for(const PipelineConfig& c, const Dataset& d) {
  const TopologySettings& t = c.trainer.topology;
  if (!c.trainer.num_classes) throw ConfigError("trainer.num_classes is required");
  models::TopologySpec s;
  s.kind = models::parse_topology_kind(t.kind);
  s.depth = t.depth;
  s.base_channels = t.base_channels;
  s.in_channels = d.channels();
  s.num_classes = *c.trainer.num_classes;
  const nn::ActivationKind kind = nn::parse_activation_kind(t.activation);
  switch (kind) {
    case nn::ActivationKind::kElu: s.activation = nn::Activation::elu(); break;
    case nn::ActivationKind::kLeakyRelu: s.activation = nn::Activation::leaky_relu(); break;
    default: s.activation = {kind, 0.0};
  }
  if (t.activation_alpha) s.activation.alpha = *t.activation_alpha;
  s.input_height = s.input_width = d.tile_size;
  s.padded = t.padded;
  s.dropout = t.dropout;
  s.seed = c.seed;
  return s;
}

fs::path checkpoint_path(const PipelineConfig& c, const fs::path& configured) {
  return configured.empty() ? c.workspace / "checkpoint.tseg" : configured;
}

void ensure_workspace(const PipelineConfig& c) {
  std::error_code ec;
  fs::create_directories(c.workspace, ec);
  if (ec) throw IoError("cannot create workspace " + c.workspace.string() + ": " + ec.message());
}

train::NetworkGraph load_model(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("no checkpoint at " + path.string() + "; run train first");
  return train::checkpoint_load(path).graph;
}

std::size_t model_classes(const train::NetworkGraph& g) { return g.output_shape().at(0); }

void check_model_fits(const train::NetworkGraph& g, const Dataset& d) {
  const Shape in = g.input_shape();
  if (in.at(0) != d.channels() || in.at(1) != d.tile_size || in.at(2) != d.tile_size) {
    throw ConfigError("the checkpoint expects " + shape_to_string(in) + " inputs, the store has " +
                      std::to_string(d.channels()) + " channels in " +
                      std::to_string(d.tile_size) + "-pixel tiles");
  }
}

}  // namespace

json cmd_ingest(const PipelineConfig& c, const LogFn& log) {
  const IngestSettings& in = c.ingest;
  if (in.scenes.empty()) throw ConfigError("ingest.scenes: at least one scene is required");
  const auto& comps = c.data_source.inputs;
  for (std::size_t t = 0; t < in.scenes.size(); ++t) {
    const auto& im = in.scenes[t].imagery;
    for (const auto& comp : comps) {
      if (!im.count(comp)) {
        throw ConfigError("ingest.scenes[" + std::to_string(t) + "].imagery: missing component '" +
                          comp + "'");
      }
    }
    if (im.size() != comps.size()) {
      throw ConfigError("ingest.scenes[" + std::to_string(t) +
                        "].imagery: components must match data_source.inputs");
    }
  }

  const geo::GeoRaster ref = load_input(in.scenes[0].imagery.at(comps[0]));
  const std::size_t ts = in.tile_size;
  ChunkStore s(c.data_source.source);
  const std::string& g = c.data_source.group;
  s.require_group(g);

  const std::vector<geo::Burn> burns = label_burns(in, ref.crs());
  const geo::GeoRaster labels = geo::rasterize(burns, ref.like(1, kNoLabel));
  const geo::Tiling label_tiles = geo::tile(labels, ts);
  const geo::TileGrid& grid = label_tiles.grid;
  const std::size_t T = in.scenes.size();
  say(log, "ingest: " + std::to_string(ref.width()) + "x" + std::to_string(ref.height()) +
               " scene, " + std::to_string(grid.cols) + "x" + std::to_string(grid.rows) +
               " tiles of " + std::to_string(ts) + ", " + std::to_string(T) + " timestamp(s)");

  const json attrs = grid_attributes(ref, ts, grid);
  StoredArray label_arr = ensure_array(
      s, under(g, c.data_source.target),
      {{grid.rows, grid.cols, ts, ts}, {1, 1, ts, ts}, store::DType::kU8, store::Codec::kDeflate,
       kNoLabel});
  for (const auto& tl : label_tiles.tiles) {
    label_arr.write_region({tl.row, tl.col, 0, 0}, tile_tensor(tl.raster, {1, 1}));
  }
  std::set<std::int64_t> classes;
  for (const auto& b : burns) classes.insert(static_cast<std::int64_t>(b.code));
  json label_attrs = attrs;
  label_attrs["nodata"] = kNoLabel;
  label_attrs["classes"] = classes;
  label_arr.set_attributes(label_attrs);

  StoredArray ignore_arr = ensure_array(
      s, under(g, c.data_source.ignore),
      {{T, grid.rows, grid.cols, ts, ts}, {1, 1, 1, ts, ts}, store::DType::kU8,
       store::Codec::kDeflate, 1.0});
  const std::set<std::int64_t> cloud(in.cloud_codes.begin(), in.cloud_codes.end());

  std::vector<StoredArray> input_arrs;
  for (std::size_t t = 0; t < T; ++t) {
    geo::GeoRaster ignore = ref.like(1, 1.0);
    for (std::size_t p = 0; p < ignore.values().size(); ++p) {
      ignore.values()[p] = labels.values()[p] == kNoLabel ? 1.0 : 0.0;
    }
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const fs::path& path = in.scenes[t].imagery.at(comps[k]);
      const geo::GeoRaster raw = (t == 0 && k == 0) ? ref : load_input(path);
      const geo::GeoRaster r = onto_grid(raw, ref, path.string());
      if (t == 0) {
        const double nodata = r.nodata();
        ArraySpec spec{{T, grid.rows, grid.cols, ts, ts, r.channels()},
                       {1, 1, 1, ts, ts, r.channels()}, dtype_for_sidecar(path),
                       store::Codec::kDeflate, nodata};
        input_arrs.push_back(ensure_array(s, under(g, comps[k]), spec));
        json a = attrs;
        a["nodata"] = std::isnan(nodata) ? json("nan") : json(nodata);
        input_arrs.back().set_attributes(a);
      } else if (input_arrs[k].spec().shape[5] != r.channels()) {
        throw DataError(path.string() + ": channel count differs from the first scene");
      }
      for (std::size_t p = 0; p < ref.width() * ref.height(); ++p)
        for (std::size_t ch = 0; ch < r.channels(); ++ch)
          if (r.is_nodata(r.values()[ch * ref.width() * ref.height() + p])) ignore.values()[p] = 1.0;
      for (const auto& tl : geo::tile(r, ts).tiles) {
        input_arrs[k].write_region({t, tl.row, tl.col, 0, 0, 0}, tile_tensor(tl.raster, {1, 1, 1}));
      }
    }
    if (!in.scenes[t].scl.empty()) {
      const geo::GeoRaster scl = onto_grid(load_input(in.scenes[t].scl), ref,
                                           in.scenes[t].scl.string());
      const geo::GeoRaster mask = geo::scl_to_ignore_mask(scl, cloud);
      for (std::size_t p = 0; p < mask.values().size(); ++p)
        if (mask.values()[p] != 0.0) ignore.values()[p] = 1.0;
    }
    for (const auto& tl : geo::tile(ignore, ts).tiles) {
      ignore_arr.write_region({t, tl.row, tl.col, 0, 0}, tile_tensor(tl.raster, {1, 1, 1}));
    }
  }
  ignore_arr.set_attributes(attrs);

  json summary = attrs;
  summary["timestamps"] = T;
  summary["classes"] = classes;
  summary["store"] = c.data_source.source.string();
  return summary;
}

json cmd_split(const PipelineConfig& c, const LogFn& log) {
  Dataset d = open_dataset(c);
  const std::size_t n = d.tiles(), ts = d.tile_size, K = c.folds;
  if (n < K) {
    throw ParameterError("cannot split " + std::to_string(n) + " tiles into " +
                         std::to_string(K) + " folds");
  }
  const Tensor labels = d.labels.read_all();
  std::size_t classes = c.trainer.num_classes.value_or(0);
  if (classes == 0) {
    for (double v : labels.values())
      if (v != kNoLabel) classes = std::max(classes, static_cast<std::size_t>(v) + 1);
    classes = std::max<std::size_t>(classes, 2);
  }
  std::vector<split::SampleRecord> samples;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor tile({ts, ts}, 0.0), ignore({ts, ts}, 0.0);
    for (std::size_t p = 0; p < ts * ts; ++p) {
      const double v = labels[i * ts * ts + p];
      if (v == kNoLabel) {
        ignore[p] = 1.0;
      } else if (v >= static_cast<double>(classes)) {
        throw ConfigError("label id " + fmt(v) + " exceeds trainer.num_classes = " +
                          std::to_string(classes));
      } else {
        tile[p] = v;
      }
    }
    samples.push_back({"tile_" + std::to_string(i / d.tiles_x) + "_" + std::to_string(i % d.tiles_x),
                       split::presence_from_labels(tile, ignore, classes)});
  }
  const std::uint64_t seed = derive_seed(c.seed, kSplitStream);
  const split::FoldAssignment folds = split::stratified_kfold_partition(samples, K, seed);
  json manifest = split::fold_manifest(samples, folds, seed);
  say(log, "split: " + std::to_string(n) + " tiles into " + std::to_string(K) +
               " folds, class spread " +
               std::to_string(split::stratification_spread(samples, folds)));

  const std::string base = under(c.data_source.group, c.data_source.samples);
  StoredArray presence = ensure_array(d.store, base + "/" + kClassesArray,
                                      {{n, classes}, {n, classes}, store::DType::kU8,
                                       store::Codec::kRaw, 0});
  Tensor p({n, classes}, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < classes; ++k) p[i * classes + k] = samples[i].presence[k] ? 1 : 0;
  presence.write_region({0, 0}, p);

  StoredArray fold_arr = ensure_array(d.store, base + "/" + kFoldArray,
                                      {{n}, {n}, store::DType::kU8, store::Codec::kRaw, 0});
  Tensor f({n}, 0.0);
  for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<double>(folds.fold[i]);
  fold_arr.write_region({0}, f);
  fold_arr.set_attributes(manifest);
  return manifest;
}

train::History cmd_train(const PipelineConfig& c, const LogFn& log) {
  Dataset d = open_dataset(c);
  const std::vector<std::size_t> folds = read_folds(c, d);
  train::NetworkGraph graph = models::build_topology(topology_for(c, d));
  const std::size_t out = graph.output_shape().at(1);
  const auto& val = c.trainer.validation_fold;
  const StoreSource train_src(d, keys_for(c, d, folds, val, false), out);
  std::optional<StoreSource> val_src;
  if (val) val_src.emplace(d, keys_for(c, d, folds, val, true), out);
  if (train_src.size() == 0) throw DataError("no training tiles outside the validation fold");
  if (val_src && val_src->size() == 0) throw DataError("the validation fold is empty");
  const OptimizerSettings& o = c.trainer.optimizer;
  train::OptimizerState opt =
      train::parse_optimizer_kind(o.kind) == train::OptimizerKind::kSgd
          ? train::OptimizerState::sgd(o.lr)
          : train::OptimizerState::adam(o.lr, o.beta_1, o.beta_2, o.epsilon);

  ensure_workspace(c);
  train::TrainConfig tc;
  tc.epochs = c.trainer.epochs;
  tc.batch_size = c.trainer.batch_size;
  tc.seed = c.seed;
  tc.shuffle = c.data_source.randomise;
  tc.loss = c.trainer.loss;
  tc.metrics = c.trainer.metrics;
  tc.averaging = c.trainer.averaging == "micro" ? metrics::Averaging::kMicro
                                                : metrics::Averaging::kMacro;
  if (const auto& e = c.trainer.early_stopping) tc.early_stop = {{e->monitor, e->min_delta, e->patience}};
  if (const auto& p = c.trainer.reduce_lr_on_plateau) {
    tc.plateau = {{p->monitor, p->patience, p->factor, p->min_delta, p->min_lr}};
  }
  const fs::path ckpt = c.workspace / "checkpoint.tseg";
  fs::remove(ckpt);
  tc.checkpoint = {{c.trainer.checkpoint_monitor, ckpt}};
  say(log, "train: " + std::to_string(train_src.size()) + " training and " +
               std::to_string(val_src ? val_src->size() : 0) + " validation samples, " +
               std::to_string(graph.parameter_count()) + " parameters");

  const train::History h = train::fit(
      graph, train_src, val_src ? &*val_src : nullptr, opt, tc, [&](const train::EpochRecord& r) {
        std::string line = "epoch " + std::to_string(r.epoch) + " lr " + fmt(r.learning_rate) +
                           " loss " + fmt(r.train_loss);
        if (r.val_loss) line += " val_loss " + fmt(*r.val_loss);
        say(log, line);
      });
  internal::write_file_atomic(c.workspace / "history.tsv", history_to_text(h));
  internal::write_file_atomic(c.workspace / "history.json", history_to_json(h).dump(2) + "\n");
  return h;
}

metrics::MetricReport cmd_evaluate(const PipelineConfig& c, const LogFn& log) {
  Dataset d = open_dataset(c);
  train::NetworkGraph graph = load_model(checkpoint_path(c, c.evaluate.checkpoint));
  check_model_fits(graph, d);
  const std::size_t classes = model_classes(graph);
  if (c.trainer.num_classes && *c.trainer.num_classes != classes) {
    throw ConfigError("trainer.num_classes = " + std::to_string(*c.trainer.num_classes) +
                      " but the checkpoint predicts " + std::to_string(classes) + " classes");
  }
  const Tensor labels = d.labels.read_all();
  for (double v : labels.values()) {
    if (v != kNoLabel && v >= static_cast<double>(classes)) {
      throw ConfigError("label id " + fmt(v) + " is outside the checkpoint's " +
                        std::to_string(classes) + " classes");
    }
  }
  const std::optional<std::size_t> fold =
      c.evaluate.fold ? c.evaluate.fold : c.trainer.validation_fold;
  const std::vector<std::size_t> folds = fold ? read_folds(c, d) : std::vector<std::size_t>{};
  const StoreSource src(d, keys_for(c, d, folds, fold, true), graph.output_shape().at(1));
  if (src.size() == 0) throw DataError("no tiles to evaluate");
  say(log, "evaluate: " + std::to_string(src.size()) + " samples" +
               (fold ? " from fold " + std::to_string(*fold) : std::string(" (all folds)")));
  const train::Evaluation ev = train::evaluate(graph, src, c.trainer.batch_size);
  const metrics::MetricReport report = metrics::make_report(
      ev.confusion,
      c.trainer.averaging == "micro" ? metrics::Averaging::kMicro : metrics::Averaging::kMacro);
  ensure_workspace(c);
  internal::write_file_atomic(c.workspace / "report.json", metrics::report_to_json(report) + "\n");
  internal::write_file_atomic(c.workspace / "report.txt", metrics::report_to_text(report));
  return report;
}

geo::GeoRaster cmd_predict(const PipelineConfig& c, const LogFn& log) {
  Dataset d = open_dataset(c);
  train::NetworkGraph graph = load_model(checkpoint_path(c, c.predict.checkpoint));
  check_model_fits(graph, d);
  const std::size_t width = d.grid.at("width"), height = d.grid.at("height");
  const Window w = c.predict.region.value_or(Window{0, 0, width, height});
  if (w.x + w.width > width || w.y + w.height > height) {
    throw RangeError("predict.region exceeds the " + std::to_string(width) + "x" +
                     std::to_string(height) + " scene");
  }
  const std::size_t t = c.predict.timestamp.value_or(time_range(c, d).first);
  if (t >= d.timestamps) {
    throw RangeError("predict.timestamp " + std::to_string(t) + " is beyond the " +
                     std::to_string(d.timestamps) + " stored timestamps");
  }
  geo::GeoTransform gt;
  gt.c = d.grid.at("geotransform").get<std::array<double, 6>>();
  geo::GeoRaster mask(w.width, w.height, 1, gt.shifted(w.x, w.y), d.grid.at("crs"), kNoLabel);
  const std::size_t ts = d.tile_size;
  // Unpadded networks only cover the tile center; the border stays 255.
  const std::size_t out = graph.output_shape().at(1), margin = (ts - out) / 2;
  for (std::size_t ty = w.y / ts; ty <= (w.y + w.height - 1) / ts; ++ty) {
    for (std::size_t tx = w.x / ts; tx <= (w.x + w.width - 1) / ts; ++tx) {
      const StoreSource src(d, {{t, ty * d.tiles_x + tx}});
      const train::Sample s = src.get(0);
      const Tensor ignore = d.ignore.read_region({t, ty, tx, 0, 0}, {1, 1, 1, ts, ts});
      const Tensor cls = nn::argmax_channels(train::predict(graph, s.input));
      for (std::size_t r = 0; r < ts; ++r) {
        for (std::size_t col = 0; col < ts; ++col) {
          const std::size_t gy = ty * ts + r, gx = tx * ts + col;
          if (gy < w.y || gy >= w.y + w.height || gx < w.x || gx >= w.x + w.width) continue;
          const bool covered = r >= margin && r < margin + out && col >= margin &&
                               col < margin + out;
          const double v = covered ? cls[(r - margin) * out + col - margin] : kNoLabel;
          mask.at(0, gy - w.y, gx - w.x) = ignore[r * ts + col] != 0.0 ? kNoLabel : v;
        }
      }
    }
  }
  say(log, "predict: " + std::to_string(w.width) + "x" + std::to_string(w.height) +
               " mask at timestamp " + std::to_string(t));
  ensure_workspace(c);
  geo::export_pgm(mask, c.workspace / "prediction.pgm");
  return mask;
}

std::string cmd_query(const PipelineConfig& c, const LogFn& log) {
  const std::string url = build_catalog_query(catalog_query_from(c.query));
  say(log, "query: " + std::to_string(query_tokens(url).size()) + " tokens");
  ensure_workspace(c);
  internal::write_file_atomic(c.workspace / "query.txt", url + "\n");
  return url;
}

std::string history_to_text(const train::History& h) {
  std::set<std::string> keys;
  for (const auto& e : h.epochs)
    for (const auto& [k, v] : e.values)
      if (k != "loss" && k != "val_loss") keys.insert(k);
  std::string s = "epoch\tlr\ttrain_loss\tval_loss";
  for (const auto& k : keys) s += "\t" + k;
  s += "\n";
  for (const auto& e : h.epochs) {
    s += std::to_string(e.epoch) + "\t" + fmt(e.learning_rate) + "\t" + fmt(e.train_loss) + "\t" +
         (e.val_loss ? fmt(*e.val_loss) : "-");
    for (const auto& k : keys) {
      const auto it = e.values.find(k);
      s += "\t" + (it == e.values.end() ? std::string("-") : fmt(it->second));
    }
    s += "\n";
  }
  return s;
}

json history_to_json(const train::History& h) {
  json epochs = json::array();
  for (const auto& e : h.epochs) {
    json rec{{"epoch", e.epoch}, {"lr", e.learning_rate}, {"train_loss", e.train_loss},
             {"val_loss", e.val_loss ? json(*e.val_loss) : json(nullptr)},
             {"checkpoint_written", e.checkpoint_written}};
    json m = json::object();
    for (const auto& [k, v] : e.values)
      if (k != "loss" && k != "val_loss") m[k] = v;
    rec["metrics"] = m;
    epochs.push_back(rec);
  }
  return {{"epochs", epochs}, {"stopped_early", h.stopped_early},
          {"lr_reductions", h.lr_reductions}};
}

}  // namespace terraseg::pipeline

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

#include "terraseg/pipeline/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "internal/fileio.hpp"
#include "terraseg/error.hpp"
#include "terraseg/models/topologies.hpp"
#include "terraseg/nn/activation.hpp"
#include "terraseg/train/optimizer.hpp"

namespace terraseg::pipeline {
namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError((path.empty() ? std::string("config") : path) + ": " + what);
}

void reject_foreign_tags(const YAML::Node& node, const std::string& path) {
  const std::string& tag = node.Tag();
  static const std::set<std::string> core{"str", "int", "float", "bool", "null", "map", "seq"};
  const std::string prefix = "tag:yaml.org,2002:";
  const bool is_core = tag.rfind(prefix, 0) == 0 && core.count(tag.substr(prefix.size())) > 0;
  if (!tag.empty() && tag != "?" && tag != "!" && !is_core) {
    fail(path, "tag '" + tag + "' is not supported; use plain keys instead");
  }
}

std::string scalar(const YAML::Node& node, const std::string& path) {
  reject_foreign_tags(node, path);
  if (!node.IsScalar()) fail(path, "expected a scalar");
  return node.Scalar();
}

template <typename T>
T as(const YAML::Node& node, const std::string& path);

template <>
std::string as<std::string>(const YAML::Node& node, const std::string& path) {
  return scalar(node, path);
}

template <>
std::filesystem::path as<std::filesystem::path>(const YAML::Node& node, const std::string& path) {
  return scalar(node, path);
}

template <>
bool as<bool>(const YAML::Node& node, const std::string& path) {
  scalar(node, path);
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail(path, "expected true or false");
  }
}

template <>
double as<double>(const YAML::Node& node, const std::string& path) {
  scalar(node, path);
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(path, "expected a number, got '" + node.Scalar() + "'");
  }
}

template <typename I>
I as_integer(const YAML::Node& node, const std::string& path) {
  const std::string s = scalar(node, path);
  I v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    fail(path, "expected " + std::string(std::is_unsigned_v<I> ? "a non-negative " : "an ") +
                   "integer, got '" + s + "'");
  }
  return v;
}

template <>
std::size_t as<std::size_t>(const YAML::Node& node, const std::string& path) {
  return as_integer<std::size_t>(node, path);
}

template <>
std::int64_t as<std::int64_t>(const YAML::Node& node, const std::string& path) {
  return as_integer<std::int64_t>(node, path);
}

// A mapping whose keys must all be consumed before finish().
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    reject_foreign_tags(node, path_);
    if (node && !node.IsNull() && !node.IsMap()) fail(path_, "expected a mapping");
  }

  bool has(const std::string& key) const {
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  YAML::Node child(const std::string& key) {
    used_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node();
    return node_[key];
  }

  std::string path(const std::string& key) const { return join_path(path_, key); }

  template <typename T>
  void read(const std::string& key, T& into) {
    const YAML::Node n = child(key);
    if (n && !n.IsNull()) into = as<T>(n, path(key));
  }

  template <typename T>
  void read(const std::string& key, std::optional<T>& into) {
    const YAML::Node n = child(key);
    if (n && !n.IsNull()) into = as<T>(n, path(key));
  }

  template <typename T>
  void read_list(const std::string& key, std::vector<T>& into) {
    const YAML::Node n = child(key);
    if (!n || n.IsNull()) return;
    reject_foreign_tags(n, path(key));
    if (!n.IsSequence()) fail(path(key), "expected a list");
    into.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      into.push_back(as<T>(n[i], path(key) + "[" + std::to_string(i) + "]"));
    }
  }

  void require(const std::string& key) {
    if (!has(key)) fail(path(key), "is required");
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.Scalar();
      if (!used_.count(key)) fail(join_path(path_, key), "unknown key");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename F>
void guard(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

void parse_data_source(Section s, DataSourceSettings& d, std::optional<std::uint64_t>& seed) {
  s.read("source", d.source);
  s.read("group", d.group);
  {
    std::vector<std::size_t> slice;
    s.read_list("slice_timestamps", slice);
    if (s.has("slice_timestamps")) {
      if (slice.size() != 2 || slice[0] >= slice[1]) {
        fail(s.path("slice_timestamps"), "expected [begin, end) with begin < end");
      }
      d.slice_timestamps = std::pair{slice[0], slice[1]};
    }
  }
  s.read_list("inputs", d.inputs);
  if (d.inputs.empty()) fail(s.path("inputs"), "needs at least one component");
  s.read("target", d.target);
  s.read("ignore", d.ignore);
  s.read("samples", d.samples);
  s.read("randomise", d.randomise);
  s.read("input_scale", d.input_scale);
  if (!(d.input_scale > 0.0) || !std::isfinite(d.input_scale)) {
    fail(s.path("input_scale"), "must be a positive finite number");
  }
  std::optional<std::size_t> random_seed;
  s.read("random_seed", random_seed);
  if (random_seed) {
    if (seed && *seed != *random_seed) {
      fail(s.path("random_seed"), "disagrees with the top-level seed");
    }
    seed = *random_seed;
  }
  s.finish();
}

void parse_ingest(Section s, IngestSettings& in) {
  s.read("tile_size", in.tile_size);
  if (in.tile_size == 0) fail(s.path("tile_size"), "must be >= 1");
  const YAML::Node scenes = s.child("scenes");
  if (scenes && !scenes.IsNull()) {
    if (!scenes.IsSequence()) fail(s.path("scenes"), "expected a list");
    in.scenes.clear();
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const std::string p = s.path("scenes") + "[" + std::to_string(i) + "]";
      Section scene(scenes[i], p);
      SceneSettings out;
      const YAML::Node imagery = scene.child("imagery");
      if (!imagery || !imagery.IsMap() || imagery.size() == 0) {
        fail(p + ".imagery", "expected a mapping of component to raster path");
      }
      for (const auto& kv : imagery) {
        const std::string key = kv.first.Scalar();
        out.imagery[key] = as<std::filesystem::path>(kv.second, p + ".imagery." + key);
      }
      scene.read("scl", out.scl);
      scene.finish();
      in.scenes.push_back(std::move(out));
    }
  }
  const YAML::Node polygons = s.child("polygons");
  if (polygons && !polygons.IsNull()) {
    if (!polygons.IsSequence()) fail(s.path("polygons"), "expected a list");
    in.polygons.clear();
    for (std::size_t i = 0; i < polygons.size(); ++i) {
      Section poly(polygons[i], s.path("polygons") + "[" + std::to_string(i) + "]");
      LabelPolygon lp;
      poly.require("code");
      poly.require("wkt");
      poly.read("code", lp.code);
      poly.read("wkt", lp.wkt);
      poly.finish();
      in.polygons.push_back(std::move(lp));
    }
  }
  s.read("labels_file", in.labels_file);
  const YAML::Node cmap = s.child("class_map");
  if (cmap && !cmap.IsNull()) {
    if (!cmap.IsMap()) fail(s.path("class_map"), "expected a mapping");
    in.class_map.clear();
    for (const auto& kv : cmap) {
      const std::string p = s.path("class_map") + "." + kv.first.Scalar();
      const auto from = as<std::int64_t>(kv.first, p);
      const auto to = as<std::int64_t>(kv.second, p);
      if (to < 0 || to > 254) fail(p, "class ids must lie in [0, 254]");
      in.class_map[from] = to;
    }
  }
  s.read_list("cloud_codes", in.cloud_codes);
  s.finish();
}

void parse_trainer(Section s, TrainerSettings& t, std::size_t folds) {
  {
    Section topo(s.child("topology"), s.path("topology"));
    TopologySettings& k = t.topology;
    topo.read("kind", k.kind);
    guard(topo.path("kind"), [&] { models::parse_topology_kind(k.kind); });
    topo.read("depth", k.depth);
    topo.read("base_channels", k.base_channels);
    topo.read("activation", k.activation);
    guard(topo.path("activation"), [&] { nn::parse_activation_kind(k.activation); });
    topo.read("activation_alpha", k.activation_alpha);
    topo.read("padded", k.padded);
    topo.read("dropout", k.dropout);
    if (!(k.dropout >= 0.0 && k.dropout < 1.0)) fail(topo.path("dropout"), "must lie in [0, 1)");
    if (k.depth == 0) fail(topo.path("depth"), "must be >= 1");
    if (k.base_channels == 0) fail(topo.path("base_channels"), "must be >= 1");
    topo.finish();
  }
  s.read("num_classes", t.num_classes);
  if (t.num_classes && (*t.num_classes < 2 || *t.num_classes > 255)) {
    fail(s.path("num_classes"), "must lie in [2, 255]");
  }
  {
    Section opt(s.child("optimizer"), s.path("optimizer"));
    OptimizerSettings& o = t.optimizer;
    opt.read("kind", o.kind);
    opt.read("lr", o.lr);
    opt.read("beta_1", o.beta_1);
    opt.read("beta_2", o.beta_2);
    opt.read("epsilon", o.epsilon);
    guard(opt.path(""), [&] {
      train::OptimizerState st;
      st.kind = train::parse_optimizer_kind(o.kind);
      st.learning_rate = o.lr;
      st.beta1 = o.beta_1;
      st.beta2 = o.beta_2;
      st.epsilon = o.epsilon;
      train::validate(st);
    });
    opt.finish();
  }
  s.read("loss", t.loss);
  if (t.loss != "categorical_crossentropy") {
    fail(s.path("loss"), "only categorical_crossentropy is supported");
  }
  s.read_list("metrics", t.metrics);
  for (const auto& m : t.metrics) {
    static const std::set<std::string> known{"accuracy", "precision", "recall",
                                             "MIoU",     "F1",        "Dice"};
    if (!known.count(m)) fail(s.path("metrics"), "unknown metric '" + m + "'");
  }
  s.read("averaging", t.averaging);
  if (t.averaging != "macro" && t.averaging != "micro") {
    fail(s.path("averaging"), "expected macro or micro");
  }
  s.read("batch_size", t.batch_size);
  if (t.batch_size == 0) fail(s.path("batch_size"), "must be >= 1");
  s.read("epochs", t.epochs);
  if (t.epochs == 0) fail(s.path("epochs"), "must be >= 1");
  {
    Section ck(s.child("checkpoint"), s.path("checkpoint"));
    ck.read("monitor", t.checkpoint_monitor);
    ck.finish();
  }
  {
    Section cb(s.child("callbacks"), s.path("callbacks"));
    if (cb.has("early_stopping")) {
      Section es(cb.child("early_stopping"), cb.path("early_stopping"));
      EarlyStoppingSettings e;
      es.read("monitor", e.monitor);
      es.read("min_delta", e.min_delta);
      es.read("patience", e.patience);
      es.finish();
      t.early_stopping = e;
    } else {
      cb.child("early_stopping");
    }
    if (cb.has("reduce_lr_on_plateau")) {
      Section rp(cb.child("reduce_lr_on_plateau"), cb.path("reduce_lr_on_plateau"));
      PlateauSettings p;
      rp.read("monitor", p.monitor);
      rp.read("patience", p.patience);
      rp.read("factor", p.factor);
      rp.read("min_delta", p.min_delta);
      rp.read("min_lr", p.min_lr);
      if (!(p.factor > 0.0 && p.factor < 1.0)) fail(rp.path("factor"), "must lie in (0, 1)");
      rp.finish();
      t.reduce_lr_on_plateau = p;
    } else {
      cb.child("reduce_lr_on_plateau");
    }
    cb.finish();
  }
  s.read("validation_fold", t.validation_fold);
  if (t.validation_fold && *t.validation_fold >= folds) {
    fail(s.path("validation_fold"), "must be below split.folds (" + std::to_string(folds) + ")");
  }
  s.finish();
}

void parse_window(Section s, Window& w) {
  for (const char* key : {"x", "y", "width", "height"}) s.require(key);
  s.read("x", w.x);
  s.read("y", w.y);
  s.read("width", w.width);
  s.read("height", w.height);
  if (w.width == 0 || w.height == 0) fail(s.path("width"), "region must be non-empty");
  s.finish();
}

void parse_query(Section s, QuerySettings& q) {
  s.read("base_url", q.base_url);
  s.read("begin", q.begin);
  s.read("end", q.end);
  s.read("platform", q.platform);
  s.read("filename", q.filename);
  s.read("product_type", q.product_type);
  s.read("instrument", q.instrument);
  s.read("footprint", q.footprint);
  s.read("offset", q.offset);
  s.read("limit", q.limit);
  s.read("sort_by", q.sort_by);
  s.read("order", q.order);
  s.finish();
}

PipelineConfig parse(const std::string& text, bool seed_required) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config: YAML syntax error at line " + std::to_string(e.mark.line + 1) +
                      ": " + e.msg);
  }
  PipelineConfig c;
  Section top(root, "");
  std::optional<std::uint64_t> seed;
  {
    std::optional<std::size_t> s;
    top.read("seed", s);
    if (s) seed = *s;
  }
  {
    Section conf(top.child("configuration"), "configuration");
    conf.read("name", c.name);
    conf.read("workspace", c.workspace);
    conf.finish();
  }
  {
    Section split(top.child("split"), "split");
    split.read("folds", c.folds);
    if (c.folds < 2) fail("split.folds", "must be >= 2");
    split.finish();
  }
  parse_data_source(Section(top.child("data_source"), "data_source"), c.data_source, seed);
  parse_ingest(Section(top.child("ingest"), "ingest"), c.ingest);
  parse_trainer(Section(top.child("trainer"), "trainer"), c.trainer, c.folds);
  {
    Section ev(top.child("evaluate"), "evaluate");
    ev.read("fold", c.evaluate.fold);
    if (c.evaluate.fold && *c.evaluate.fold >= c.folds) fail("evaluate.fold", "must be below split.folds");
    ev.read("checkpoint", c.evaluate.checkpoint);
    ev.finish();
  }
  {
    Section pr(top.child("predict"), "predict");
    pr.read("timestamp", c.predict.timestamp);
    if (pr.has("region")) {
      Window w;
      parse_window(Section(pr.child("region"), "predict.region"), w);
      c.predict.region = w;
    } else {
      pr.child("region");
    }
    pr.read("checkpoint", c.predict.checkpoint);
    pr.finish();
  }
  parse_query(Section(top.child("query"), "query"), c.query);
  top.finish();
  if (seed) {
    c.seed = *seed;
  } else if (seed_required) {
    fail("seed", "is required so that runs are reproducible");
  }
  return c;
}

void emit_path(YAML::Emitter& e, const char* key, const std::filesystem::path& p) {
  e << YAML::Key << key << YAML::Value << YAML::DoubleQuoted << p.string();
}

void emit_string(YAML::Emitter& e, const char* key, const std::string& s) {
  e << YAML::Key << key << YAML::Value << YAML::DoubleQuoted << s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

}  // namespace

PipelineConfig parse_config(const std::string& text) { return parse(text, true); }

std::string serialize_config(const PipelineConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "configuration" << YAML::Value << YAML::BeginMap;
  emit_string(e, "name", c.name);
  emit_path(e, "workspace", c.workspace);
  e << YAML::EndMap;

  const DataSourceSettings& d = c.data_source;
  e << YAML::Key << "data_source" << YAML::Value << YAML::BeginMap;
  emit_path(e, "source", d.source);
  emit_string(e, "group", d.group);
  if (d.slice_timestamps) {
    e << YAML::Key << "slice_timestamps" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << d.slice_timestamps->first << d.slice_timestamps->second << YAML::EndSeq;
  }
  e << YAML::Key << "inputs" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : d.inputs) e << YAML::DoubleQuoted << s;
  e << YAML::EndSeq;
  emit_string(e, "target", d.target);
  emit_string(e, "ignore", d.ignore);
  emit_string(e, "samples", d.samples);
  e << YAML::Key << "randomise" << YAML::Value << d.randomise;
  e << YAML::Key << "input_scale" << YAML::Value << d.input_scale;
  e << YAML::EndMap;

  const IngestSettings& in = c.ingest;
  e << YAML::Key << "ingest" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "tile_size" << YAML::Value << in.tile_size;
  e << YAML::Key << "scenes" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : in.scenes) {
    e << YAML::BeginMap << YAML::Key << "imagery" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : s.imagery) emit_path(e, k.c_str(), v);
    e << YAML::EndMap;
    if (!s.scl.empty()) emit_path(e, "scl", s.scl);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "polygons" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : in.polygons) {
    e << YAML::BeginMap << YAML::Key << "code" << YAML::Value << p.code;
    emit_string(e, "wkt", p.wkt);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  if (!in.labels_file.empty()) emit_path(e, "labels_file", in.labels_file);
  e << YAML::Key << "class_map" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : in.class_map) e << YAML::Key << k << YAML::Value << v;
  e << YAML::EndMap;
  e << YAML::Key << "cloud_codes" << YAML::Value << YAML::Flow << in.cloud_codes;
  e << YAML::EndMap;

  e << YAML::Key << "split" << YAML::Value << YAML::BeginMap << YAML::Key << "folds"
    << YAML::Value << c.folds << YAML::EndMap;

  const TrainerSettings& t = c.trainer;
  e << YAML::Key << "trainer" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  emit_string(e, "kind", t.topology.kind);
  e << YAML::Key << "depth" << YAML::Value << t.topology.depth;
  e << YAML::Key << "base_channels" << YAML::Value << t.topology.base_channels;
  emit_string(e, "activation", t.topology.activation);
  if (t.topology.activation_alpha) {
    e << YAML::Key << "activation_alpha" << YAML::Value << *t.topology.activation_alpha;
  }
  e << YAML::Key << "padded" << YAML::Value << t.topology.padded;
  e << YAML::Key << "dropout" << YAML::Value << t.topology.dropout;
  e << YAML::EndMap;
  if (t.num_classes) e << YAML::Key << "num_classes" << YAML::Value << *t.num_classes;
  e << YAML::Key << "optimizer" << YAML::Value << YAML::BeginMap;
  emit_string(e, "kind", t.optimizer.kind);
  e << YAML::Key << "lr" << YAML::Value << t.optimizer.lr;
  e << YAML::Key << "beta_1" << YAML::Value << t.optimizer.beta_1;
  e << YAML::Key << "beta_2" << YAML::Value << t.optimizer.beta_2;
  e << YAML::Key << "epsilon" << YAML::Value << t.optimizer.epsilon;
  e << YAML::EndMap;
  emit_string(e, "loss", t.loss);
  e << YAML::Key << "metrics" << YAML::Value << YAML::Flow << t.metrics;
  emit_string(e, "averaging", t.averaging);
  e << YAML::Key << "batch_size" << YAML::Value << t.batch_size;
  e << YAML::Key << "epochs" << YAML::Value << t.epochs;
  e << YAML::Key << "checkpoint" << YAML::Value << YAML::BeginMap;
  emit_string(e, "monitor", t.checkpoint_monitor);
  e << YAML::EndMap;
  e << YAML::Key << "callbacks" << YAML::Value << YAML::BeginMap;
  if (t.early_stopping) {
    e << YAML::Key << "early_stopping" << YAML::Value << YAML::BeginMap;
    emit_string(e, "monitor", t.early_stopping->monitor);
    e << YAML::Key << "min_delta" << YAML::Value << t.early_stopping->min_delta;
    e << YAML::Key << "patience" << YAML::Value << t.early_stopping->patience;
    e << YAML::EndMap;
  }
  if (t.reduce_lr_on_plateau) {
    const PlateauSettings& p = *t.reduce_lr_on_plateau;
    e << YAML::Key << "reduce_lr_on_plateau" << YAML::Value << YAML::BeginMap;
    emit_string(e, "monitor", p.monitor);
    e << YAML::Key << "patience" << YAML::Value << p.patience;
    e << YAML::Key << "factor" << YAML::Value << p.factor;
    e << YAML::Key << "min_delta" << YAML::Value << p.min_delta;
    e << YAML::Key << "min_lr" << YAML::Value << p.min_lr;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  if (t.validation_fold) e << YAML::Key << "validation_fold" << YAML::Value << *t.validation_fold;
  e << YAML::EndMap;

  e << YAML::Key << "evaluate" << YAML::Value << YAML::BeginMap;
  if (c.evaluate.fold) e << YAML::Key << "fold" << YAML::Value << *c.evaluate.fold;
  if (!c.evaluate.checkpoint.empty()) emit_path(e, "checkpoint", c.evaluate.checkpoint);
  e << YAML::EndMap;

  e << YAML::Key << "predict" << YAML::Value << YAML::BeginMap;
  if (c.predict.timestamp) e << YAML::Key << "timestamp" << YAML::Value << *c.predict.timestamp;
  if (c.predict.region) {
    const Window& w = *c.predict.region;
    e << YAML::Key << "region" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key
      << "x" << YAML::Value << w.x << YAML::Key << "y" << YAML::Value << w.y << YAML::Key
      << "width" << YAML::Value << w.width << YAML::Key << "height" << YAML::Value << w.height
      << YAML::EndMap;
  }
  if (!c.predict.checkpoint.empty()) emit_path(e, "checkpoint", c.predict.checkpoint);
  e << YAML::EndMap;

  const QuerySettings& q = c.query;
  e << YAML::Key << "query" << YAML::Value << YAML::BeginMap;
  emit_string(e, "base_url", q.base_url);
  emit_string(e, "begin", q.begin);
  emit_string(e, "end", q.end);
  emit_string(e, "platform", q.platform);
  emit_string(e, "filename", q.filename);
  emit_string(e, "product_type", q.product_type);
  emit_string(e, "instrument", q.instrument);
  emit_string(e, "footprint", q.footprint);
  e << YAML::Key << "offset" << YAML::Value << q.offset;
  e << YAML::Key << "limit" << YAML::Value << q.limit;
  emit_string(e, "sort_by", q.sort_by);
  emit_string(e, "order", q.order);
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

PipelineConfig load_config(const std::filesystem::path& file,
                           std::optional<std::uint64_t> seed_override,
                           std::optional<std::filesystem::path> out_override) {
  std::string text;
  try {
    text = internal::read_file(file);
  } catch (const NotFoundError&) {
    throw ConfigError("cannot read config file " + file.string());
  }
  PipelineConfig c = parse(text, !seed_override.has_value());
  if (seed_override) c.seed = *seed_override;
  const std::filesystem::path base = file.parent_path();
  c.workspace = out_override ? *out_override : resolve(base, c.workspace);
  c.data_source.source = resolve(base, c.data_source.source);
  for (auto& s : c.ingest.scenes) {
    for (auto& [k, v] : s.imagery) v = resolve(base, v);
    s.scl = resolve(base, s.scl);
  }
  c.ingest.labels_file = resolve(base, c.ingest.labels_file);
  c.evaluate.checkpoint = resolve(base, c.evaluate.checkpoint);
  c.predict.checkpoint = resolve(base, c.predict.checkpoint);
  return c;
}

}  // namespace terraseg::pipeline

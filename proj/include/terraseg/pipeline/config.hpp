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

#ifndef TERRASEG_PIPELINE_CONFIG_HPP_
#define TERRASEG_PIPELINE_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace terraseg::pipeline {

struct DataSourceSettings {
  std::filesystem::path source = "store";  // store root
  std::string group = "Romania/2018";
  /// Half-open [begin, end) range over the time axis.
  std::optional<std::pair<std::size_t, std::size_t>> slice_timestamps;
  /// Input components concatenated channel-wise, paths below `group`.
  std::vector<std::string> inputs{"Sentinel-2/10m"};
  std::string target = "labels/clc/clc_10m";
  std::string ignore = "labels/clc/ignore";
  /// Group holding the presence ("classes") and fold arrays.
  std::string samples = "labels/clc/samples/clc_10m";
  bool randomise = true;
  double input_scale = 1.0;
  friend bool operator==(const DataSourceSettings&, const DataSourceSettings&) = default;
};

struct SceneSettings {
  std::map<std::string, std::filesystem::path> imagery;  // component -> raster
  std::filesystem::path scl;                             // optional
  friend bool operator==(const SceneSettings&, const SceneSettings&) = default;
};

struct LabelPolygon {
  std::int64_t code = 0;
  std::string wkt;
  friend bool operator==(const LabelPolygon&, const LabelPolygon&) = default;
};

struct IngestSettings {
  std::size_t tile_size = 256;
  std::vector<SceneSettings> scenes;  // one per time step
  std::vector<LabelPolygon> polygons;
  /// Optional text file of "<code> <WKT>" lines, burned after `polygons`.
  std::filesystem::path labels_file;
  /// Source class code -> training class id. Empty keeps codes as they are.
  std::map<std::int64_t, std::int64_t> class_map;
  std::vector<std::int64_t> cloud_codes{3, 8, 9};
  friend bool operator==(const IngestSettings&, const IngestSettings&) = default;
};

struct TopologySettings {
  std::string kind = "unet";
  std::size_t depth = 2;
  std::size_t base_channels = 8;
  std::string activation = "relu";
  std::optional<double> activation_alpha;
  bool padded = true;
  double dropout = 0.0;
  friend bool operator==(const TopologySettings&, const TopologySettings&) = default;
};

struct OptimizerSettings {
  std::string kind = "adam";
  double lr = 0.001;
  double beta_1 = 0.9;
  double beta_2 = 0.999;
  double epsilon = 1e-7;
  friend bool operator==(const OptimizerSettings&, const OptimizerSettings&) = default;
};

struct EarlyStoppingSettings {
  std::string monitor = "val_loss";
  double min_delta = 0.001;
  std::size_t patience = 20;
  friend bool operator==(const EarlyStoppingSettings&, const EarlyStoppingSettings&) = default;
};

struct PlateauSettings {
  std::string monitor = "val_loss";
  std::size_t patience = 5;
  double factor = 0.2;
  double min_delta = 1e-4;
  double min_lr = 0.0;
  friend bool operator==(const PlateauSettings&, const PlateauSettings&) = default;
};

struct TrainerSettings {
  TopologySettings topology;
  std::optional<std::size_t> num_classes;  // required by train/evaluate/predict
  OptimizerSettings optimizer;
  std::string loss = "categorical_crossentropy";
  std::vector<std::string> metrics{"MIoU"};
  std::string averaging = "macro";
  std::size_t batch_size = 1;
  std::size_t epochs = 100;
  std::string checkpoint_monitor = "val_loss";
  std::optional<EarlyStoppingSettings> early_stopping;
  std::optional<PlateauSettings> reduce_lr_on_plateau;
  /// Held-out fold; unset trains on every sample without validation.
  std::optional<std::size_t> validation_fold;
  friend bool operator==(const TrainerSettings&, const TrainerSettings&) = default;
};

struct Window {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  friend bool operator==(const Window&, const Window&) = default;
};

struct EvaluateSettings {
  std::optional<std::size_t> fold;  // defaults to the validation fold
  std::filesystem::path checkpoint;  // defaults to <workspace>/checkpoint.tseg
  friend bool operator==(const EvaluateSettings&, const EvaluateSettings&) = default;
};

struct PredictSettings {
  std::optional<std::size_t> timestamp;  // defaults to the slice start
  std::optional<Window> region;          // pixels of the ingested scene
  std::filesystem::path checkpoint;
  friend bool operator==(const PredictSettings&, const PredictSettings&) = default;
};

struct QuerySettings {
  std::string base_url = "https://scihub.copernicus.eu/dhus/api/stub/products";
  std::string begin;  // YYYY-MM-DD
  std::string end;
  std::string platform;
  std::string filename;
  std::string product_type;
  std::string instrument;
  std::string footprint;  // WKT
  std::size_t offset = 0;
  std::size_t limit = 25;
  std::string sort_by;
  std::string order;
  friend bool operator==(const QuerySettings&, const QuerySettings&) = default;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::string name = "terraseg";
  std::filesystem::path workspace = "out";
  DataSourceSettings data_source;
  IngestSettings ingest;
  std::size_t folds = 5;
  TrainerSettings trainer;
  EvaluateSettings evaluate;
  PredictSettings predict;
  QuerySettings query;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Parses the YAML document. Unknown keys, type mismatches and a missing
/// seed raise ConfigError naming the key path. Paths are kept as written.
PipelineConfig parse_config(const std::string& text);

/// YAML text that parses back to an equal config.
std::string serialize_config(const PipelineConfig& config);

/// Reads a config file, applies the overrides and resolves relative paths
/// against the file's directory (the workspace override against the current
/// directory).
PipelineConfig load_config(const std::filesystem::path& file,
                           std::optional<std::uint64_t> seed_override = std::nullopt,
                           std::optional<std::filesystem::path> out_override = std::nullopt);

}  // namespace terraseg::pipeline

#endif  // TERRASEG_PIPELINE_CONFIG_HPP_

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

#ifndef TERRASEG_PIPELINE_COMMANDS_HPP_
#define TERRASEG_PIPELINE_COMMANDS_HPP_

#include <functional>
#include <string>

#include <json.hpp>

#include "terraseg/error.hpp"
#include "terraseg/geo/raster.hpp"
#include "terraseg/metrics/confusion.hpp"
#include "terraseg/pipeline/config.hpp"
#include "terraseg/train/trainer.hpp"

namespace terraseg::pipeline {

/// Process exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

int exit_code_for(ErrorCategory category) noexcept;

using LogFn = std::function<void(const std::string&)>;

// Store layout below data_source.group, with the default component names:
//   Sentinel-2/10m            [T, tiles_y, tiles_x, ts, ts, channels]
//   labels/clc/clc_10m        [tiles_y, tiles_x, ts, ts]   u8, 255 = no label
//   labels/clc/ignore         [T, tiles_y, tiles_x, ts, ts] u8, 1 = ignored
//                             (cloud, imagery nodata, no label or padding)
//   labels/clc/samples/clc_10m/classes                       [tiles, classes] u8
//   labels/clc/samples/clc_10m/multilabel_stratified_kfolds  [tiles] u8

/// Rasterizes the label polygons onto the first input component's grid,
/// tiles imagery, labels and ignore masks and writes them to the store.
/// Coarser components are nearest-neighbor upsampled to that grid. Existing
/// arrays with the same layout are overwritten in place.
nlohmann::json cmd_ingest(const PipelineConfig& config, const LogFn& log = {});

/// Stratified K-fold assignment of the label tiles, persisted with its
/// manifest. Returns the manifest.
nlohmann::json cmd_split(const PipelineConfig& config, const LogFn& log = {});

/// Trains on every fold except the validation fold. Writes checkpoint.tseg,
/// history.tsv and history.json to the workspace.
train::History cmd_train(const PipelineConfig& config, const LogFn& log = {});

/// Scores the checkpoint on the evaluation fold; writes report.json and
/// report.txt. Throws ConfigError when the label ids exceed the model's
/// class count.
metrics::MetricReport cmd_evaluate(const PipelineConfig& config, const LogFn& log = {});

/// Argmax class mask over the configured region, 255 where ignored. Writes
/// prediction.pgm and its sidecar.
geo::GeoRaster cmd_predict(const PipelineConfig& config, const LogFn& log = {});

/// Catalog query URL; also written to query.txt.
std::string cmd_query(const PipelineConfig& config, const LogFn& log = {});

/// Tab-separated table, one row per epoch.
std::string history_to_text(const train::History& history);
nlohmann::json history_to_json(const train::History& history);

}  // namespace terraseg::pipeline

#endif  // TERRASEG_PIPELINE_COMMANDS_HPP_

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

#ifndef TERRASEG_TRAIN_TRAINER_HPP_
#define TERRASEG_TRAIN_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "terraseg/metrics/confusion.hpp"
#include "terraseg/tensor.hpp"
#include "terraseg/train/graph.hpp"
#include "terraseg/train/optimizer.hpp"

namespace terraseg::train {

/// One training example. `labels` holds class ids as [H, W]; `ignore` is
/// [H, W] with nonzero marking pixels excluded from loss and metrics, or
/// empty. Labels under ignored pixels are not read.
struct Sample {
  Tensor input;  // [C, H, W]
  Tensor labels;
  Tensor ignore;
};

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual Sample get(std::size_t index) const = 0;
};

class VectorSource : public SampleSource {
 public:
  VectorSource() = default;
  explicit VectorSource(std::vector<Sample> samples)
      : samples_(std::move(samples)) {}
  std::size_t size() const override { return samples_.size(); }
  Sample get(std::size_t index) const override { return samples_.at(index); }
  void push(Sample s) { samples_.push_back(std::move(s)); }

 private:
  std::vector<Sample> samples_;
};

struct EarlyStopConfig {
  std::string monitor = "val_loss";
  double min_delta = 0.001;
  std::size_t patience = 20;
};

struct PlateauConfig {
  std::string monitor = "val_loss";
  std::size_t patience = 5;
  double factor = 0.2;
  double min_delta = 1e-4;
  double min_lr = 0.0;
};

struct CheckpointConfig {
  std::string monitor = "val_loss";
  std::filesystem::path path;
};

/// Stops once `patience` consecutive epochs fail to improve the monitor by
/// more than min_delta.
class EarlyStopping {
 public:
  explicit EarlyStopping(EarlyStopConfig config);
  /// Returns true when training should stop.
  bool on_epoch_end(double value);
  std::optional<double> best() const noexcept { return best_; }
  std::size_t wait() const noexcept { return wait_; }

 private:
  EarlyStopConfig config_;
  std::optional<double> best_;
  std::size_t wait_ = 0;
};

/// After `patience` non-improving epochs the rate becomes
/// initial * factor^k (k = reductions so far), floored at min_lr.
class ReduceLROnPlateau {
 public:
  ReduceLROnPlateau(PlateauConfig config, double initial_lr);
  /// Returns the learning rate to use from the next epoch on.
  double on_epoch_end(double value);
  std::size_t reductions() const noexcept { return reductions_; }
  double learning_rate() const noexcept { return lr_; }

 private:
  PlateauConfig config_;
  double initial_;
  double lr_;
  std::optional<double> best_;
  std::size_t wait_ = 0;
  std::size_t reductions_ = 0;
};

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 1;
  std::uint64_t seed = 42;
  bool shuffle = true;
  std::string loss = "categorical_crossentropy";
  /// Names from the metric report: accuracy, precision, recall, MIoU, F1,
  /// Dice. Recorded with a "val_" prefix when validation data is given.
  std::vector<std::string> metrics;
  metrics::Averaging averaging = metrics::Averaging::kMacro;
  std::optional<EarlyStopConfig> early_stop;
  std::optional<PlateauConfig> plateau;
  std::optional<CheckpointConfig> checkpoint;
};

/// Throws ConfigError on out-of-range settings.
void validate(const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double learning_rate = 0.0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
  /// "loss", "val_loss" and the configured metrics, by monitor name.
  std::map<std::string, double> values;
  bool checkpoint_written = false;
};

struct History {
  std::vector<EpochRecord> epochs;
  bool stopped_early = false;
  std::size_t lr_reductions = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// One-hot [K, H, W] target from a label map; ignored pixels are all-zero.
/// Throws DataError on an unignored label outside [0, K).
Tensor one_hot(const Tensor& labels, const Tensor& ignore, std::size_t classes);

struct Evaluation {
  double loss = 0.0;
  std::size_t valid_pixels = 0;
  metrics::ConfusionMatrix confusion;
};

/// Inference-mode loss and confusion over a source.
Evaluation evaluate(NetworkGraph& graph, const SampleSource& source,
                    std::size_t batch_size = 1);

/// Mini-batch training with softmax cross-entropy. The graph must end in a
/// softmax node. Callbacks run at each epoch end in the order plateau,
/// early stop, checkpoint.
History fit(NetworkGraph& graph, const SampleSource& train,
            const SampleSource* validation, OptimizerState& optimizer,
            const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace terraseg::train

#endif  // TERRASEG_TRAIN_TRAINER_HPP_

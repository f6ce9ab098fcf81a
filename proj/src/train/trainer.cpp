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

#include "terraseg/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "terraseg/error.hpp"
#include "terraseg/nn/loss.hpp"
#include "terraseg/rng.hpp"
#include "terraseg/train/checkpoint.hpp"
#include "terraseg/train/engine.hpp"

namespace terraseg::train {

void validate(const TrainConfig& c) {
  if (c.epochs == 0) throw ConfigError("epochs must be >= 1");
  if (c.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (c.loss != "categorical_crossentropy") {
    throw ConfigError("unsupported loss '" + c.loss + "'");
  }
  static const char* kKnown[] = {"accuracy", "precision", "recall",
                                 "MIoU",     "F1",        "Dice"};
  for (const auto& m : c.metrics) {
    if (std::find(std::begin(kKnown), std::end(kKnown), m) == std::end(kKnown)) {
      throw ConfigError("unknown metric '" + m + "'");
    }
  }
  if (c.early_stop) {
    if (c.early_stop->patience < 1) throw ConfigError("early stop patience must be >= 1");
    if (!(c.early_stop->min_delta >= 0.0)) throw ConfigError("early stop min_delta must be >= 0");
  }
  if (c.plateau) {
    if (c.plateau->patience < 1) throw ConfigError("plateau patience must be >= 1");
    if (!(c.plateau->factor > 0.0 && c.plateau->factor < 1.0)) {
      throw ConfigError("plateau factor must lie in (0, 1)");
    }
    if (!(c.plateau->min_delta >= 0.0)) throw ConfigError("plateau min_delta must be >= 0");
    if (!(c.plateau->min_lr >= 0.0)) throw ConfigError("plateau min_lr must be >= 0");
  }
  if (c.checkpoint && c.checkpoint->path.empty()) {
    throw ConfigError("checkpoint path is empty");
  }
}

Tensor one_hot(const Tensor& labels, const Tensor& ignore, std::size_t classes) {
  if (labels.rank() != 2) {
    throw ShapeError("labels must be [H, W], got " + shape_to_string(labels.shape()));
  }
  if (!ignore.empty() && ignore.size() != labels.size()) {
    throw ShapeError("ignore mask " + shape_to_string(ignore.shape()) +
                     " does not match labels " + shape_to_string(labels.shape()));
  }
  const std::size_t h = labels.extent(0), w = labels.extent(1), plane = h * w;
  Tensor t({classes, h, w}, 0.0);
  for (std::size_t j = 0; j < plane; ++j) {
    if (!ignore.empty() && ignore[j] != 0.0) continue;
    const double v = labels[j];
    if (!(v >= 0.0) || v >= static_cast<double>(classes) || v != std::floor(v)) {
      throw DataError("label " + std::to_string(v) + " at pixel " +
                      std::to_string(j) + " is not a class id below " +
                      std::to_string(classes));
    }
    t[static_cast<std::size_t>(v) * plane + j] = 1.0;
  }
  return t;
}

namespace {

struct Batch {
  Tensor input;
  Tensor target;
  Tensor ignore;  // [B, H, W]
  Tensor labels;  // [B, H, W]
  std::size_t valid = 0;
};

Batch make_batch(const SampleSource& src, const std::vector<std::size_t>& order,
                 std::size_t begin, std::size_t end, std::size_t classes) {
  std::vector<Tensor> inputs, targets, ignores, labels;
  Batch b;
  for (std::size_t i = begin; i < end; ++i) {
    Sample s = src.get(order[i]);
    if (s.input.rank() != 3) {
      throw DataError("sample input must be [C, H, W], got " +
                      shape_to_string(s.input.shape()));
    }
    Tensor ign = s.ignore.empty() ? Tensor(s.labels.shape(), 0.0)
                                  : s.ignore.reshape(s.labels.shape());
    targets.push_back(one_hot(s.labels, ign, classes));
    for (double v : ign.values()) b.valid += v == 0.0;
    inputs.push_back(std::move(s.input));
    ignores.push_back(std::move(ign));
    labels.push_back(std::move(s.labels));
  }
  b.input = stack(inputs);
  b.target = stack(targets);
  b.ignore = stack(ignores);
  b.labels = stack(labels);
  return b;
}

NodeId softmax_input(const NetworkGraph& g) {
  const Node& out = g.node(g.output_node());
  if (out.kind != NodeKind::kSoftmax) {
    throw GraphError("training needs a graph that ends in softmax, not '" +
                     out.name + "'");
  }
  return out.inputs[0];
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

double lookup(const EpochRecord& r, const std::string& monitor) {
  auto it = r.values.find(monitor);
  if (it != r.values.end()) return it->second;
  // Without validation data, "val_x" falls back to the training "x".
  if (monitor.rfind("val_", 0) == 0) {
    it = r.values.find(monitor.substr(4));
    if (it != r.values.end()) return it->second;
  }
  throw ConfigError("monitor '" + monitor + "' is not recorded");
}

struct Tracker {
  std::optional<double> best;
  std::size_t wait = 0;

  // Returns true on improvement.
  bool update(double v, MonitorMode mode, double min_delta) {
    if (!best || improves(v, *best, mode, min_delta)) {
      best = v;
      wait = 0;
      return true;
    }
    ++wait;
    return false;
  }
};

}  // namespace

EarlyStopping::EarlyStopping(EarlyStopConfig config) : config_(std::move(config)) {}

bool EarlyStopping::on_epoch_end(double value) {
  const MonitorMode mode = monitor_mode_for(config_.monitor);
  if (!best_ || improves(value, *best_, mode, config_.min_delta)) {
    best_ = value;
    wait_ = 0;
    return false;
  }
  return ++wait_ >= config_.patience;
}

ReduceLROnPlateau::ReduceLROnPlateau(PlateauConfig config, double initial_lr)
    : config_(std::move(config)), initial_(initial_lr), lr_(initial_lr) {}

double ReduceLROnPlateau::on_epoch_end(double value) {
  const MonitorMode mode = monitor_mode_for(config_.monitor);
  if (!best_ || improves(value, *best_, mode, config_.min_delta)) {
    best_ = value;
    wait_ = 0;
    return lr_;
  }
  if (++wait_ >= config_.patience) {
    ++reductions_;
    wait_ = 0;
    lr_ = std::max(initial_ * std::pow(config_.factor,
                                       static_cast<double>(reductions_)),
                   config_.min_lr);
  }
  return lr_;
}

Evaluation evaluate(NetworkGraph& graph, const SampleSource& source,
                    std::size_t batch_size) {
  softmax_input(graph);
  const std::size_t classes = graph.output_shape()[0];
  Evaluation ev{0.0, 0, metrics::ConfusionMatrix(classes)};
  const auto order = identity_order(source.size());
  double total = 0.0;
  for (std::size_t b = 0; b < order.size(); b += batch_size) {
    Batch batch = make_batch(source, order, b, std::min(order.size(), b + batch_size),
                             classes);
    if (batch.valid == 0) continue;
    const Tensor probs = predict(graph, batch.input);
    const nn::LossResult r =
        nn::categorical_cross_entropy(probs, batch.target, batch.ignore);
    total += r.loss * static_cast<double>(r.valid_pixels);
    ev.valid_pixels += r.valid_pixels;
    const Tensor pred = nn::argmax_channels(probs);
    std::vector<int> p(pred.size()), t(pred.size());
    std::vector<std::uint8_t> ign(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
      p[i] = static_cast<int>(pred[i]);
      ign[i] = batch.ignore[i] != 0.0;
      t[i] = ign[i] ? 0 : static_cast<int>(batch.labels[i]);
    }
    metrics::confusion_update(ev.confusion, p, t, ign);
  }
  if (ev.valid_pixels > 0) ev.loss = total / static_cast<double>(ev.valid_pixels);
  return ev;
}

History fit(NetworkGraph& graph, const SampleSource& train,
            const SampleSource* validation, OptimizerState& optimizer,
            const TrainConfig& config, const EpochCallback& on_epoch) {
  validate(config);
  validate(optimizer);
  if (train.size() == 0) throw DataError("training source is empty");
  const NodeId logits = softmax_input(graph);
  const std::size_t classes = graph.output_shape()[0];
  const bool has_val = validation != nullptr && validation->size() > 0;

  History h;
  std::optional<ReduceLROnPlateau> plateau;
  if (config.plateau) plateau.emplace(*config.plateau, optimizer.learning_rate);
  std::optional<EarlyStopping> early;
  if (config.early_stop) early.emplace(*config.early_stop);
  Tracker ckpt;
  std::vector<Tensor*> params = graph.parameters();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order = identity_order(train.size());
    if (config.shuffle) {
      SeededRng rng(derive_seed(config.seed, epoch, 1));
      rng.shuffle(order);
    }
    double total = 0.0;
    std::size_t valid = 0;
    for (std::size_t b = 0, k = 0; b < order.size(); b += config.batch_size, ++k) {
      Batch batch = make_batch(train, order, b,
                               std::min(order.size(), b + config.batch_size), classes);
      if (batch.valid == 0) continue;
      ForwardCache cache =
          forward(graph, batch.input, true, derive_seed(config.seed, epoch, k + 2));
      const nn::LossResult r = nn::categorical_cross_entropy(
          cache.outputs[graph.output_node()], batch.target, batch.ignore);
      Gradients g = backward_from(graph, cache, logits, r.grad_logits);
      optimizer_step(optimizer, params, g.params);
      total += r.loss * static_cast<double>(r.valid_pixels);
      valid += r.valid_pixels;
    }
    if (valid == 0) throw DataError("every training pixel is ignored");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.learning_rate = optimizer.learning_rate;
    rec.train_loss = total / static_cast<double>(valid);
    rec.values["loss"] = rec.train_loss;
    if (has_val || !config.metrics.empty()) {
      const Evaluation ev = evaluate(graph, has_val ? *validation : train,
                                     config.batch_size);
      if (has_val) {
        rec.val_loss = ev.loss;
        rec.values["val_loss"] = ev.loss;
      }
      if (!config.metrics.empty() && ev.confusion.total() > 0) {
        const auto report = metrics::make_report(ev.confusion, config.averaging);
        for (const auto& m : config.metrics) {
          rec.values[(has_val ? "val_" : "") + m] = report.at(m);
        }
      }
    }

    bool stop = false;
    if (plateau) {
      optimizer.learning_rate =
          plateau->on_epoch_end(lookup(rec, config.plateau->monitor));
      h.lr_reductions = plateau->reductions();
    }
    if (early) stop = early->on_epoch_end(lookup(rec, config.early_stop->monitor));
    if (config.checkpoint) {
      const auto& c = *config.checkpoint;
      const double v = lookup(rec, c.monitor);
      const MonitorMode mode = monitor_mode_for(c.monitor);
      if (ckpt.update(v, mode, 0.0)) {
        checkpoint_write(graph, c.path, {v, mode});
        rec.checkpoint_written = true;
      }
    }
    h.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stop) {
      h.stopped_early = true;
      break;
    }
  }
  return h;
}

}  // namespace terraseg::train

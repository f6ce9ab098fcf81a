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

#include "terraseg/metrics/confusion.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "terraseg/error.hpp"

namespace terraseg::metrics {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), cells_(classes * classes, 0) {
  if (classes == 0) throw ParameterError("confusion matrix needs >= 1 class");
}

std::uint64_t ConfusionMatrix::at(std::size_t truth,
                                  std::size_t predicted) const {
  return cells_.at(truth * classes_ + predicted);
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted,
                          std::uint64_t count) {
  if (truth >= classes_ || predicted >= classes_) {
    throw DataError("class id out of range for a " + std::to_string(classes_) +
                    "-class confusion matrix");
  }
  cells_[truth * classes_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t s = 0;
  for (auto v : cells_) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes_; ++i) s += cells_[i * classes_ + i];
  return s;
}

std::uint64_t ConfusionMatrix::true_positives(std::size_t c) const {
  return at(c, c);
}

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < classes_; ++i) {
    if (i != c) s += at(i, c);
  }
  return s;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < classes_; ++j) {
    if (j != c) s += at(c, j);
  }
  return s;
}

std::uint64_t ConfusionMatrix::true_negatives(std::size_t c) const {
  return total() - true_positives(c) - false_positives(c) - false_negatives(c);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) {
    throw DataError("cannot merge confusion matrices of different class counts");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  return *this;
}

void confusion_update(ConfusionMatrix& cm, std::span<const int> predicted,
                      std::span<const int> truth,
                      std::span<const std::uint8_t> ignore) {
  if (predicted.size() != truth.size() ||
      (!ignore.empty() && ignore.size() != truth.size())) {
    throw DataError("confusion_update: masks differ in size");
  }
  const int classes = static_cast<int>(cm.classes());
  // Validate before touching the matrix so a bad mask leaves it unchanged.
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!ignore.empty() && ignore[i]) continue;
    if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 ||
        predicted[i] >= classes) {
      throw DataError("confusion_update: class id out of range at pixel " +
                      std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!ignore.empty() && ignore[i]) continue;
    cm.add(static_cast<std::size_t>(truth[i]),
           static_cast<std::size_t>(predicted[i]));
  }
}

ConfusionMatrix binary_confusion(std::uint64_t tp, std::uint64_t fn,
                                 std::uint64_t fp, std::uint64_t tn) {
  ConfusionMatrix cm(2);
  cm.add(1, 1, tp);
  cm.add(1, 0, fn);
  cm.add(0, 1, fp);
  cm.add(0, 0, tn);
  return cm;
}

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

template <typename PerClass>
double macro(const ConfusionMatrix& cm, PerClass per_class, const char* what) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    if (auto v = per_class(cm, c)) {
      sum += *v;
      ++defined;
    }
  }
  if (defined == 0) {
    throw UndefinedMetricError(std::string(what) +
                               " is undefined for every class");
  }
  return sum / static_cast<double>(defined);
}

struct Pooled {
  std::uint64_t tp = 0, fp = 0, fn = 0;
};

Pooled pooled(const ConfusionMatrix& cm) {
  Pooled p;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    p.tp += cm.true_positives(c);
    p.fp += cm.false_positives(c);
    p.fn += cm.false_negatives(c);
  }
  return p;
}

double require(std::optional<double> v, const char* what) {
  if (!v) throw UndefinedMetricError(std::string(what) + " is undefined");
  return *v;
}

}  // namespace

double accuracy(const ConfusionMatrix& cm) {
  return require(ratio(cm.trace(), cm.total()), "accuracy of an empty matrix");
}

std::optional<double> precision(const ConfusionMatrix& cm, std::size_t c) {
  const auto tp = cm.true_positives(c);
  return ratio(tp, tp + cm.false_positives(c));
}

std::optional<double> recall(const ConfusionMatrix& cm, std::size_t c) {
  const auto tp = cm.true_positives(c);
  return ratio(tp, tp + cm.false_negatives(c));
}

std::optional<double> f1(const ConfusionMatrix& cm, std::size_t c) {
  const auto p = precision(cm, c);
  const auto r = recall(cm, c);
  if (!p || !r) {
    // One side undefined forces TP = 0: the score is 0 unless the class is
    // absent from both truth and prediction.
    if (cm.false_positives(c) + cm.false_negatives(c) == 0) return std::nullopt;
    return 0.0;
  }
  if (*p + *r == 0.0) return 0.0;
  return 2.0 * *p * *r / (*p + *r);
}

std::optional<double> dice(const ConfusionMatrix& cm, std::size_t c) {
  const auto tp = cm.true_positives(c);
  return ratio(2 * tp, 2 * tp + cm.false_positives(c) + cm.false_negatives(c));
}

std::optional<double> jaccard(const ConfusionMatrix& cm, std::size_t c) {
  const auto tp = cm.true_positives(c);
  return ratio(tp, tp + cm.false_positives(c) + cm.false_negatives(c));
}

double mean_precision(const ConfusionMatrix& cm, Averaging avg) {
  if (avg == Averaging::kMicro) {
    const Pooled p = pooled(cm);
    return require(ratio(p.tp, p.tp + p.fp), "micro precision");
  }
  return macro(cm, precision, "precision");
}

double mean_recall(const ConfusionMatrix& cm, Averaging avg) {
  if (avg == Averaging::kMicro) {
    const Pooled p = pooled(cm);
    return require(ratio(p.tp, p.tp + p.fn), "micro recall");
  }
  return macro(cm, recall, "recall");
}

double mean_f1(const ConfusionMatrix& cm, Averaging avg) {
  if (avg == Averaging::kMicro) {
    const double p = mean_precision(cm, avg);
    const double r = mean_recall(cm, avg);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  return macro(cm, f1, "F1");
}

double mean_dice(const ConfusionMatrix& cm, Averaging avg) {
  if (avg == Averaging::kMicro) {
    const Pooled p = pooled(cm);
    return require(ratio(2 * p.tp, 2 * p.tp + p.fp + p.fn), "micro Dice");
  }
  return macro(cm, dice, "Dice");
}

double mean_iou(const ConfusionMatrix& cm) {
  return macro(cm, jaccard, "IoU");
}

MetricReport make_report(const ConfusionMatrix& cm, Averaging avg) {
  if (cm.total() == 0) {
    throw UndefinedMetricError("no scored pixels; every metric is undefined");
  }
  return {{"accuracy", accuracy(cm)},       {"precision", mean_precision(cm, avg)},
          {"recall", mean_recall(cm, avg)}, {"MIoU", mean_iou(cm)},
          {"F1", mean_f1(cm, avg)},         {"Dice", mean_dice(cm, avg)}};
}

std::string report_to_text(const MetricReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "metric" << "value\n";
  for (const auto& [key, value] : report) {
    os << std::left << std::setw(12) << key << std::fixed
       << std::setprecision(6) << value << '\n';
  }
  return os.str();
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : report) j[key] = value;
  return j.dump(2) + "\n";
}

}  // namespace terraseg::metrics

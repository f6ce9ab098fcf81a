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

#ifndef TERRASEG_METRICS_CONFUSION_HPP_
#define TERRASEG_METRICS_CONFUSION_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace terraseg::metrics {

/// C x C pixel tally; cell (i, j) counts pixels of true class i predicted as
/// class j. Matrices over the same classes merge by cell-wise addition.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);

  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const;
  void add(std::size_t truth, std::size_t predicted, std::uint64_t count = 1);
  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;

  std::uint64_t true_positives(std::size_t c) const;
  std::uint64_t false_positives(std::size_t c) const;
  std::uint64_t false_negatives(std::size_t c) const;
  std::uint64_t true_negatives(std::size_t c) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> cells_;
};

/// Scores every pixel whose ignore flag is zero. `ignore` may be empty.
/// Throws DataError on a class id >= classes or on length mismatch.
void confusion_update(ConfusionMatrix& cm, std::span<const int> predicted,
                      std::span<const int> truth,
                      std::span<const std::uint8_t> ignore = {});

/// Binary matrix from explicit TP/FN/FP/TN counts; class 1 is "positive".
ConfusionMatrix binary_confusion(std::uint64_t tp, std::uint64_t fn,
                                 std::uint64_t fp, std::uint64_t tn);

// Per-class metrics return nullopt when their denominator is zero.

/// trace / total. Throws UndefinedMetricError on an empty matrix.
double accuracy(const ConfusionMatrix& cm);
std::optional<double> precision(const ConfusionMatrix& cm, std::size_t c);
std::optional<double> recall(const ConfusionMatrix& cm, std::size_t c);
/// 2pr / (p + r); 0 when p + r == 0 or when only one of p, r is defined.
/// Undefined exactly when Dice is.
std::optional<double> f1(const ConfusionMatrix& cm, std::size_t c);
/// 2TP / (2TP + FP + FN).
std::optional<double> dice(const ConfusionMatrix& cm, std::size_t c);
/// TP / (TP + FP + FN).
std::optional<double> jaccard(const ConfusionMatrix& cm, std::size_t c);

enum class Averaging { kMacro, kMicro };

/// Macro averages skip classes whose metric is undefined; they throw
/// UndefinedMetricError when no class is defined. Micro averages pool the
/// per-class counts first.
double mean_precision(const ConfusionMatrix& cm,
                      Averaging avg = Averaging::kMacro);
double mean_recall(const ConfusionMatrix& cm,
                   Averaging avg = Averaging::kMacro);
double mean_f1(const ConfusionMatrix& cm, Averaging avg = Averaging::kMacro);
double mean_dice(const ConfusionMatrix& cm, Averaging avg = Averaging::kMacro);
/// Unweighted mean IoU over classes with TP + FP + FN > 0.
double mean_iou(const ConfusionMatrix& cm);

/// The evaluation report: accuracy, precision, recall, MIoU, F1, Dice.
using MetricReport = std::map<std::string, double>;

MetricReport make_report(const ConfusionMatrix& cm,
                         Averaging avg = Averaging::kMacro);
/// Two-column text table, one metric per row, keys sorted.
std::string report_to_text(const MetricReport& report);
/// Compact JSON object with the same keys.
std::string report_to_json(const MetricReport& report);

}  // namespace terraseg::metrics

#endif  // TERRASEG_METRICS_CONFUSION_HPP_

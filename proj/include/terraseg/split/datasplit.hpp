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

#ifndef TERRASEG_SPLIT_DATASPLIT_HPP_
#define TERRASEG_SPLIT_DATASPLIT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "terraseg/error.hpp"
#include "terraseg/tensor.hpp"

namespace terraseg::split {

/// A tile sample. `presence[c]` is true when class c occurs in it.
struct SampleRecord {
  std::string id;
  std::vector<bool> presence;
};

/// Ids must be unique and presence vectors of equal length; DataError
/// otherwise. Returns the class count.
std::size_t validate_samples(std::span<const SampleRecord> samples);

/// Presence from a [H, W] class-id map: class c is present when it covers at
/// least `min_pixels` unignored pixels. `ignore` may be empty.
std::vector<bool> presence_from_labels(const Tensor& labels, const Tensor& ignore,
                                       std::size_t classes,
                                       std::size_t min_pixels = 1);

struct TrainTestSplit {
  std::vector<std::size_t> train;  // sample positions, ascending
  std::vector<std::size_t> test;
};

/// |test| = round(n * test_fraction), clamped so neither side is empty.
TrainTestSplit train_test_split(std::span<const SampleRecord> samples,
                                double test_fraction, std::uint64_t seed);

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold;  // fold of each sample position

  std::vector<std::size_t> members(std::size_t f) const;
  std::vector<std::size_t> complement(std::size_t f) const;
  std::vector<std::size_t> sizes() const;
};

/// Seeded shuffle dealt round-robin into K folds; sizes differ by at most 1.
FoldAssignment kfold_partition(std::span<const SampleRecord> samples,
                               std::size_t k, std::uint64_t seed);

/// Iterative greedy stratification. Fold capacities are fixed up front so
/// sizes differ by at most 1, and each fold's demand for class c starts at
/// count(c) * capacity / n. Repeatedly the class with the fewest unassigned
/// samples is taken, and each of its unassigned samples (in seeded order)
/// goes to the open fold with the greatest remaining demand for that class,
/// ties broken by fewest assigned samples, then lowest fold index. Samples
/// without any class are placed last by the same size rule. A refinement
/// pass then swaps pairs of samples across folds (sizes unchanged) while a
/// swap lowers the summed squared deviation of per-fold class counts from
/// count(c) / K.
FoldAssignment stratified_kfold_partition(std::span<const SampleRecord> samples,
                                          std::size_t k, std::uint64_t seed);

/// Per fold and class, how many samples of the fold contain the class.
std::vector<std::vector<std::size_t>> class_counts_per_fold(
    std::span<const SampleRecord> samples, const FoldAssignment& folds);

/// max over classes of (max fold count - min fold count).
std::size_t stratification_spread(std::span<const SampleRecord> samples,
                                  const FoldAssignment& folds);

/// JSON manifest: k, seed, fold sizes and class counts per fold.
nlohmann::json fold_manifest(std::span<const SampleRecord> samples,
                             const FoldAssignment& folds, std::uint64_t seed);

/// Training failure inside cross_validate, with the configuration and fold
/// it happened in. Keeps the category of the original error.
class FoldError : public Error {
 public:
  FoldError(ErrorCategory category, const std::string& message,
            std::size_t theta, std::size_t fold)
      : Error(category, message), theta_(theta), fold_(fold) {}
  std::size_t theta() const noexcept { return theta_; }
  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t theta_;
  std::size_t fold_;
};

/// Trains on `train` positions with configuration `theta` and returns the
/// error on `validation`. `seed` is derived from (seed, theta, fold).
using FoldEvaluator = std::function<double(
    const nlohmann::json& theta, std::span<const std::size_t> train,
    std::span<const std::size_t> validation, std::uint64_t seed)>;

struct CrossValidationResult {
  double score = 0.0;                           // sum over theta and folds of e/K
  std::vector<double> per_theta;                // sum over folds of e/K
  std::vector<std::vector<double>> fold_errors;  // [theta][fold]
};

/// For every configuration and fold i, trains on the other K-1 folds,
/// validates on fold i and adds e/K to the score.
CrossValidationResult cross_validate(const FoldEvaluator& evaluate,
                                     const FoldAssignment& folds,
                                     std::span<const nlohmann::json> thetas,
                                     std::uint64_t seed);

}  // namespace terraseg::split

#endif  // TERRASEG_SPLIT_DATASPLIT_HPP_

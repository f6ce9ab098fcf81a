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

#include "terraseg/split/datasplit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "terraseg/rng.hpp"

namespace terraseg::split {
namespace {

std::vector<SampleRecord> plain(std::size_t n) {
  std::vector<SampleRecord> s;
  for (std::size_t i = 0; i < n; ++i) s.push_back({"t" + std::to_string(i), {true}});
  return s;
}

std::vector<SampleRecord> random_multilabel(SeededRng& rng, std::size_t n,
                                            std::size_t classes) {
  std::vector<SampleRecord> s;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> p(classes);
    for (std::size_t c = 0; c < classes; ++c) p[c] = rng.bernoulli(0.15 + 0.2 * c);
    s.push_back({"s" + std::to_string(i), p});
  }
  return s;
}

void expect_partition(const FoldAssignment& a, std::size_t n) {
  ASSERT_EQ(a.fold.size(), n);
  const auto sizes = a.sizes();
  EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) -
                *std::min_element(sizes.begin(), sizes.end()),
            1u);
  std::size_t covered = 0;
  for (std::size_t f = 0; f < a.k; ++f) covered += a.members(f).size();
  EXPECT_EQ(covered, n);
}

// Smallest achievable spread over every assignment whose fold sizes differ by
// at most one.
std::size_t exhaustive_best_spread(const std::vector<SampleRecord>& s, std::size_t k) {
  const std::size_t n = s.size();
  std::vector<std::size_t> fold(n, 0);
  std::size_t best = SIZE_MAX;
  while (true) {
    FoldAssignment a{k, fold};
    const auto sizes = a.sizes();
    if (*std::max_element(sizes.begin(), sizes.end()) -
            *std::min_element(sizes.begin(), sizes.end()) <=
        1) {
      best = std::min(best, stratification_spread(s, a));
    }
    std::size_t i = 0;
    while (i < n && ++fold[i] == k) fold[i++] = 0;
    if (i == n) break;
  }
  return best;
}

TEST(TrainTestSplit, EightyTwenty) {
  auto s = plain(10);
  TrainTestSplit a = train_test_split(s, 0.2, 42);
  EXPECT_EQ(a.train.size(), 8u);
  EXPECT_EQ(a.test.size(), 2u);
  TrainTestSplit b = train_test_split(s, 0.2, 42);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  for (auto t : a.test) EXPECT_TRUE(all.insert(t).second);
  EXPECT_EQ(all.size(), 10u);
}

TEST(TrainTestSplit, Errors) {
  auto s = plain(10);
  EXPECT_THROW(train_test_split(s, 0.0, 1), ParameterError);
  EXPECT_THROW(train_test_split(s, 1.0, 1), ParameterError);
  EXPECT_THROW(train_test_split(plain(1), 0.5, 1), ParameterError);
  s[3].id = s[2].id;
  EXPECT_THROW(train_test_split(s, 0.5, 1), DataError);
}

TEST(KFold, SizesAndLeaveOneOut) {
  expect_partition(kfold_partition(plain(4), 2, 1), 4);
  FoldAssignment a = kfold_partition(plain(103), 10, 5);
  expect_partition(a, 103);
  auto sizes = a.sizes();
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 10u), 7);
  EXPECT_EQ(std::count(sizes.begin(), sizes.end(), 11u), 3);
  FoldAssignment loo = kfold_partition(plain(7), 7, 5);
  for (auto size : loo.sizes()) EXPECT_EQ(size, 1u);
  EXPECT_EQ(kfold_partition(plain(20), 4, 9).fold, kfold_partition(plain(20), 4, 9).fold);
  EXPECT_THROW(kfold_partition(plain(4), 1, 1), ParameterError);
  EXPECT_THROW(kfold_partition(plain(4), 5, 1), ParameterError);
}

TEST(Stratified, TwoBalancedClasses) {
  std::vector<SampleRecord> s;
  for (int i = 0; i < 20; ++i) {
    s.push_back({"x" + std::to_string(i), {i % 2 == 0, i % 2 == 1}});
  }
  FoldAssignment a = stratified_kfold_partition(s, 5, 3);
  expect_partition(a, 20);
  for (const auto& row : class_counts_per_fold(s, a)) {
    EXPECT_EQ(row, (std::vector<std::size_t>{2, 2}));
  }
}

TEST(Stratified, DivisibleSingleLabelIsExact) {
  SeededRng rng(4);
  std::vector<SampleRecord> s;
  const std::size_t per_class[] = {6, 9, 3, 12};
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t j = 0; j < per_class[c]; ++j) {
      std::vector<bool> p(4, false);
      p[c] = true;
      s.push_back({"c" + std::to_string(c) + "_" + std::to_string(j), p});
    }
  SeededRng shuffle_rng(5);
  shuffle_rng.shuffle(s);
  FoldAssignment a = stratified_kfold_partition(s, 3, 11);
  expect_partition(a, s.size());
  EXPECT_EQ(stratification_spread(s, a), 0u);
}

TEST(Stratified, WithinOneOfExhaustiveOptimum) {
  SeededRng rng(6);
  std::size_t worst_gap = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6 + rng.below(5);  // 6..10
    const std::size_t k = 2 + rng.below(2);  // 2..3
    auto s = random_multilabel(rng, n, 3);
    FoldAssignment a = stratified_kfold_partition(s, k, trial);
    expect_partition(a, n);
    const std::size_t greedy = stratification_spread(s, a);
    const std::size_t best = exhaustive_best_spread(s, k);
    ASSERT_GE(greedy, best);
    worst_gap = std::max(worst_gap, greedy - best);
  }
  EXPECT_LE(worst_gap, 1u);
}

TEST(Stratified, DeterministicAndValidated) {
  SeededRng rng(7);
  auto s = random_multilabel(rng, 50, 4);
  EXPECT_EQ(stratified_kfold_partition(s, 5, 1).fold,
            stratified_kfold_partition(s, 5, 1).fold);
  expect_partition(stratified_kfold_partition(s, 5, 1), 50);
  EXPECT_THROW(stratified_kfold_partition(s, 1, 1), ParameterError);
  s[1].presence.pop_back();
  EXPECT_THROW(stratified_kfold_partition(s, 5, 1), DataError);
}

TEST(Presence, FromLabels) {
  Tensor labels({2, 3}, {0, 0, 2, 2, 2, 1});
  Tensor ignore({2, 3}, {0, 0, 0, 0, 0, 1});
  EXPECT_EQ(presence_from_labels(labels, ignore, 4), (std::vector<bool>{1, 0, 1, 0}));
  EXPECT_EQ(presence_from_labels(labels, {}, 4, 3), (std::vector<bool>{0, 0, 1, 0}));
}

TEST(CrossValidate, WorkedExampleTwoConfigurations) {
  auto s = plain(4);
  FoldAssignment folds = kfold_partition(s, 2, 1);
  std::vector<nlohmann::json> thetas{{{"id", 0}}, {{"id", 1}}};
  const double errors[2][2] = {{0.2, 0.4}, {0.1, 0.3}};
  std::size_t fold_seen = 0;
  auto eval = [&](const nlohmann::json& theta, std::span<const std::size_t> train,
                  std::span<const std::size_t> val, std::uint64_t) {
    const int t = theta["id"].get<int>();
    const std::size_t f = folds.fold[val[0]];
    EXPECT_EQ(train.size() + val.size(), 4u);
    ++fold_seen;
    return errors[t][f];
  };
  CrossValidationResult r = cross_validate(eval, folds, thetas, 3);
  EXPECT_NEAR(r.score, 0.5, 1e-15);
  EXPECT_NEAR(r.per_theta[0], 0.3, 1e-15);
  EXPECT_NEAR(r.per_theta[1], 0.2, 1e-15);
  EXPECT_EQ(fold_seen, 4u);
}

TEST(CrossValidate, EachSampleValidatedOnceTrainedKMinusOne) {
  auto s = plain(11);
  FoldAssignment folds = kfold_partition(s, 4, 2);
  std::vector<int> val_uses(11, 0), train_uses(11, 0);
  std::vector<nlohmann::json> thetas{nlohmann::json::object()};
  auto eval = [&](const nlohmann::json&, std::span<const std::size_t> train,
                  std::span<const std::size_t> val, std::uint64_t) {
    for (auto i : val) ++val_uses[i];
    for (auto i : train) ++train_uses[i];
    return 0.0;
  };
  EXPECT_EQ(cross_validate(eval, folds, thetas, 1).score, 0.0);
  for (int i = 0; i < 11; ++i) {
    EXPECT_EQ(val_uses[i], 1);
    EXPECT_EQ(train_uses[i], 3);
  }
}

TEST(CrossValidate, FailureCarriesContext) {
  FoldAssignment folds = kfold_partition(plain(4), 2, 1);
  std::vector<nlohmann::json> thetas{nlohmann::json::object(), nlohmann::json::object()};
  int calls = 0;
  auto eval = [&](const nlohmann::json&, std::span<const std::size_t>,
                  std::span<const std::size_t>, std::uint64_t) -> double {
    if (++calls == 3) throw DataError("no tiles");
    return 0.0;
  };
  try {
    cross_validate(eval, folds, thetas, 1);
    FAIL();
  } catch (const FoldError& e) {
    EXPECT_EQ(e.theta(), 1u);
    EXPECT_EQ(e.fold(), 0u);
    EXPECT_EQ(e.category(), ErrorCategory::kData);
  }
}

}  // namespace
}  // namespace terraseg::split

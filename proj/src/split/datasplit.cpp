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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "terraseg/rng.hpp"

namespace terraseg::split {

std::size_t validate_samples(std::span<const SampleRecord> samples) {
  std::unordered_set<std::string> ids;
  const std::size_t classes = samples.empty() ? 0 : samples[0].presence.size();
  for (const auto& s : samples) {
    if (!ids.insert(s.id).second) throw DataError("duplicate sample id '" + s.id + "'");
    if (s.presence.size() != classes) {
      throw DataError("sample '" + s.id + "' has " +
                      std::to_string(s.presence.size()) + " presence flags, expected " +
                      std::to_string(classes));
    }
  }
  return classes;
}

std::vector<bool> presence_from_labels(const Tensor& labels, const Tensor& ignore,
                                       std::size_t classes, std::size_t min_pixels) {
  if (!ignore.empty() && ignore.size() != labels.size()) {
    throw ShapeError("ignore mask does not match labels");
  }
  std::vector<std::size_t> count(classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!ignore.empty() && ignore[i] != 0.0) continue;
    const double v = labels[i];
    if (!(v >= 0.0) || v >= static_cast<double>(classes)) {
      throw DataError("label " + std::to_string(v) + " outside [0, " +
                      std::to_string(classes) + ")");
    }
    ++count[static_cast<std::size_t>(v)];
  }
  std::vector<bool> out(classes);
  for (std::size_t c = 0; c < classes; ++c) out[c] = count[c] >= std::max<std::size_t>(min_pixels, 1);
  return out;
}

namespace {

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(seed);
  rng.shuffle(order);
  return order;
}

void check_k(std::size_t n, std::size_t k) {
  if (k <= 1 || k > n) {
    throw ParameterError("K must satisfy 1 < K <= n; got K=" + std::to_string(k) +
                         ", n=" + std::to_string(n));
  }
}

// Exchanges samples between folds while some swap lowers the summed squared
// deviation of per-fold class counts from count(c) / K. Swaps keep fold sizes.
void refine_by_swaps(std::span<const SampleRecord> samples, std::size_t classes,
                     FoldAssignment& a) {
  const std::size_t n = samples.size();
  std::vector<std::vector<double>> dev(a.k, std::vector<double>(classes, 0.0));
  std::vector<double> target(classes, 0.0);
  for (const auto& s : samples)
    for (std::size_t c = 0; c < classes; ++c) target[c] += s.presence[c];
  for (auto& t : target) t /= static_cast<double>(a.k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < classes; ++c) dev[a.fold[i]][c] += samples[i].presence[c];
  for (auto& row : dev)
    for (std::size_t c = 0; c < classes; ++c) row[c] -= target[c];

  // Gain of moving sample i from fold f to g and j from g to f.
  auto gain = [&](std::size_t i, std::size_t j) {
    const std::size_t f = a.fold[i], g = a.fold[j];
    double d = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double delta = static_cast<double>(samples[i].presence[c]) -
                           static_cast<double>(samples[j].presence[c]);
      if (delta == 0.0) continue;
      const double df = dev[f][c], dg = dev[g][c];
      d += df * df + dg * dg - (df - delta) * (df - delta) - (dg + delta) * (dg + delta);
    }
    return d;
  };

  constexpr std::size_t kMaxPasses = 64;
  for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double best = 1e-9;
      std::size_t best_j = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (a.fold[j] == a.fold[i]) continue;
        const double g = gain(i, j);
        if (g > best) {
          best = g;
          best_j = j;
        }
      }
      if (best_j == n) continue;
      const std::size_t f = a.fold[i], g = a.fold[best_j];
      for (std::size_t c = 0; c < classes; ++c) {
        const double delta = static_cast<double>(samples[i].presence[c]) -
                             static_cast<double>(samples[best_j].presence[c]);
        dev[f][c] -= delta;
        dev[g][c] += delta;
      }
      std::swap(a.fold[i], a.fold[best_j]);
      changed = true;
    }
    if (!changed) break;
  }
}

}  // namespace

TrainTestSplit train_test_split(std::span<const SampleRecord> samples,
                                double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ParameterError("test fraction must lie in (0, 1)");
  }
  validate_samples(samples);
  const std::size_t n = samples.size();
  if (n < 2) throw ParameterError("splitting needs at least 2 samples");
  std::size_t n_test = static_cast<std::size_t>(std::llround(n * test_fraction));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  const auto order = shuffled(n, seed);
  TrainTestSplit out;
  out.test.assign(order.begin(), order.begin() + n_test);
  out.train.assign(order.begin() + n_test, order.end());
  std::sort(out.test.begin(), out.test.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

std::vector<std::size_t> FoldAssignment::members(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] == f) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::complement(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] != f) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::sizes() const {
  std::vector<std::size_t> out(k, 0);
  for (std::size_t f : fold) ++out.at(f);
  return out;
}

FoldAssignment kfold_partition(std::span<const SampleRecord> samples,
                               std::size_t k, std::uint64_t seed) {
  validate_samples(samples);
  check_k(samples.size(), k);
  FoldAssignment a{k, std::vector<std::size_t>(samples.size())};
  const auto order = shuffled(samples.size(), seed);
  for (std::size_t p = 0; p < order.size(); ++p) a.fold[order[p]] = p % k;
  return a;
}

FoldAssignment stratified_kfold_partition(std::span<const SampleRecord> samples,
                                          std::size_t k, std::uint64_t seed) {
  const std::size_t classes = validate_samples(samples);
  const std::size_t n = samples.size();
  check_k(n, k);

  std::vector<std::size_t> capacity(k, n / k);
  for (std::size_t f = 0; f < n % k; ++f) ++capacity[f];
  std::vector<std::size_t> assigned(k, 0);

  std::vector<std::size_t> count(classes, 0);
  for (const auto& s : samples)
    for (std::size_t c = 0; c < classes; ++c) count[c] += s.presence[c];
  std::vector<std::vector<double>> demand(k, std::vector<double>(classes));
  for (std::size_t f = 0; f < k; ++f)
    for (std::size_t c = 0; c < classes; ++c)
      demand[f][c] = static_cast<double>(count[c]) * static_cast<double>(capacity[f]) /
                     static_cast<double>(n);

  const auto order = shuffled(n, seed);
  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  FoldAssignment a{k, std::vector<std::size_t>(n, kUnassigned)};
  std::vector<std::size_t> remaining = count;

  // Open fold for class c (or any fold when c == classes).
  auto pick = [&](std::size_t c) {
    std::size_t best = kUnassigned;
    for (std::size_t f = 0; f < k; ++f) {
      if (assigned[f] >= capacity[f]) continue;
      if (best == kUnassigned) {
        best = f;
        continue;
      }
      if (c < classes && std::abs(demand[f][c] - demand[best][c]) > 1e-9) {
        if (demand[f][c] > demand[best][c]) best = f;
        continue;
      }
      if (assigned[f] < assigned[best]) best = f;
    }
    return best;
  };
  auto place = [&](std::size_t i, std::size_t f) {
    a.fold[i] = f;
    ++assigned[f];
    for (std::size_t c = 0; c < classes; ++c) {
      if (!samples[i].presence[c]) continue;
      demand[f][c] -= 1.0;
      --remaining[c];
    }
  };

  while (true) {
    std::size_t rarest = classes;
    for (std::size_t c = 0; c < classes; ++c) {
      if (remaining[c] == 0) continue;
      if (rarest == classes || remaining[c] < remaining[rarest]) rarest = c;
    }
    if (rarest == classes) break;
    for (std::size_t i : order) {
      if (a.fold[i] != kUnassigned || !samples[i].presence[rarest]) continue;
      place(i, pick(rarest));
    }
  }
  for (std::size_t i : order) {
    if (a.fold[i] == kUnassigned) place(i, pick(classes));
  }
  refine_by_swaps(samples, classes, a);
  return a;
}

std::vector<std::vector<std::size_t>> class_counts_per_fold(
    std::span<const SampleRecord> samples, const FoldAssignment& folds) {
  const std::size_t classes = samples.empty() ? 0 : samples[0].presence.size();
  std::vector<std::vector<std::size_t>> out(folds.k, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t c = 0; c < classes; ++c)
      out.at(folds.fold.at(i))[c] += samples[i].presence[c];
  return out;
}

std::size_t stratification_spread(std::span<const SampleRecord> samples,
                                  const FoldAssignment& folds) {
  const auto counts = class_counts_per_fold(samples, folds);
  std::size_t spread = 0;
  const std::size_t classes = counts.empty() ? 0 : counts[0].size();
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& row : counts) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
    spread = std::max(spread, hi - lo);
  }
  return spread;
}

nlohmann::json fold_manifest(std::span<const SampleRecord> samples,
                             const FoldAssignment& folds, std::uint64_t seed) {
  nlohmann::json j;
  j["k"] = folds.k;
  j["seed"] = seed;
  j["fold_sizes"] = folds.sizes();
  j["class_counts"] = class_counts_per_fold(samples, folds);
  return j;
}

CrossValidationResult cross_validate(const FoldEvaluator& evaluate,
                                     const FoldAssignment& folds,
                                     std::span<const nlohmann::json> thetas,
                                     std::uint64_t seed) {
  if (thetas.empty()) throw ParameterError("cross_validate needs at least one configuration");
  check_k(folds.fold.size(), folds.k);
  CrossValidationResult r;
  const double k = static_cast<double>(folds.k);
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    double sum = 0.0;
    r.fold_errors.emplace_back();
    for (std::size_t i = 0; i < folds.k; ++i) {
      const auto val = folds.members(i);
      const auto train = folds.complement(i);
      double e = 0.0;
      try {
        e = evaluate(thetas[t], train, val, derive_seed(seed, t, i));
      } catch (const Error& err) {
        throw FoldError(err.category(),
                        "configuration " + std::to_string(t) + ", fold " +
                            std::to_string(i) + ": " + err.what(),
                        t, i);
      } catch (const std::exception& err) {
        throw FoldError(ErrorCategory::kState,
                        "configuration " + std::to_string(t) + ", fold " +
                            std::to_string(i) + ": " + err.what(),
                        t, i);
      }
      r.fold_errors.back().push_back(e);
      r.score += e / k;
      sum += e / k;
    }
    r.per_theta.push_back(sum);
  }
  return r;
}

}  // namespace terraseg::split

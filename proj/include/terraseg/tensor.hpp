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

#ifndef TERRASEG_TENSOR_HPP_
#define TERRASEG_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "terraseg/rng.hpp"

namespace terraseg {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_volume(const Shape& shape);

/// Dense row-major array of doubles.
///
/// Image tensors are laid out [channels, height, width]; batched image tensors
/// carry a leading batch extent, [batch, channels, height, width]. A
/// default-constructed tensor is empty (no shape, no elements) and only serves
/// as a placeholder; every other tensor has all extents >= 1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, double fill);
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Element access for rank-3 [c, h, w] tensors.
  double& at(std::size_t c, std::size_t y, std::size_t x);
  double at(std::size_t c, std::size_t y, std::size_t x) const;

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Same elements under a new shape of equal volume.
  Tensor reshape(Shape shape) const;
  /// Rank-1 view of the elements in canonical order.
  Tensor flatten() const;

  double sum() const;

  /// Element-wise bit equality of shape and values (names ignored).
  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  Shape shape_;
  std::vector<double> values_;
  std::string name_;
};

/// Batch/channel/spatial extents of a rank-3 or rank-4 image tensor. Rank-3
/// tensors report batch 1.
struct ImageDims {
  std::size_t batch;
  std::size_t channels;
  std::size_t height;
  std::size_t width;

  std::size_t plane() const noexcept { return height * width; }
};

ImageDims image_dims(const Tensor& t);
/// Shape with the same rank as `like` (3 or 4) for the given image extents.
Shape image_shape_like(const Tensor& like, std::size_t batch,
                       std::size_t channels, std::size_t height,
                       std::size_t width);

Tensor tensor_new(const Shape& shape, double fill);
Tensor tensor_random(const Shape& shape, SeededRng& rng, double low,
                     double high);

/// Centered spatial window; offset per axis is floor((src - dst) / 2).
Tensor crop_center(const Tensor& t, std::size_t target_h, std::size_t target_w);
/// Channel-wise concatenation, a's channels first. Works on rank 3 and 4.
Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Channels [begin, end) of a rank-3 or rank-4 image tensor.
Tensor slice_channels(const Tensor& t, std::size_t begin, std::size_t end);
/// Zero border of pad_h rows and pad_w columns on every side.
Tensor pad_zero(const Tensor& t, std::size_t pad_h, std::size_t pad_w);

/// Stacks equally-shaped tensors along a new leading axis.
Tensor stack(std::span<const Tensor> items);
/// Item `index` along the leading axis.
Tensor unstack(const Tensor& t, std::size_t index);

double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace terraseg

#endif  // TERRASEG_TENSOR_HPP_

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

#include "terraseg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "terraseg/error.hpp"

namespace terraseg {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_volume(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have rank >= 1");
  for (auto e : shape) {
    if (e == 0) {
      throw ShapeError("tensor extents must be >= 1, got " +
                       shape_to_string(shape));
    }
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  values_.assign(shape_volume(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  validate_shape(shape_);
  if (values_.size() != shape_volume(shape_)) {
    throw ShapeError("element count " + std::to_string(values_.size()) +
                     " does not match shape " + shape_to_string(shape_));
  }
}

double& Tensor::at(std::size_t c, std::size_t y, std::size_t x) {
  return values_[(c * shape_[1] + y) * shape_[2] + x];
}

double Tensor::at(std::size_t c, std::size_t y, std::size_t x) const {
  return values_[(c * shape_[1] + y) * shape_[2] + x];
}

Tensor Tensor::reshape(Shape shape) const {
  Tensor out(std::move(shape), values_);
  out.name_ = name_;
  return out;
}

Tensor Tensor::flatten() const { return reshape({values_.size()}); }

double Tensor::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

bool operator==(const Tensor& a, const Tensor& b) {
  if (a.shape_ != b.shape_) return false;
  return a.values_.empty() ||
         std::memcmp(a.values_.data(), b.values_.data(),
                     a.values_.size() * sizeof(double)) == 0;
}

ImageDims image_dims(const Tensor& t) {
  const auto& s = t.shape();
  if (s.size() == 3) return {1, s[0], s[1], s[2]};
  if (s.size() == 4) return {s[0], s[1], s[2], s[3]};
  throw ShapeError("expected an image tensor of rank 3 or 4, got " +
                   shape_to_string(s));
}

Shape image_shape_like(const Tensor& like, std::size_t batch,
                       std::size_t channels, std::size_t height,
                       std::size_t width) {
  if (like.rank() == 3) return {channels, height, width};
  return {batch, channels, height, width};
}

Tensor tensor_new(const Shape& shape, double fill) {
  return Tensor(shape, fill);
}

Tensor tensor_random(const Shape& shape, SeededRng& rng, double low,
                     double high) {
  if (!(low < high)) {
    throw RangeError("tensor_random requires low < high");
  }
  Tensor t(shape, 0.0);
  for (auto& v : t.values()) v = rng.uniform(low, high);
  return t;
}

Tensor crop_center(const Tensor& t, std::size_t target_h,
                   std::size_t target_w) {
  const ImageDims d = image_dims(t);
  if (target_h == 0 || target_w == 0 || target_h > d.height ||
      target_w > d.width) {
    throw ShapeError("cannot crop " + shape_to_string(t.shape()) + " to " +
                     std::to_string(target_h) + "x" + std::to_string(target_w));
  }
  if (target_h == d.height && target_w == d.width) return t;
  const std::size_t oy = (d.height - target_h) / 2;
  const std::size_t ox = (d.width - target_w) / 2;
  Tensor out(image_shape_like(t, d.batch, d.channels, target_h, target_w), 0.0);
  const double* src = t.data();
  double* dst = out.data();
  for (std::size_t plane = 0; plane < d.batch * d.channels; ++plane) {
    for (std::size_t y = 0; y < target_h; ++y) {
      const double* row = src + plane * d.plane() + (y + oy) * d.width + ox;
      std::copy(row, row + target_w, dst);
      dst += target_w;
    }
  }
  return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  const ImageDims da = image_dims(a);
  const ImageDims db = image_dims(b);
  if (a.rank() != b.rank() || da.batch != db.batch ||
      da.height != db.height || da.width != db.width) {
    throw ShapeError("concat_channels: incompatible shapes " +
                     shape_to_string(a.shape()) + " and " +
                     shape_to_string(b.shape()));
  }
  Tensor out(image_shape_like(a, da.batch, da.channels + db.channels,
                              da.height, da.width),
             0.0);
  const std::size_t na = da.channels * da.plane();
  const std::size_t nb = db.channels * db.plane();
  double* dst = out.data();
  for (std::size_t n = 0; n < da.batch; ++n) {
    dst = std::copy(a.data() + n * na, a.data() + (n + 1) * na, dst);
    dst = std::copy(b.data() + n * nb, b.data() + (n + 1) * nb, dst);
  }
  return out;
}

Tensor slice_channels(const Tensor& t, std::size_t begin, std::size_t end) {
  const ImageDims d = image_dims(t);
  if (begin >= end || end > d.channels) {
    throw ShapeError("slice_channels: invalid range [" + std::to_string(begin) +
                     "," + std::to_string(end) + ") for " +
                     shape_to_string(t.shape()));
  }
  const std::size_t count = end - begin;
  Tensor out(image_shape_like(t, d.batch, count, d.height, d.width), 0.0);
  double* dst = out.data();
  for (std::size_t n = 0; n < d.batch; ++n) {
    const double* src = t.data() + (n * d.channels + begin) * d.plane();
    dst = std::copy(src, src + count * d.plane(), dst);
  }
  return out;
}

Tensor pad_zero(const Tensor& t, std::size_t pad_h, std::size_t pad_w) {
  if (pad_h == 0 && pad_w == 0) return t;
  const ImageDims d = image_dims(t);
  const std::size_t oh = d.height + 2 * pad_h;
  const std::size_t ow = d.width + 2 * pad_w;
  Tensor out(image_shape_like(t, d.batch, d.channels, oh, ow), 0.0);
  for (std::size_t plane = 0; plane < d.batch * d.channels; ++plane) {
    for (std::size_t y = 0; y < d.height; ++y) {
      const double* row = t.data() + plane * d.plane() + y * d.width;
      std::copy(row, row + d.width,
                out.data() + plane * oh * ow + (y + pad_h) * ow + pad_w);
    }
  }
  return out;
}

Tensor stack(std::span<const Tensor> items) {
  if (items.empty()) throw ShapeError("stack: no tensors");
  const Shape& inner = items.front().shape();
  Shape shape{items.size()};
  shape.insert(shape.end(), inner.begin(), inner.end());
  std::vector<double> values;
  values.reserve(shape_volume(shape));
  for (const auto& t : items) {
    if (t.shape() != inner) {
      throw ShapeError("stack: mismatched shapes " + shape_to_string(inner) +
                       " and " + shape_to_string(t.shape()));
    }
    values.insert(values.end(), t.values().begin(), t.values().end());
  }
  return Tensor(std::move(shape), std::move(values));
}

Tensor unstack(const Tensor& t, std::size_t index) {
  if (t.rank() < 2 || index >= t.extent(0)) {
    throw ShapeError("unstack: index out of range for " +
                     shape_to_string(t.shape()));
  }
  Shape inner(t.shape().begin() + 1, t.shape().end());
  const std::size_t n = shape_volume(inner);
  return Tensor(inner, std::vector<double>(t.data() + index * n,
                                           t.data() + (index + 1) * n));
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace terraseg

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

#include "terraseg/geo/raster.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "internal/fileio.hpp"
#include "terraseg/error.hpp"

namespace terraseg::geo {

static_assert(std::endian::native == std::endian::little,
              "raster codec assumes a little-endian host");

std::pair<double, double> GeoTransform::to_world(double col, double row) const noexcept {
  return {c[0] + col * c[1] + row * c[2], c[3] + col * c[4] + row * c[5]};
}

std::pair<double, double> GeoTransform::to_pixel(double x, double y) const {
  const double det = determinant();
  if (det == 0.0) throw ParameterError("geotransform is singular");
  const double dx = x - c[0], dy = y - c[3];
  return {(c[5] * dx - c[2] * dy) / det, (c[1] * dy - c[4] * dx) / det};
}

GeoTransform GeoTransform::shifted(std::size_t col, std::size_t row) const noexcept {
  GeoTransform t = *this;
  const auto [x, y] = to_world(static_cast<double>(col), static_cast<double>(row));
  t.c[0] = x;
  t.c[3] = y;
  return t;
}

GeoRaster::GeoRaster(std::size_t width, std::size_t height, std::size_t channels,
                     GeoTransform transform, std::string crs, double nodata)
    : width_(width),
      height_(height),
      channels_(channels),
      transform_(transform),
      crs_(std::move(crs)),
      nodata_(nodata) {
  if (width == 0 || height == 0 || channels == 0) {
    throw ParameterError("raster extents must be >= 1");
  }
  if (transform.determinant() == 0.0 || !std::isfinite(transform.determinant())) {
    throw ParameterError("geotransform is singular");
  }
  values_.assign(width * height * channels, nodata);
}

bool GeoRaster::is_nodata(double v) const noexcept {
  return std::isnan(nodata_) ? std::isnan(v) : v == nodata_;
}

double GeoRaster::at(std::size_t ch, std::size_t row, std::size_t col) const {
  if (ch >= channels_ || row >= height_ || col >= width_) {
    throw ShapeError("raster index out of range");
  }
  return values_[(ch * height_ + row) * width_ + col];
}

double& GeoRaster::at(std::size_t ch, std::size_t row, std::size_t col) {
  if (ch >= channels_ || row >= height_ || col >= width_) {
    throw ShapeError("raster index out of range");
  }
  return values_[(ch * height_ + row) * width_ + col];
}

GeoRaster GeoRaster::like(std::size_t channels, double nodata) const {
  return GeoRaster(width_, height_, channels, transform_, crs_, nodata);
}

bool operator==(const GeoRaster& a, const GeoRaster& b) {
  return a.width_ == b.width_ && a.height_ == b.height_ &&
         a.channels_ == b.channels_ && a.transform_ == b.transform_ &&
         a.crs_ == b.crs_ &&
         std::memcmp(&a.nodata_, &b.nodata_, sizeof(double)) == 0 &&
         a.values_.size() == b.values_.size() &&
         std::memcmp(a.values_.data(), b.values_.data(),
                     a.values_.size() * sizeof(double)) == 0;
}

namespace {

constexpr const char* kTypeNames[] = {"uint8", "uint16", "int16",
                                      "int32", "float32", "float64"};

template <typename T>
void encode(const std::vector<double>& v, std::string& out, SampleType type) {
  out.resize(v.size() * sizeof(T));
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool fits;
    if constexpr (std::is_integral_v<T>) {
      fits = v[i] >= static_cast<double>(std::numeric_limits<T>::min()) &&
             v[i] <= static_cast<double>(std::numeric_limits<T>::max()) &&
             v[i] == std::floor(v[i]);
    } else {
      fits = std::isnan(v[i]) || static_cast<double>(static_cast<T>(v[i])) == v[i];
    }
    if (!fits) {
      throw RangeError("value " + std::to_string(v[i]) + " at element " +
                       std::to_string(i) + " does not fit " + to_string(type));
    }
    const T s = static_cast<T>(v[i]);
    std::memcpy(out.data() + i * sizeof(T), &s, sizeof(T));
  }
}

template <typename T>
void decode(const std::string& in, std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    T s;
    std::memcpy(&s, in.data() + i * sizeof(T), sizeof(T));
    v[i] = static_cast<double>(s);
  }
}

nlohmann::json sidecar(const GeoRaster& r, SampleType type) {
  nlohmann::json j;
  j["width"] = r.width();
  j["height"] = r.height();
  j["channels"] = r.channels();
  j["dtype"] = to_string(type);
  j["geotransform"] = r.transform().c;
  j["crs"] = r.crs();
  if (std::isnan(r.nodata())) {
    j["nodata"] = "nan";
  } else {
    j["nodata"] = r.nodata();
  }
  return j;
}

}  // namespace

std::string to_string(SampleType type) { return kTypeNames[static_cast<int>(type)]; }

SampleType parse_sample_type(const std::string& name) {
  for (int i = 0; i < 6; ++i)
    if (name == kTypeNames[i]) return static_cast<SampleType>(i);
  throw FormatError("unknown sample type '" + name + "'", 0);
}

std::size_t sample_size(SampleType type) {
  constexpr std::size_t sizes[] = {1, 2, 2, 4, 4, 8};
  return sizes[static_cast<int>(type)];
}

std::filesystem::path sidecar_path(const std::filesystem::path& data) {
  std::filesystem::path p = data;
  p += ".json";
  return p;
}

GeoRaster load_raster(const std::filesystem::path& data) {
  const std::string meta = internal::read_file(sidecar_path(data));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("sidecar " + sidecar_path(data).string() + ": " + e.what(), e.byte);
  }
  GeoRaster r;
  SampleType type;
  try {
    GeoTransform gt;
    gt.c = j.at("geotransform").get<std::array<double, 6>>();
    double nodata = 0.0;
    const auto& nd = j.at("nodata");
    nodata = nd.is_string() ? std::numeric_limits<double>::quiet_NaN() : nd.get<double>();
    type = parse_sample_type(j.at("dtype").get<std::string>());
    r = GeoRaster(j.at("width").get<std::size_t>(), j.at("height").get<std::size_t>(),
                  j.at("channels").get<std::size_t>(), gt,
                  j.at("crs").get<std::string>(), nodata);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("sidecar field error: ") + e.what(), 0);
  }
  const std::string bytes = internal::read_file(data);
  const std::size_t want = r.values().size() * sample_size(type);
  if (bytes.size() != want) {
    throw FormatError("raster holds " + std::to_string(bytes.size()) +
                          " bytes, sidecar implies " + std::to_string(want),
                      std::min(bytes.size(), want));
  }
  switch (type) {
    case SampleType::kUint8: decode<std::uint8_t>(bytes, r.values()); break;
    case SampleType::kUint16: decode<std::uint16_t>(bytes, r.values()); break;
    case SampleType::kInt16: decode<std::int16_t>(bytes, r.values()); break;
    case SampleType::kInt32: decode<std::int32_t>(bytes, r.values()); break;
    case SampleType::kFloat32: decode<float>(bytes, r.values()); break;
    case SampleType::kFloat64: decode<double>(bytes, r.values()); break;
  }
  return r;
}

void save_raster(const GeoRaster& r, const std::filesystem::path& data, SampleType type) {
  std::string bytes;
  switch (type) {
    case SampleType::kUint8: encode<std::uint8_t>(r.values(), bytes, type); break;
    case SampleType::kUint16: encode<std::uint16_t>(r.values(), bytes, type); break;
    case SampleType::kInt16: encode<std::int16_t>(r.values(), bytes, type); break;
    case SampleType::kInt32: encode<std::int32_t>(r.values(), bytes, type); break;
    case SampleType::kFloat32: encode<float>(r.values(), bytes, type); break;
    case SampleType::kFloat64: encode<double>(r.values(), bytes, type); break;
  }
  internal::write_file_atomic(data, bytes);
  internal::write_file_atomic(sidecar_path(data), sidecar(r, type).dump(2) + "\n");
}

void export_pgm(const GeoRaster& r, const std::filesystem::path& pgm) {
  std::ostringstream os;
  os << "P5\n" << r.width() << ' ' << r.height() << "\n255\n";
  std::string bytes = os.str();
  const std::size_t plane = r.width() * r.height();
  for (std::size_t i = 0; i < plane; ++i) {
    const double v = r.values()[i];
    if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v)) {
      throw RangeError("PGM value " + std::to_string(v) + " at pixel " +
                       std::to_string(i) + " is not an 8-bit integer");
    }
    bytes.push_back(static_cast<char>(static_cast<std::uint8_t>(v)));
  }
  internal::write_file_atomic(pgm, bytes);
  GeoRaster first = r.like(1, r.nodata());
  internal::write_file_atomic(sidecar_path(pgm), sidecar(first, SampleType::kUint8).dump(2) + "\n");
}

GeoRaster import_pgm(const std::filesystem::path& pgm) {
  const std::string bytes = internal::read_file(pgm);
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < bytes.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  };
  auto integer = [&]() -> std::size_t {
    skip();
    const std::size_t start = pos;
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + static_cast<std::size_t>(bytes[pos++] - '0');
      if (v > (1u << 30)) throw FormatError("PGM header value too large", start);
    }
    if (pos == start) throw FormatError("PGM header expects an integer", start);
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (P5)", 0);
  }
  pos = 2;
  const std::size_t w = integer(), h = integer();
  const std::size_t maxval_at = pos;
  const std::size_t maxval = integer();
  if (maxval == 0 || maxval > 255) throw FormatError("PGM maxval must be 1..255", maxval_at);
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("PGM header must end with whitespace", pos);
  }
  ++pos;
  if (w == 0 || h == 0) throw FormatError("PGM has a zero extent", 2);
  if (bytes.size() - pos != w * h) {
    throw FormatError("PGM pixel data has the wrong length", pos);
  }
  GeoTransform gt;
  std::string crs;
  double nodata = 0.0;
  if (std::filesystem::exists(sidecar_path(pgm))) {
    const GeoRaster meta_only = [&] {
      const auto j = nlohmann::json::parse(internal::read_file(sidecar_path(pgm)), nullptr, false);
      if (j.is_discarded()) throw ParseError("PGM sidecar is not JSON", 0);
      GeoTransform t;
      t.c = j.value("geotransform", t.c);
      const auto& nd = j.value("nodata", nlohmann::json(0.0));
      return GeoRaster(1, 1, 1, t, j.value("crs", std::string()),
                       nd.is_string() ? std::numeric_limits<double>::quiet_NaN()
                                      : nd.get<double>());
    }();
    gt = meta_only.transform();
    crs = meta_only.crs();
    nodata = meta_only.nodata();
  }
  GeoRaster r(w, h, 1, gt, crs, nodata);
  for (std::size_t i = 0; i < w * h; ++i) {
    r.values()[i] = static_cast<double>(static_cast<std::uint8_t>(bytes[pos + i]));
  }
  return r;
}

}  // namespace terraseg::geo

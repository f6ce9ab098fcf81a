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

#ifndef TERRASEG_GEO_RASTER_HPP_
#define TERRASEG_GEO_RASTER_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace terraseg::geo {

/// Six affine coefficients, GDAL order:
///   x = c[0] + col * c[1] + row * c[2]
///   y = c[3] + col * c[4] + row * c[5]
struct GeoTransform {
  std::array<double, 6> c{0.0, 1.0, 0.0, 0.0, 0.0, -1.0};

  double determinant() const noexcept { return c[1] * c[5] - c[2] * c[4]; }
  bool north_up() const noexcept { return c[2] == 0.0 && c[4] == 0.0; }
  /// World coordinates of a (possibly fractional) pixel position.
  std::pair<double, double> to_world(double col, double row) const noexcept;
  /// Inverse map; throws ParameterError when the determinant is zero.
  std::pair<double, double> to_pixel(double x, double y) const;
  /// Transform of the raster whose pixel (0, 0) is this one's (col, row).
  GeoTransform shifted(std::size_t col, std::size_t row) const noexcept;

  friend bool operator==(const GeoTransform&, const GeoTransform&) = default;
};

/// Band-sequential raster: value(ch, row, col) lives at
/// (ch * height + row) * width + col. Every supported sample type is held
/// exactly as a double.
class GeoRaster {
 public:
  GeoRaster() = default;
  /// All elements start at `nodata`. Throws ParameterError on a zero extent
  /// or a singular geotransform.
  GeoRaster(std::size_t width, std::size_t height, std::size_t channels,
            GeoTransform transform, std::string crs, double nodata);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  const GeoTransform& transform() const noexcept { return transform_; }
  const std::string& crs() const noexcept { return crs_; }
  double nodata() const noexcept { return nodata_; }
  /// True for the nodata sentinel (any NaN when the sentinel is NaN).
  bool is_nodata(double v) const noexcept;

  double at(std::size_t ch, std::size_t row, std::size_t col) const;
  double& at(std::size_t ch, std::size_t row, std::size_t col);
  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Pixel center in world coordinates.
  std::pair<double, double> pixel_center(std::size_t col, std::size_t row) const noexcept {
    return transform_.to_world(static_cast<double>(col) + 0.5,
                               static_cast<double>(row) + 0.5);
  }

  /// Same georeference, new channel count, all nodata.
  GeoRaster like(std::size_t channels, double nodata) const;

  /// Bitwise comparison of values (NaN payloads included) and metadata.
  friend bool operator==(const GeoRaster& a, const GeoRaster& b);

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  GeoTransform transform_;
  std::string crs_;
  double nodata_ = 0.0;
  std::vector<double> values_;
};

enum class SampleType { kUint8, kUint16, kInt16, kInt32, kFloat32, kFloat64 };

std::string to_string(SampleType type);
/// "uint8", "uint16", "int16", "int32", "float32", "float64".
SampleType parse_sample_type(const std::string& name);
std::size_t sample_size(SampleType type);

// On-disk raster: `<path>` holds little-endian samples in band-sequential
// order; `<path>.json` is the sidecar
//   {"width", "height", "channels", "dtype", "geotransform": [6], "crs",
//    "nodata"}.

std::filesystem::path sidecar_path(const std::filesystem::path& data);

/// Throws NotFoundError, ParseError (sidecar JSON) or FormatError (size).
GeoRaster load_raster(const std::filesystem::path& data);
/// Throws RangeError when a value does not fit `type` exactly.
void save_raster(const GeoRaster& raster, const std::filesystem::path& data,
                 SampleType type);

/// 8-bit binary PGM ("P5") of channel 0 plus the JSON sidecar with dtype
/// uint8. Values must be integers in [0, 255].
void export_pgm(const GeoRaster& raster, const std::filesystem::path& pgm);
/// Reads a P5 file with maxval <= 255 into a one-channel raster.
GeoRaster import_pgm(const std::filesystem::path& pgm);

}  // namespace terraseg::geo

#endif  // TERRASEG_GEO_RASTER_HPP_

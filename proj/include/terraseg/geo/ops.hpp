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

#ifndef TERRASEG_GEO_OPS_HPP_
#define TERRASEG_GEO_OPS_HPP_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "terraseg/geo/raster.hpp"
#include "terraseg/geo/wkt.hpp"
#include "terraseg/rng.hpp"

namespace terraseg::geo {

struct Burn {
  WktGeometry geometry;
  double code = 0.0;
};

/// Burns class codes into a single-channel copy of `grid`'s georeference.
/// A pixel takes a geometry's code when its center is inside under the
/// even-odd rule; later burns overwrite earlier ones. A center on an edge
/// belongs to the polygon lying on its top-left side.
GeoRaster rasterize(std::span<const Burn> burns, const GeoRaster& grid);

/// Pixel-aligned intersection of the raster with the bounding box of `bbox`.
/// Throws ExtentError when they do not overlap.
GeoRaster crop_to_bbox(const GeoRaster& raster, const WktGeometry& bbox);

struct TileGrid {
  std::size_t tile_size = 0;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  GeoTransform transform;
  std::string crs;
  double nodata = 0.0;
};

struct Tile {
  std::size_t col = 0;
  std::size_t row = 0;
  GeoRaster raster;
};

struct Tiling {
  TileGrid grid;
  std::vector<Tile> tiles;  // row-major
};

Tiling tile(const GeoRaster& raster, std::size_t tile_size);

/// Places tiles by their grid coordinates and trims the padding.
GeoRaster mosaic(std::span<const Tile> tiles, const TileGrid& grid);

/// Sen2cor cloud shadow, cloud medium and cloud high probability codes.
inline const std::set<std::int64_t> kDefaultCloudCodes{3, 8, 9};

/// Binary mask (1 = ignore). Nodata input pixels are ignored. The mask uses
/// 255 as its own nodata sentinel, which never appears in the output.
GeoRaster scl_to_ignore_mask(const GeoRaster& scl,
                             const std::set<std::int64_t>& cloud_codes = kDefaultCloudCodes);

enum class AugmentKind { kFlipH, kFlipV, kRot90, kShift };

struct AugmentOp {
  AugmentKind kind = AugmentKind::kFlipH;
  int quarter_turns = 1;  // kRot90, counter-clockwise
  long dx = 0;            // kShift, positive moves content right
  long dy = 0;            // kShift, positive moves content down
};

/// Applies `op` to every channel. Vacated shift pixels take nodata. The
/// geotransform is left unchanged. Throws ParameterError when a shift
/// reaches the raster size.
GeoRaster augment(const GeoRaster& raster, const AugmentOp& op);

struct LabeledTile {
  GeoRaster image;
  GeoRaster labels;
  GeoRaster ignore;  // 1 = ignored
};

/// Transforms image, labels and ignore mask identically; pixels vacated by a
/// shift are marked ignored.
LabeledTile augment(const LabeledTile& tile, const AugmentOp& op);

/// Draws one of flip_h, flip_v, rot90·{1,2,3} or a shift below `max_shift`.
AugmentOp random_augment_op(SeededRng& rng, std::size_t max_shift);

}  // namespace terraseg::geo

#endif  // TERRASEG_GEO_OPS_HPP_

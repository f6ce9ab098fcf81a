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

#include "terraseg/geo/ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "terraseg/error.hpp"

namespace terraseg::geo {
namespace {

void require_same_crs(const std::string& a, const std::string& b, const char* what) {
  if (a != b) {
    throw DataError(std::string(what) + ": CRS '" + a + "' does not match '" + b + "'");
  }
}

// Counts crossings to the right of each pixel center along one scanline.
void burn_row(const WktGeometry& g, const GeoRaster& grid, std::size_t row,
              double code, GeoRaster& out, std::vector<double>& xs) {
  const double y = grid.pixel_center(0, row).second;
  xs.clear();
  for (const auto& ring : g.rings) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      if (edge_spans(ring[j], ring[i], y)) xs.push_back(edge_crossing_x(ring[j], ring[i], y));
    }
  }
  if (xs.empty()) return;
  std::sort(xs.begin(), xs.end());
  for (std::size_t col = 0; col < grid.width(); ++col) {
    const double x = grid.pixel_center(col, row).first;
    const auto right = xs.end() - std::upper_bound(xs.begin(), xs.end(), x);
    if (right % 2 == 1) out.at(0, row, col) = code;
  }
}

}  // namespace

GeoRaster rasterize(std::span<const Burn> burns, const GeoRaster& grid) {
  GeoRaster out = grid.like(1, grid.nodata());
  std::vector<double> xs;
  for (const Burn& b : burns) {
    require_same_crs(b.geometry.crs, grid.crs(), "rasterize");
    if (b.geometry.rings.empty()) continue;
    if (grid.transform().north_up()) {
      for (std::size_t row = 0; row < grid.height(); ++row) burn_row(b.geometry, grid, row, b.code, out, xs);
      continue;
    }
    for (std::size_t row = 0; row < grid.height(); ++row) {
      for (std::size_t col = 0; col < grid.width(); ++col) {
        const auto [x, y] = grid.pixel_center(col, row);
        if (contains(b.geometry, {x, y})) out.at(0, row, col) = b.code;
      }
    }
  }
  return out;
}

GeoRaster crop_to_bbox(const GeoRaster& raster, const WktGeometry& bbox) {
  require_same_crs(bbox.crs, raster.crs(), "crop_to_bbox");
  if (bbox.rings.empty()) throw ExtentError("crop_to_bbox: empty bounding geometry");
  const BoundingBox b = bounding_box(bbox);
  const GeoTransform& gt = raster.transform();
  double c0 = INFINITY, c1 = -INFINITY, r0 = INFINITY, r1 = -INFINITY;
  for (const auto& [x, y] : {std::pair{b.min_x, b.min_y}, std::pair{b.max_x, b.min_y},
                             std::pair{b.min_x, b.max_y}, std::pair{b.max_x, b.max_y}}) {
    const auto [col, row] = gt.to_pixel(x, y);
    c0 = std::min(c0, col);
    c1 = std::max(c1, col);
    r0 = std::min(r0, row);
    r1 = std::max(r1, row);
  }
  // Snap near-integer pixel positions so exact pixel-edge boxes stay exact.
  constexpr double kSnap = 1e-9;
  auto lo = [](double v, std::size_t n) {
    return static_cast<long long>(std::clamp(std::floor(v + kSnap), 0.0, static_cast<double>(n)));
  };
  auto hi = [](double v, std::size_t n) {
    return static_cast<long long>(std::clamp(std::ceil(v - kSnap), 0.0, static_cast<double>(n)));
  };
  const long long col0 = lo(c0, raster.width()), col1 = hi(c1, raster.width());
  const long long row0 = lo(r0, raster.height()), row1 = hi(r1, raster.height());
  if (col1 <= col0 || row1 <= row0) {
    throw ExtentError("crop_to_bbox: box does not intersect the raster extent");
  }
  GeoRaster out(static_cast<std::size_t>(col1 - col0), static_cast<std::size_t>(row1 - row0),
                raster.channels(),
                gt.shifted(static_cast<std::size_t>(col0), static_cast<std::size_t>(row0)),
                raster.crs(), raster.nodata());
  for (std::size_t ch = 0; ch < raster.channels(); ++ch)
    for (std::size_t r = 0; r < out.height(); ++r)
      for (std::size_t c = 0; c < out.width(); ++c)
        out.at(ch, r, c) = raster.at(ch, r + row0, c + col0);
  return out;
}

Tiling tile(const GeoRaster& raster, std::size_t tile_size) {
  if (tile_size == 0) throw ParameterError("tile size must be >= 1");
  Tiling t;
  TileGrid& g = t.grid;
  g.tile_size = tile_size;
  g.cols = (raster.width() + tile_size - 1) / tile_size;
  g.rows = (raster.height() + tile_size - 1) / tile_size;
  g.width = raster.width();
  g.height = raster.height();
  g.channels = raster.channels();
  g.transform = raster.transform();
  g.crs = raster.crs();
  g.nodata = raster.nodata();
  t.tiles.reserve(g.cols * g.rows);
  for (std::size_t tr = 0; tr < g.rows; ++tr) {
    for (std::size_t tc = 0; tc < g.cols; ++tc) {
      const std::size_t x0 = tc * tile_size, y0 = tr * tile_size;
      GeoRaster piece(tile_size, tile_size, g.channels, g.transform.shifted(x0, y0), g.crs,
                      g.nodata);
      const std::size_t w = std::min(tile_size, g.width - x0);
      const std::size_t h = std::min(tile_size, g.height - y0);
      for (std::size_t ch = 0; ch < g.channels; ++ch)
        for (std::size_t r = 0; r < h; ++r)
          for (std::size_t c = 0; c < w; ++c) piece.at(ch, r, c) = raster.at(ch, y0 + r, x0 + c);
      t.tiles.push_back({tc, tr, std::move(piece)});
    }
  }
  return t;
}

GeoRaster mosaic(std::span<const Tile> tiles, const TileGrid& grid) {
  std::map<std::pair<std::size_t, std::size_t>, const Tile*> placed;
  for (const Tile& t : tiles) {
    if (t.col >= grid.cols || t.row >= grid.rows) {
      throw DataError("mosaic: tile (" + std::to_string(t.col) + ", " +
                      std::to_string(t.row) + ") lies outside the grid");
    }
    if (t.raster.width() != grid.tile_size || t.raster.height() != grid.tile_size ||
        t.raster.channels() != grid.channels) {
      throw ShapeError("mosaic: tile (" + std::to_string(t.col) + ", " +
                       std::to_string(t.row) + ") has the wrong dimensions");
    }
    require_same_crs(t.raster.crs(), grid.crs, "mosaic");
    if (!placed.emplace(std::pair{t.row, t.col}, &t).second) {
      throw DataError("mosaic: duplicate tile (" + std::to_string(t.col) + ", " +
                      std::to_string(t.row) + ")");
    }
  }
  GeoRaster out(grid.width, grid.height, grid.channels, grid.transform, grid.crs, grid.nodata);
  for (std::size_t tr = 0; tr < grid.rows; ++tr) {
    for (std::size_t tc = 0; tc < grid.cols; ++tc) {
      const auto it = placed.find({tr, tc});
      if (it == placed.end()) {
        throw DataError("mosaic: missing tile (" + std::to_string(tc) + ", " +
                        std::to_string(tr) + ")");
      }
      const GeoRaster& piece = it->second->raster;
      const std::size_t x0 = tc * grid.tile_size, y0 = tr * grid.tile_size;
      const std::size_t w = std::min(grid.tile_size, grid.width - x0);
      const std::size_t h = std::min(grid.tile_size, grid.height - y0);
      for (std::size_t ch = 0; ch < grid.channels; ++ch)
        for (std::size_t r = 0; r < h; ++r)
          for (std::size_t c = 0; c < w; ++c) out.at(ch, y0 + r, x0 + c) = piece.at(ch, r, c);
    }
  }
  return out;
}

GeoRaster scl_to_ignore_mask(const GeoRaster& scl, const std::set<std::int64_t>& cloud_codes) {
  if (scl.channels() != 1) throw ShapeError("SCL raster must have one channel");
  GeoRaster mask = scl.like(1, 255.0);
  for (std::size_t i = 0; i < scl.values().size(); ++i) {
    const double v = scl.values()[i];
    if (scl.is_nodata(v)) {
      mask.values()[i] = 1.0;
      continue;
    }
    if (v != std::floor(v)) {
      throw DataError("SCL value " + std::to_string(v) + " is not an integer class code");
    }
    mask.values()[i] = cloud_codes.count(static_cast<std::int64_t>(v)) ? 1.0 : 0.0;
  }
  return mask;
}

namespace {

// Maps an output pixel to its source pixel, or returns false when vacated.
struct Mapper {
  AugmentOp op;
  std::size_t in_w, in_h;

  std::pair<std::size_t, std::size_t> out_dims() const {
    if (op.kind == AugmentKind::kRot90 && turns() % 2 == 1) return {in_h, in_w};
    return {in_w, in_h};
  }
  int turns() const { return ((op.quarter_turns % 4) + 4) % 4; }

  bool source(std::size_t r, std::size_t c, std::size_t& sr, std::size_t& sc) const {
    switch (op.kind) {
      case AugmentKind::kFlipH: sr = r; sc = in_w - 1 - c; return true;
      case AugmentKind::kFlipV: sr = in_h - 1 - r; sc = c; return true;
      case AugmentKind::kRot90:
        switch (turns()) {
          case 0: sr = r; sc = c; return true;
          case 1: sr = c; sc = in_w - 1 - r; return true;
          case 2: sr = in_h - 1 - r; sc = in_w - 1 - c; return true;
          default: sr = in_h - 1 - c; sc = r; return true;
        }
      case AugmentKind::kShift: {
        const long long rr = static_cast<long long>(r) - op.dy;
        const long long cc = static_cast<long long>(c) - op.dx;
        if (rr < 0 || cc < 0 || rr >= static_cast<long long>(in_h) ||
            cc >= static_cast<long long>(in_w)) {
          return false;
        }
        sr = static_cast<std::size_t>(rr);
        sc = static_cast<std::size_t>(cc);
        return true;
      }
    }
    return false;
  }
};

Mapper make_mapper(const GeoRaster& r, const AugmentOp& op) {
  if (op.kind == AugmentKind::kShift &&
      (static_cast<std::size_t>(std::labs(op.dx)) >= r.width() ||
       static_cast<std::size_t>(std::labs(op.dy)) >= r.height())) {
    throw ParameterError("shift (" + std::to_string(op.dx) + ", " + std::to_string(op.dy) +
                         ") must be smaller than the " + std::to_string(r.width()) + "x" +
                         std::to_string(r.height()) + " tile");
  }
  return {op, r.width(), r.height()};
}

}  // namespace

GeoRaster augment(const GeoRaster& raster, const AugmentOp& op) {
  const Mapper m = make_mapper(raster, op);
  const auto [w, h] = m.out_dims();
  GeoRaster out(w, h, raster.channels(), raster.transform(), raster.crs(), raster.nodata());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      std::size_t sr, sc;
      if (!m.source(r, c, sr, sc)) continue;
      for (std::size_t ch = 0; ch < raster.channels(); ++ch) out.at(ch, r, c) = raster.at(ch, sr, sc);
    }
  }
  return out;
}

LabeledTile augment(const LabeledTile& tile, const AugmentOp& op) {
  const GeoRaster& im = tile.image;
  for (const GeoRaster* other : {&tile.labels, &tile.ignore}) {
    if (other->width() != im.width() || other->height() != im.height()) {
      throw ShapeError("augment: image, labels and ignore mask differ in size");
    }
  }
  LabeledTile out{augment(tile.image, op), augment(tile.labels, op), augment(tile.ignore, op)};
  if (op.kind == AugmentKind::kShift) {
    const Mapper m = make_mapper(im, op);
    for (std::size_t r = 0; r < out.ignore.height(); ++r) {
      for (std::size_t c = 0; c < out.ignore.width(); ++c) {
        std::size_t sr, sc;
        if (!m.source(r, c, sr, sc)) out.ignore.at(0, r, c) = 1.0;
      }
    }
  }
  return out;
}

AugmentOp random_augment_op(SeededRng& rng, std::size_t max_shift) {
  AugmentOp op;
  switch (rng.below(max_shift > 0 ? 4 : 3)) {
    case 0: op.kind = AugmentKind::kFlipH; break;
    case 1: op.kind = AugmentKind::kFlipV; break;
    case 2:
      op.kind = AugmentKind::kRot90;
      op.quarter_turns = 1 + static_cast<int>(rng.below(3));
      break;
    default: {
      op.kind = AugmentKind::kShift;
      const auto span = static_cast<long>(2 * max_shift + 1);
      op.dx = static_cast<long>(rng.below(static_cast<std::uint64_t>(span))) - static_cast<long>(max_shift);
      op.dy = static_cast<long>(rng.below(static_cast<std::uint64_t>(span))) - static_cast<long>(max_shift);
    }
  }
  return op;
}

}  // namespace terraseg::geo

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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "support/geo_oracles.hpp"
#include "terraseg/error.hpp"
#include "terraseg/geo/ops.hpp"
#include "terraseg/geo/raster.hpp"
#include "terraseg/geo/wkt.hpp"
#include "terraseg/rng.hpp"

namespace terraseg::geo {
namespace {

constexpr const char* kFootprint =
    "POLYGON((16.58910503349143 43.400842665330345,"
    "26.95841113834191 43.400842665330345,"
    "26.95841113834191 49.09541206485471,"
    "16.58910503349143 49.09541206485471,"
    "16.58910503349143 43.400842665330345))";

GeoRaster unit_grid(std::size_t n, std::string crs = "EPSG:4326") {
  const double px = 1.0 / static_cast<double>(n);
  return GeoRaster(n, n, 1, GeoTransform{{0.0, px, 0.0, 1.0, 0.0, -px}}, std::move(crs), -1.0);
}

GeoRaster random_raster(SeededRng& rng, std::size_t w, std::size_t h, std::size_t ch) {
  GeoRaster r(w, h, ch, GeoTransform{{500000.0, 10.0, 0.0, 5000000.0, 0.0, -10.0}},
              "EPSG:32634", -9999.0);
  for (double& v : r.values()) v = rng.uniform(-1e3, 1e3);
  return r;
}

WktGeometry with_crs(WktGeometry g, std::string crs = "EPSG:4326") {
  g.crs = std::move(crs);
  return g;
}

using terraseg::testing::oracle_inside;

TEST(Wkt, FootprintPolygonHasOneClosedFiveVertexRing) {
  const WktGeometry g = parse_wkt(kFootprint);
  ASSERT_EQ(g.rings.size(), 1u);
  ASSERT_EQ(g.rings[0].size(), 5u);
  EXPECT_EQ(g.rings[0].front(), g.rings[0].back());
  EXPECT_EQ(g.rings[0][0].x, 16.58910503349143);
  EXPECT_EQ(g.rings[0][0].y, 43.400842665330345);
  EXPECT_EQ(g.rings[0][2].y, 49.09541206485471);
}

TEST(Wkt, UnitSquareAndHoles) {
  const WktGeometry g = parse_wkt(" polygon ( (0 0, 1 0,1 1 ,0 1,0 0) , (0.25 0.25,0.75 0.25,0.75 0.75,0.25 0.75,0.25 0.25))");
  ASSERT_EQ(g.rings.size(), 2u);
  EXPECT_TRUE(contains(g, {0.1, 0.1}));
  EXPECT_FALSE(contains(g, {0.5, 0.5}));
  const BoundingBox b = bounding_box(g);
  EXPECT_EQ(b.min_x, 0.0);
  EXPECT_EQ(b.max_y, 1.0);
  EXPECT_EQ(parse_wkt(to_wkt(g)).rings, g.rings);
}

TEST(Wkt, ErrorsCarryOffsets) {
  try {
    parse_wkt("POLYGON((0 0,1 0))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 8u);
  }
  try {
    parse_wkt("LINESTRING(0 0,1 1)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  try {
    parse_wkt("POLYGON((0 0,1 x,1 1,0 0))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 15u);
  }
  EXPECT_THROW(parse_wkt("POLYGON((0 0,1 0,1 1,0 0)) extra"), ParseError);
  EXPECT_THROW(parse_wkt("POLYGON((0 0,1 0,0 0))"), ParseError);
  EXPECT_THROW(parse_wkt("POLYGON((0 0,1 0,1 1,0 0)"), ParseError);
}

TEST(GeoTransformTest, AffineRoundTrip) {
  SeededRng rng(5);
  const GeoTransform gt{{16.5, 0.0001, 0.00002, 49.1, -0.00003, -0.0001}};
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(16.0, 27.0), y = rng.uniform(43.0, 50.0);
    const auto [c, r] = gt.to_pixel(x, y);
    const auto [x2, y2] = gt.to_world(c, r);
    EXPECT_NEAR(x2, x, 1e-9);
    EXPECT_NEAR(y2, y, 1e-9);
  }
  EXPECT_THROW((GeoTransform{{0, 1, 1, 0, 1, 1}}.to_pixel(0, 0)), ParameterError);
  EXPECT_THROW(GeoRaster(2, 2, 1, GeoTransform{{0, 0, 0, 0, 0, 0}}, "", 0), ParameterError);
  EXPECT_THROW(GeoRaster(0, 2, 1, GeoTransform{}, "", 0), ParameterError);
}

TEST(Rasterize, EmptyListGivesNodata) {
  const GeoRaster out = rasterize({}, unit_grid(4));
  for (double v : out.values()) EXPECT_EQ(v, -1.0);
}

TEST(Rasterize, UnitSquareBurnsEveryPixel) {
  const Burn b{with_crs(parse_wkt("POLYGON((0 0,1 0,1 1,0 1,0 0))")), 7};
  const GeoRaster out = rasterize(std::span(&b, 1), unit_grid(10));
  for (double v : out.values()) EXPECT_EQ(v, 7.0);
}

TEST(Rasterize, LaterBurnWinsOverlap) {
  const std::vector<Burn> burns{
      {with_crs(parse_wkt("POLYGON((0 0,0.6 0,0.6 1,0 1,0 0))")), 1},
      {with_crs(parse_wkt("POLYGON((0.4 0,1 0,1 1,0.4 1,0.4 0))")), 2}};
  const GeoRaster out = rasterize(burns, unit_grid(10));
  for (std::size_t c = 0; c < 10; ++c) {
    EXPECT_EQ(out.at(0, 3, c), c < 4 ? 1.0 : 2.0) << c;
  }
}

TEST(Rasterize, CenterOnEdgeBelongsToTopLeftSide) {
  // Pixel centers of the 4x4 grid below sit at 0.5, 1.5, 2.5, 3.5.
  const GeoRaster grid(4, 4, 1, GeoTransform{{0, 1, 0, 4, 0, -1}}, "EPSG:4326", 0);
  const Burn b{with_crs(parse_wkt("POLYGON((0.5 0.5,2.5 0.5,2.5 2.5,0.5 2.5,0.5 0.5))")), 1};
  const GeoRaster out = rasterize(std::span(&b, 1), grid);
  // Centers on the left edge x=0.5 and top edge y=2.5 are inside.
  EXPECT_EQ(out.at(0, 1, 0), 1.0);  // (0.5, 2.5)
  EXPECT_EQ(out.at(0, 2, 1), 1.0);  // (1.5, 1.5)
  EXPECT_EQ(out.at(0, 1, 2), 0.0);  // (2.5, 2.5) right edge
  EXPECT_EQ(out.at(0, 3, 0), 0.0);  // (0.5, 0.5) bottom edge
  double burned = 0;
  for (double v : out.values()) burned += v;
  EXPECT_EQ(burned, 4.0);
}

TEST(Rasterize, CrsMismatchIsDataError) {
  const Burn b{with_crs(parse_wkt("POLYGON((0 0,1 0,1 1,0 0))"), "EPSG:3035"), 1};
  EXPECT_THROW(rasterize(std::span(&b, 1), unit_grid(4)), DataError);
}

TEST(Rasterize, MatchesBruteForceOracle) {
  SeededRng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t w = 1 + rng.below(64), h = 1 + rng.below(64);
    const GeoRaster grid(w, h, 1, GeoTransform{{0, 1, 0, static_cast<double>(h), 0, -1}},
                         "EPSG:4326", 255);
    WktGeometry g;
    g.crs = "EPSG:4326";
    const std::size_t rings = 1 + rng.below(2);
    for (std::size_t k = 0; k < rings; ++k) {
      Ring ring;
      const std::size_t n = 3 + rng.below(8);
      for (std::size_t i = 0; i < n; ++i) {
        double x = rng.uniform(-2.0, static_cast<double>(w) + 2.0);
        double y = rng.uniform(-2.0, static_cast<double>(h) + 2.0);
        if (trial % 2 == 0) {  // lattice of pixel centers and corners
          x = std::round(x * 2.0) / 2.0;
          y = std::round(y * 2.0) / 2.0;
        }
        ring.push_back({x, y});
      }
      ring.push_back(ring.front());
      g.rings.push_back(ring);
    }
    const Burn b{g, 3};
    const GeoRaster out = rasterize(std::span(&b, 1), grid);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const auto [x, y] = grid.pixel_center(c, r);
        ASSERT_EQ(out.at(0, r, c), oracle_inside(g, {x, y}) ? 3.0 : 255.0)
            << "trial " << trial << " pixel " << c << "," << r;
      }
    }
  }
}

TEST(Rasterize, RotatedGridUsesPointTest) {
  const GeoRaster grid(8, 8, 1, GeoTransform{{0, 1, 0.5, 8, 0.25, -1}}, "EPSG:4326", 0);
  const Burn b{with_crs(parse_wkt("POLYGON((1 1,7 2,6 7,2 6,1 1))")), 1};
  const GeoRaster out = rasterize(std::span(&b, 1), grid);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      const auto [x, y] = grid.pixel_center(c, r);
      EXPECT_EQ(out.at(0, r, c), oracle_inside(b.geometry, {x, y}) ? 1.0 : 0.0);
    }
}

TEST(Crop, FullExtentIsIdentity) {
  SeededRng rng(1);
  GeoRaster r = random_raster(rng, 20, 10, 2);
  const auto box = with_crs(parse_wkt("POLYGON((500000 4999900,500200 4999900,500200 5000000,500000 5000000,500000 4999900))"),
                            "EPSG:32634");
  EXPECT_EQ(crop_to_bbox(r, box), r);
}

TEST(Crop, WestHalfKeepsOrigin) {
  SeededRng rng(2);
  GeoRaster r = random_raster(rng, 20, 10, 2);
  const auto box = with_crs(parse_wkt("POLYGON((499000 4990000,500100 4990000,500100 5000500,499000 5000500,499000 4990000))"),
                            "EPSG:32634");
  const GeoRaster out = crop_to_bbox(r, box);
  EXPECT_EQ(out.width(), 10u);
  EXPECT_EQ(out.height(), 10u);
  EXPECT_EQ(out.transform(), r.transform());
  EXPECT_EQ(out.at(1, 9, 9), r.at(1, 9, 9));
}

TEST(Crop, InteriorBoxTranslatesOrigin) {
  SeededRng rng(3);
  GeoRaster r = random_raster(rng, 20, 10, 1);
  const auto box = with_crs(parse_wkt("POLYGON((500035 4999925,500085 4999925,500085 4999975,500035 4999975,500035 4999925))"),
                            "EPSG:32634");
  const GeoRaster out = crop_to_bbox(r, box);
  EXPECT_EQ(out.width(), 6u);   // columns 3..8
  EXPECT_EQ(out.height(), 6u);  // rows 2..7
  EXPECT_EQ(out.transform().c[0], 500030.0);
  EXPECT_EQ(out.transform().c[3], 4999980.0);
  EXPECT_EQ(out.at(0, 0, 0), r.at(0, 2, 3));
}

TEST(Crop, DisjointBoxIsExtentError) {
  SeededRng rng(4);
  GeoRaster r = random_raster(rng, 5, 5, 1);
  const auto box = with_crs(parse_wkt("POLYGON((0 0,1 0,1 1,0 1,0 0))"), "EPSG:32634");
  EXPECT_THROW(crop_to_bbox(r, box), ExtentError);
}

TEST(Tiling, DivisibleRasterHasNoPadding) {
  SeededRng rng(5);
  const GeoRaster r = random_raster(rng, 512, 512, 1);
  const Tiling t = tile(r, 256);
  EXPECT_EQ(t.grid.cols, 2u);
  EXPECT_EQ(t.grid.rows, 2u);
  for (const Tile& piece : t.tiles)
    for (double v : piece.raster.values()) ASSERT_NE(v, r.nodata());
}

TEST(Tiling, EdgeTilesArePaddedAndGeoreferenced) {
  SeededRng rng(6);
  const GeoRaster r = random_raster(rng, 300, 300, 2);
  const Tiling t = tile(r, 256);
  ASSERT_EQ(t.tiles.size(), 4u);
  EXPECT_EQ(t.tiles[1].col, 1u);
  EXPECT_EQ(t.tiles[1].row, 0u);
  const GeoRaster& corner = t.tiles[3].raster;
  EXPECT_EQ(corner.at(1, 43, 43), r.at(1, 299, 299));
  EXPECT_EQ(corner.at(0, 44, 0), r.nodata());
  EXPECT_EQ(corner.at(1, 0, 44), r.nodata());
  EXPECT_EQ(corner.transform().c[0], 500000.0 + 2560.0);
  EXPECT_EQ(corner.transform().c[3], 5000000.0 - 2560.0);
  EXPECT_EQ(corner.crs(), r.crs());
}

TEST(Tiling, SentinelThreeTilesAreNineByNineByTwentyOne) {
  SeededRng rng(7);
  const GeoRaster r = random_raster(rng, 40, 31, 21);
  const Tiling t = tile(r, 9);
  EXPECT_EQ(t.grid.cols, 5u);
  EXPECT_EQ(t.grid.rows, 4u);
  for (const Tile& piece : t.tiles) {
    EXPECT_EQ(piece.raster.channels(), 21u);
    EXPECT_EQ(piece.raster.width(), 9u);
    EXPECT_EQ(piece.raster.height(), 9u);
  }
  EXPECT_EQ(mosaic(t.tiles, t.grid), r);
}

TEST(Mosaic, RoundTripIsBitExactForAnySize) {
  SeededRng rng(8);
  for (int i = 0; i < 20; ++i) {
    const GeoRaster r = random_raster(rng, 1 + rng.below(70), 1 + rng.below(70), 1 + rng.below(3));
    const Tiling t = tile(r, 1 + rng.below(32));
    ASSERT_EQ(mosaic(t.tiles, t.grid), r);
  }
  const GeoRaster big = random_raster(rng, 300, 300, 1);
  const Tiling t = tile(big, 256);
  EXPECT_EQ(mosaic(t.tiles, t.grid), big);
}

TEST(Mosaic, SingleTileAndShuffledOrder) {
  SeededRng rng(9);
  const GeoRaster r = random_raster(rng, 30, 20, 1);
  const Tiling one = tile(r, 64);
  EXPECT_EQ(one.tiles.size(), 1u);
  EXPECT_EQ(mosaic(one.tiles, one.grid), r);
  Tiling t = tile(r, 7);
  rng.shuffle(t.tiles);
  EXPECT_EQ(mosaic(t.tiles, t.grid), r);
}

TEST(Mosaic, MissingTileNamesCoordinates) {
  SeededRng rng(10);
  Tiling t = tile(random_raster(rng, 30, 20, 1), 10);
  t.tiles.erase(t.tiles.begin() + 4);  // col 1, row 1
  try {
    mosaic(t.tiles, t.grid);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("(1, 1)"), std::string::npos) << e.what();
  }
}

TEST(CloudMask, ClearAndCloudyScenes) {
  GeoRaster scl(4, 4, 1, GeoTransform{}, "EPSG:4326", 0);
  std::fill(scl.values().begin(), scl.values().end(), 4.0);
  const GeoRaster clear = scl_to_ignore_mask(scl);
  for (double v : clear.values()) EXPECT_EQ(v, 0.0);
  std::fill(scl.values().begin(), scl.values().end(), 9.0);
  const GeoRaster cloudy = scl_to_ignore_mask(scl);
  for (double v : cloudy.values()) EXPECT_EQ(v, 1.0);
}

TEST(CloudMask, MixedSceneMatchesMembership) {
  GeoRaster scl(4, 4, 1, GeoTransform{}, "EPSG:4326", 0);
  for (std::size_t i = 0; i < 16; ++i) scl.values()[i] = static_cast<double>(i % 12);
  const GeoRaster mask = scl_to_ignore_mask(scl);
  for (std::size_t i = 0; i < 16; ++i) {
    const auto code = static_cast<std::int64_t>(i % 12);
    const bool ignore = code == 0 || code == 3 || code == 8 || code == 9;
    EXPECT_EQ(mask.values()[i], ignore ? 1.0 : 0.0) << i;
  }
  const GeoRaster custom = scl_to_ignore_mask(scl, {10});
  EXPECT_EQ(custom.values()[10], 1.0);
  EXPECT_EQ(custom.values()[9], 0.0);
  // Masking a mask with the "ignore" code set reproduces it.
  EXPECT_EQ(scl_to_ignore_mask(mask, {1}).values(), mask.values());
}

TEST(Augment, GroupIdentities) {
  SeededRng rng(11);
  const GeoRaster r = random_raster(rng, 7, 5, 2);
  GeoRaster x = r;
  for (int i = 0; i < 4; ++i) x = augment(x, {AugmentKind::kRot90, 1});
  EXPECT_EQ(x, r);
  EXPECT_EQ(augment(augment(r, {AugmentKind::kFlipH}), {AugmentKind::kFlipH}), r);
  EXPECT_EQ(augment(augment(r, {AugmentKind::kFlipV}), {AugmentKind::kFlipV}), r);
  EXPECT_EQ(augment(r, {AugmentKind::kRot90, 3}), augment(r, {AugmentKind::kRot90, -1}));
  EXPECT_EQ(augment(augment(r, {AugmentKind::kRot90, 1}), {AugmentKind::kRot90, 3}), r);
}

TEST(Augment, RotationIsCounterClockwise) {
  GeoRaster r(2, 2, 1, GeoTransform{}, "", -1);
  r.values() = {1, 2, 3, 4};  // [[1,2],[3,4]]
  EXPECT_EQ(augment(r, {AugmentKind::kRot90, 1}).values(), (std::vector<double>{2, 4, 1, 3}));
  EXPECT_EQ(augment(r, {AugmentKind::kFlipH}).values(), (std::vector<double>{2, 1, 4, 3}));
  EXPECT_EQ(augment(r, {AugmentKind::kFlipV}).values(), (std::vector<double>{3, 4, 1, 2}));
}

TEST(Augment, ShiftRightByOne) {
  GeoRaster image(3, 3, 1, GeoTransform{}, "", -1);
  GeoRaster labels(3, 3, 1, GeoTransform{}, "", 255);
  GeoRaster ignore(3, 3, 1, GeoTransform{}, "", 255);
  for (std::size_t i = 0; i < 9; ++i) {
    image.values()[i] = static_cast<double>(i + 1);
    labels.values()[i] = static_cast<double>(i % 3);
    ignore.values()[i] = 0.0;
  }
  const LabeledTile out = augment(LabeledTile{image, labels, ignore}, {AugmentKind::kShift, 0, 1, 0});
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(out.image.at(0, r, 0), -1.0);
    EXPECT_EQ(out.labels.at(0, r, 0), 255.0);
    EXPECT_EQ(out.ignore.at(0, r, 0), 1.0);
    for (std::size_t c = 1; c < 3; ++c) {
      EXPECT_EQ(out.image.at(0, r, c), image.at(0, r, c - 1));
      EXPECT_EQ(out.labels.at(0, r, c), labels.at(0, r, c - 1));
      EXPECT_EQ(out.ignore.at(0, r, c), 0.0);
    }
  }
  EXPECT_THROW(augment(image, {AugmentKind::kShift, 0, 3, 0}), ParameterError);
  EXPECT_THROW(augment(image, {AugmentKind::kShift, 0, 0, -3}), ParameterError);
}

TEST(Augment, ImageAndLabelTransformsCommute) {
  SeededRng rng(12);
  for (int i = 0; i < 50; ++i) {
    const GeoRaster r = random_raster(rng, 6, 6, 1);
    GeoRaster stacked(6, 6, 2, r.transform(), r.crs(), r.nodata());
    std::copy(r.values().begin(), r.values().end(), stacked.values().begin());
    std::copy(r.values().begin(), r.values().end(), stacked.values().begin() + 36);
    const AugmentOp op = random_augment_op(rng, 2);
    const GeoRaster both = augment(stacked, op);
    const GeoRaster single = augment(r, op);
    ASSERT_TRUE(std::equal(single.values().begin(), single.values().end(), both.values().begin()));
    ASSERT_TRUE(std::equal(single.values().begin(), single.values().end(), both.values().begin() + 36));
  }
}

class RasterIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("terraseg_geo_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(RasterIo, RoundTripEveryType) {
  SeededRng rng(13);
  GeoRaster r(5, 4, 3, GeoTransform{{10, 0.5, 0, 20, 0, -0.5}}, "EPSG:4326", 0);
  for (double& v : r.values()) v = static_cast<double>(rng.below(100));
  for (SampleType t : {SampleType::kUint8, SampleType::kUint16, SampleType::kInt16,
                       SampleType::kInt32, SampleType::kFloat32, SampleType::kFloat64}) {
    const auto path = dir_ / ("r_" + to_string(t) + ".bin");
    save_raster(r, path, t);
    EXPECT_EQ(std::filesystem::file_size(path), r.values().size() * sample_size(t));
    EXPECT_EQ(load_raster(path), r) << to_string(t);
  }
}

TEST_F(RasterIo, NanNodataAndRangeChecks) {
  GeoRaster r(2, 1, 1, GeoTransform{}, "EPSG:4326", std::numeric_limits<double>::quiet_NaN());
  r.values()[1] = 0.25;
  save_raster(r, dir_ / "nan.bin", SampleType::kFloat32);
  const GeoRaster back = load_raster(dir_ / "nan.bin");
  EXPECT_TRUE(back.is_nodata(back.values()[0]));
  EXPECT_EQ(back.values()[1], 0.25);
  r.values()[0] = 300;
  EXPECT_THROW(save_raster(r, dir_ / "u8.bin", SampleType::kUint8), RangeError);
  r.values()[0] = 0.1;
  EXPECT_THROW(save_raster(r, dir_ / "f32.bin", SampleType::kFloat32), RangeError);
}

TEST_F(RasterIo, MalformedInputs) {
  EXPECT_THROW(load_raster(dir_ / "missing.bin"), NotFoundError);
  GeoRaster r(2, 2, 1, GeoTransform{}, "EPSG:4326", 0);
  save_raster(r, dir_ / "a.bin", SampleType::kUint8);
  std::ofstream(dir_ / "a.bin", std::ios::binary | std::ios::app) << 'x';
  EXPECT_THROW(load_raster(dir_ / "a.bin"), FormatError);
  std::ofstream(sidecar_path(dir_ / "a.bin")) << "{\"width\": ";
  EXPECT_THROW(load_raster(dir_ / "a.bin"), ParseError);
}

TEST_F(RasterIo, PgmRoundTrip) {
  GeoRaster mask(5, 3, 1, GeoTransform{{1, 2, 0, 3, 0, -2}}, "EPSG:32634", 255);
  for (std::size_t i = 0; i < 15; ++i) mask.values()[i] = static_cast<double>(i % 2);
  export_pgm(mask, dir_ / "m.pgm");
  std::ifstream f(dir_ / "m.pgm", std::ios::binary);
  std::string head(11, '\0');
  f.read(head.data(), 11);
  EXPECT_EQ(head, "P5\n5 3\n255\n");
  EXPECT_EQ(import_pgm(dir_ / "m.pgm"), mask);
}

}  // namespace
}  // namespace terraseg::geo

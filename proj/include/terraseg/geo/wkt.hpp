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

#ifndef TERRASEG_GEO_WKT_HPP_
#define TERRASEG_GEO_WKT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace terraseg::geo {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using Ring = std::vector<Point>;

/// A polygon: rings[0] is the outer boundary, the rest are holes. Every ring
/// is closed and has at least 4 vertices. `crs` is empty when unspecified.
struct WktGeometry {
  std::vector<Ring> rings;
  std::string crs;
};

/// Parses `POLYGON ((x y, ...), (x y, ...))`. The keyword is case
/// insensitive; whitespace is free between tokens. Throws ParseError with
/// the byte offset on a bad token, unsupported kind or unclosed ring.
WktGeometry parse_wkt(std::string_view text);

/// Shortest round-trip text form.
std::string to_wkt(const WktGeometry& geometry);

struct BoundingBox {
  double min_x, min_y, max_x, max_y;
};
BoundingBox bounding_box(const WktGeometry& geometry);

/// Even-odd rule over all rings, by a half-open crossing test: a point on an
/// edge is inside when the interior lies to its right (+x) or below it (-y),
/// so the top and left boundaries of a north-up shape are inclusive.
bool contains(const WktGeometry& geometry, Point p);

/// x of the crossing between edge a-b and the horizontal line at y, as used
/// by both contains() and the scanline rasterizer.
inline double edge_crossing_x(Point a, Point b, double y) {
  return (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x;
}

/// True when edge a-b crosses the line at y under the half-open rule.
inline bool edge_spans(Point a, Point b, double y) {
  return (a.y >= y) != (b.y >= y);
}

}  // namespace terraseg::geo

#endif  // TERRASEG_GEO_WKT_HPP_

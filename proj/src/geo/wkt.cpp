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

#include "terraseg/geo/wkt.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "terraseg/error.hpp"

namespace terraseg::geo {

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::size_t pos() const { return pos_; }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "'" + found(), pos_);
    }
    ++pos_;
  }
  std::string word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string w(s_.substr(start, pos_ - start));
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return w;
  }
  double number() {
    skip_ws();
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    // from_chars rejects a leading '+'; accept it as WKT writers emit it.
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) {
      throw ParseError("expected a number" + found(), pos_);
    }
    if (!std::isfinite(v)) throw ParseError("coordinate is not finite", pos_);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

 private:
  std::string found() const {
    if (pos_ >= s_.size()) return ", found end of input";
    return std::string(", found '") + s_[pos_] + "'";
  }
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

WktGeometry parse_wkt(std::string_view text) {
  Lexer lx(text);
  lx.skip_ws();
  const std::size_t kw_at = lx.pos();
  const std::string kind = lx.word();
  if (kind.empty()) throw ParseError("expected a geometry keyword", kw_at);
  if (kind != "POLYGON") {
    throw ParseError("unsupported geometry kind '" + kind + "'", kw_at);
  }
  WktGeometry g;
  lx.expect('(');
  while (true) {
    const std::size_t ring_at = lx.pos();
    lx.expect('(');
    Ring ring;
    while (true) {
      Point p;
      p.x = lx.number();
      p.y = lx.number();
      ring.push_back(p);
      if (lx.peek() == ',') {
        lx.expect(',');
        continue;
      }
      lx.expect(')');
      break;
    }
    if (ring.front() != ring.back()) {
      throw ParseError("ring is not closed", ring_at);
    }
    if (ring.size() < 4) {
      throw ParseError("ring needs at least 4 vertices", ring_at);
    }
    g.rings.push_back(std::move(ring));
    if (lx.peek() == ',') {
      lx.expect(',');
      continue;
    }
    lx.expect(')');
    break;
  }
  if (!lx.at_end()) throw ParseError("trailing characters", lx.pos());
  return g;
}

std::string to_wkt(const WktGeometry& g) {
  std::string out = "POLYGON (";
  char buf[64];
  for (std::size_t r = 0; r < g.rings.size(); ++r) {
    out += r ? ", (" : "(";
    for (std::size_t i = 0; i < g.rings[r].size(); ++i) {
      if (i) out += ", ";
      auto res = std::to_chars(buf, buf + sizeof buf, g.rings[r][i].x);
      out.append(buf, res.ptr);
      out += ' ';
      res = std::to_chars(buf, buf + sizeof buf, g.rings[r][i].y);
      out.append(buf, res.ptr);
    }
    out += ')';
  }
  return out + ")";
}

BoundingBox bounding_box(const WktGeometry& g) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox b{inf, inf, -inf, -inf};
  for (const auto& ring : g.rings)
    for (const auto& p : ring) {
      b.min_x = std::min(b.min_x, p.x);
      b.min_y = std::min(b.min_y, p.y);
      b.max_x = std::max(b.max_x, p.x);
      b.max_y = std::max(b.max_y, p.y);
    }
  return b;
}

bool contains(const WktGeometry& g, Point p) {
  bool inside = false;
  for (const auto& ring : g.rings) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      if (edge_spans(ring[j], ring[i], p.y) &&
          p.x < edge_crossing_x(ring[j], ring[i], p.y)) {
        inside = !inside;
      }
    }
  }
  return inside;
}

}  // namespace terraseg::geo

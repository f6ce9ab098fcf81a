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

#include "terraseg/pipeline/catalog.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "terraseg/error.hpp"

namespace terraseg::pipeline {
namespace {

std::chrono::year_month_day parse_date(const std::string& text, const char* what) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (text.size() != 10 || std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw ParameterError(std::string(what) + " date '" + text + "' is not YYYY-MM-DD");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw ParameterError(std::string(what) + " date '" + text + "' does not exist");
  return ymd;
}

std::string number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string polygon_text(const geo::WktGeometry& g) {
  std::string s = "POLYGON(";
  for (std::size_t r = 0; r < g.rings.size(); ++r) {
    const geo::Ring& ring = g.rings[r];
    if (ring.size() < 4 || ring.front() != ring.back()) {
      throw ParameterError("footprint ring " + std::to_string(r) +
                           " must be closed with at least 4 vertices");
    }
    s += r ? ", (" : "(";
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (i) s += ", ";
      s += number(ring[i].x) + " " + number(ring[i].y);
    }
    s += ")";
  }
  return s + ")";
}

}  // namespace

std::string build_catalog_query(const CatalogQuery& q) {
  if (q.limit == 0) throw ParameterError("catalog query limit must be >= 1");
  std::vector<std::string> clauses;
  if (!q.begin.empty() || !q.end.empty()) {
    if (q.begin.empty() || q.end.empty()) {
      throw ParameterError("catalog query needs both a begin and an end date");
    }
    if (parse_date(q.begin, "begin") > parse_date(q.end, "end")) {
      throw ParameterError("begin date " + q.begin + " is after end date " + q.end);
    }
    const std::string range =
        "[" + q.begin + "T00:00:00.000Z TO " + q.end + "T23:59:59.999Z]";
    clauses.push_back("(beginPosition:" + range + " AND endPosition:" + range + ")");
  }
  std::vector<std::string> product;
  if (!q.platform.empty()) product.push_back("platformname:" + q.platform);
  if (!q.filename.empty()) product.push_back("filename:" + q.filename);
  if (!q.product_type.empty()) product.push_back("producttype:" + q.product_type);
  if (!q.instrument.empty()) product.push_back("instrumentshortname:" + q.instrument);
  if (!product.empty()) {
    std::string p = "((";
    for (std::size_t i = 0; i < product.size(); ++i) p += (i ? " AND " : "") + product[i];
    clauses.push_back(p + "))");
  }
  if (q.footprint) {
    if (q.footprint->rings.empty()) throw ParameterError("footprint has no rings");
    clauses.push_back("footprint: Intersects (" + polygon_text(*q.footprint) + ")");
  }

  std::string url = q.base_url + "?";
  if (!clauses.empty()) {
    url += "filter=";
    for (std::size_t i = 0; i < clauses.size(); ++i) url += (i ? " AND " : "") + clauses[i];
    url += "&";
  }
  url += "offset=" + std::to_string(q.offset) + "&limit=" + std::to_string(q.limit);
  if (!q.sort_by.empty()) url += "&sortedby=" + q.sort_by;
  if (!q.order.empty()) url += "&order=" + q.order;
  return url;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

std::vector<std::string> query_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (std::string_view("()[],&?=").find(c) != std::string_view::npos) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      cur += c;
    }
  }
  flush();
  return tokens;
}

CatalogQuery catalog_query_from(const QuerySettings& s) {
  CatalogQuery q;
  q.base_url = s.base_url;
  q.begin = s.begin;
  q.end = s.end;
  q.platform = s.platform;
  q.filename = s.filename;
  q.product_type = s.product_type;
  q.instrument = s.instrument;
  if (!s.footprint.empty()) q.footprint = geo::parse_wkt(s.footprint);
  q.offset = s.offset;
  q.limit = s.limit;
  q.sort_by = s.sort_by;
  q.order = s.order;
  return q;
}

}  // namespace terraseg::pipeline

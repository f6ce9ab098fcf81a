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

#ifndef TERRASEG_PIPELINE_CATALOG_HPP_
#define TERRASEG_PIPELINE_CATALOG_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "terraseg/geo/wkt.hpp"
#include "terraseg/pipeline/config.hpp"

namespace terraseg::pipeline {

/// OpenSearch product query. Empty strings leave a clause out.
struct CatalogQuery {
  std::string base_url = "https://scihub.copernicus.eu/dhus/api/stub/products";
  std::string begin;  // YYYY-MM-DD, start of day
  std::string end;    // YYYY-MM-DD, end of day
  std::string platform;
  std::string filename;
  std::string product_type;
  std::string instrument;
  std::optional<geo::WktGeometry> footprint;
  std::size_t offset = 0;
  std::size_t limit = 25;
  std::string sort_by;
  std::string order;
};

/// Serializes with single spaces and a fixed clause order: sensing dates,
/// platform, filename, product type, instrument, footprint, then paging and
/// sorting. Throws ParameterError on begin > end, a malformed date, a zero
/// limit or a footprint ring with fewer than 4 vertices.
std::string build_catalog_query(const CatalogQuery& query);

/// Collapses whitespace runs to one space and trims the ends.
std::string normalize_whitespace(std::string_view text);

/// Splits on whitespace and isolates ( ) [ ] , & ? = as single tokens.
std::vector<std::string> query_tokens(std::string_view text);

/// Query from the config section; the footprint WKT is parsed here.
CatalogQuery catalog_query_from(const QuerySettings& settings);

}  // namespace terraseg::pipeline

#endif  // TERRASEG_PIPELINE_CATALOG_HPP_

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

#include "terraseg/error.hpp"

namespace terraseg {

std::string_view category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kShape: return "shape";
    case ErrorCategory::kParameter: return "parameter";
    case ErrorCategory::kRange: return "range";
    case ErrorCategory::kData: return "data";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kIntegrity: return "integrity";
    case ErrorCategory::kNotFound: return "not-found";
    case ErrorCategory::kConflict: return "conflict";
    case ErrorCategory::kName: return "name";
    case ErrorCategory::kState: return "state";
    case ErrorCategory::kGraph: return "graph";
    case ErrorCategory::kUndefinedMetric: return "undefined-metric";
    case ErrorCategory::kExtent: return "extent";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

}  // namespace terraseg

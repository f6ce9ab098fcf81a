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

#ifndef TERRASEG_ERROR_HPP_
#define TERRASEG_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace terraseg {

/// Broad failure categories. The CLI maps these onto process exit codes.
enum class ErrorCategory {
  kShape,
  kParameter,
  kRange,
  kData,
  kParse,
  kFormat,
  kConfig,
  kIntegrity,
  kNotFound,
  kConflict,
  kName,
  kState,
  kGraph,
  kUndefinedMetric,
  kExtent,
  kIo,
};

std::string_view category_name(ErrorCategory category) noexcept;

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define TERRASEG_DEFINE_ERROR(Name, Category)                          \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& message) : Error(Category, message) {} \
  }

TERRASEG_DEFINE_ERROR(ShapeError, ErrorCategory::kShape);
TERRASEG_DEFINE_ERROR(ParameterError, ErrorCategory::kParameter);
TERRASEG_DEFINE_ERROR(RangeError, ErrorCategory::kRange);
TERRASEG_DEFINE_ERROR(DataError, ErrorCategory::kData);
TERRASEG_DEFINE_ERROR(ConfigError, ErrorCategory::kConfig);
TERRASEG_DEFINE_ERROR(IntegrityError, ErrorCategory::kIntegrity);
TERRASEG_DEFINE_ERROR(NotFoundError, ErrorCategory::kNotFound);
TERRASEG_DEFINE_ERROR(ConflictError, ErrorCategory::kConflict);
TERRASEG_DEFINE_ERROR(NameError, ErrorCategory::kName);
TERRASEG_DEFINE_ERROR(StateError, ErrorCategory::kState);
TERRASEG_DEFINE_ERROR(GraphError, ErrorCategory::kGraph);
TERRASEG_DEFINE_ERROR(UndefinedMetricError, ErrorCategory::kUndefinedMetric);
TERRASEG_DEFINE_ERROR(ExtentError, ErrorCategory::kExtent);
TERRASEG_DEFINE_ERROR(IoError, ErrorCategory::kIo);

#undef TERRASEG_DEFINE_ERROR

/// Error raised while decoding text or bytes; carries the byte offset of the
/// offending input position.
class OffsetError : public Error {
 public:
  OffsetError(ErrorCategory category, const std::string& message,
              std::size_t offset)
      : Error(category, message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ParseError : public OffsetError {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : OffsetError(ErrorCategory::kParse, message, offset) {}
};

class FormatError : public OffsetError {
 public:
  FormatError(const std::string& message, std::size_t offset)
      : OffsetError(ErrorCategory::kFormat, message, offset) {}
};

}  // namespace terraseg

#endif  // TERRASEG_ERROR_HPP_

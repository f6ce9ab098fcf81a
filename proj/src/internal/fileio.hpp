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

#ifndef TERRASEG_INTERNAL_FILEIO_HPP_
#define TERRASEG_INTERNAL_FILEIO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace terraseg::internal {

/// Whole file as bytes; NotFoundError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes `path.tmp` then renames it over `path`; IoError on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

std::uint32_t crc32_of(const void* data, std::size_t size);

}  // namespace terraseg::internal

#endif  // TERRASEG_INTERNAL_FILEIO_HPP_

// Copyright 2026 The datlime Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace datlime {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws FormatError when absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a comma-separated file with a header row. Blank lines and lines
/// starting with '#' are skipped. No quoting support.
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);
unsigned long long parse_uint(std::string_view text);

/// Writes text to path, replacing any existing file.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace datlime

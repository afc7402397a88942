/*
 * Copyright 2026 The Crashkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CRASHKIT_TABLE_H_
#define CRASHKIT_TABLE_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crashkit/feature_dictionary.h"

namespace crashkit {

using Row = std::map<std::string, std::string, std::less<>>;

struct MalformedLine {
  std::size_t line_no = 0;  // 1-based, header is line 1
  std::string reason;
};

struct ParsedTable {
  std::vector<std::string> header;
  std::vector<Row> rows;
  std::vector<MalformedLine> malformed;
  std::size_t line_count = 0;  // data records seen, malformed included
};

struct TableOptions {
  char delimiter = ',';
  // Throw ParseError on the first malformed line instead of collecting it.
  bool strict = false;
};

// Splits delimiter-separated text with RFC 4180 quoting: a quoted cell may
// contain the delimiter, newlines, and doubled quotes.
std::vector<std::vector<std::string>> split_records(
    std::string_view text, char delimiter,
    std::vector<MalformedLine>* malformed,
    std::vector<std::size_t>* start_lines);

// Parses `text` and checks its header against the dictionary's schema named
// `schema_name` (same column set, any order). Throws kSchemaMismatch.
ParsedTable parse_table_text(std::string_view text, std::string_view schema_name,
                             const FeatureDictionary& dict,
                             const TableOptions& options = {});
ParsedTable parse_table(const std::filesystem::path& path,
                        std::string_view schema_name,
                        const FeatureDictionary& dict,
                        const TableOptions& options = {});

// Quotes a cell when it contains the delimiter, a quote, or a newline.
std::string quote_cell(std::string_view cell, char delimiter);

}  // namespace crashkit

#endif  // CRASHKIT_TABLE_H_

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

#include "crashkit/table.h"

#include <algorithm>
#include <set>

#include "crashkit/error.h"
#include "crashkit/hashing.h"

namespace crashkit {

std::vector<std::vector<std::string>> split_records(
    std::string_view text, char delimiter,
    std::vector<MalformedLine>* malformed,
    std::vector<std::size_t>* start_lines) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  std::size_t i = 0;

  auto end_record = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    cell_was_quoted = false;
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      out.push_back(std::move(record));
      if (start_lines) start_lines->push_back(record_line);
    }
    record.clear();
  };

  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 BOM
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"' && cell.empty() && !cell_was_quoted) {
      in_quotes = true;
      cell_was_quoted = true;
    } else if (c == delimiter) {
      record.push_back(std::move(cell));
      cell.clear();
      cell_was_quoted = false;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_record();
      ++line;
      record_line = line;
    } else {
      cell += c;
    }
  }
  if (in_quotes) {
    if (malformed) malformed->push_back({record_line, "unterminated quote"});
    return out;
  }
  if (!cell.empty() || !record.empty() || cell_was_quoted) end_record();
  return out;
}

ParsedTable parse_table_text(std::string_view text,
                             std::string_view schema_name,
                             const FeatureDictionary& dict,
                             const TableOptions& options) {
  const auto* schema = dict.table_schema(schema_name);
  if (!schema) {
    throw Error(ErrorCode::kSchemaMismatch,
                "no schema named '" + std::string(schema_name) + "'");
  }
  ParsedTable table;
  std::vector<std::size_t> lines;
  auto records = split_records(text, options.delimiter, &table.malformed, &lines);
  if (options.strict && !table.malformed.empty()) {
    throw ParseError(table.malformed.front().line_no,
                     table.malformed.front().reason);
  }
  if (records.empty()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "table '" + std::string(schema_name) + "' has no header row");
  }
  table.header = records.front();
  const std::set<std::string> got(table.header.begin(), table.header.end());
  const std::set<std::string> want(schema->begin(), schema->end());
  if (got != want || got.size() != table.header.size()) {
    std::string msg = "header of table '" + std::string(schema_name) +
                      "' differs from the dictionary schema:";
    for (const auto& c : want) {
      if (!got.count(c)) msg += " missing " + c + ";";
    }
    for (const auto& c : got) {
      if (!want.count(c)) msg += " unexpected " + c + ";";
    }
    if (got.size() != table.header.size()) msg += " duplicate column;";
    throw Error(ErrorCode::kSchemaMismatch, msg);
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    ++table.line_count;
    auto& cells = records[r];
    if (cells.size() != table.header.size()) {
      MalformedLine bad{lines[r], "expected " +
                                      std::to_string(table.header.size()) +
                                      " cells, found " +
                                      std::to_string(cells.size())};
      if (options.strict) throw ParseError(bad.line_no, bad.reason);
      table.malformed.push_back(std::move(bad));
      continue;
    }
    Row row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      row.emplace(table.header[c], std::move(cells[c]));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ParsedTable parse_table(const std::filesystem::path& path,
                        std::string_view schema_name,
                        const FeatureDictionary& dict,
                        const TableOptions& options) {
  return parse_table_text(read_file(path), schema_name, dict, options);
}

std::string quote_cell(std::string_view cell, char delimiter) {
  if (cell.find_first_of(std::string{delimiter, '"', '\n', '\r'}) ==
      std::string_view::npos) {
    return std::string(cell);
  }
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace crashkit

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

#include "crashkit/feature_dictionary.h"

#include <algorithm>
#include <cctype>

#include "crashkit/error.h"
#include "crashkit/hashing.h"

namespace crashkit {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Lowercase, trimmed, inner whitespace and hyphens collapsed to '_'.
std::string fold(std::string_view raw) {
  std::string out;
  bool pending_sep = false;
  for (char c : trim(raw)) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
      pending_sep = true;
      continue;
    }
    if (pending_sep && !out.empty()) out += '_';
    pending_sep = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

FieldKind parse_kind(const std::string& s, std::size_t line) {
  if (s == "categorical") return FieldKind::kCategorical;
  if (s == "numeric") return FieldKind::kNumeric;
  if (s == "boolean") return FieldKind::kBoolean;
  if (s == "text") return FieldKind::kText;
  throw ParseError(line, "unknown field kind '" + s + "'");
}

FieldGroup parse_group(const std::string& s, std::size_t line) {
  if (s == "id") return FieldGroup::kId;
  if (s == "general") return FieldGroup::kGeneral;
  if (s == "infrastructure") return FieldGroup::kInfrastructure;
  if (s == "event") return FieldGroup::kEvent;
  if (s == "unit") return FieldGroup::kUnit;
  if (s == "label") return FieldGroup::kLabel;
  throw ParseError(line, "unknown field group '" + s + "'");
}

FieldScope parse_scope(const std::string& s, std::size_t line) {
  if (s == "record") return FieldScope::kRecord;
  if (s == "list") return FieldScope::kList;
  if (s == "unit") return FieldScope::kUnit;
  if (s == "narrative") return FieldScope::kNarrative;
  throw ParseError(line, "unknown field scope '" + s + "'");
}

}  // namespace

std::string_view kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::kCategorical: return "categorical";
    case FieldKind::kNumeric: return "numeric";
    case FieldKind::kBoolean: return "boolean";
    case FieldKind::kText: return "text";
  }
  return "";
}

std::string_view group_name(FieldGroup group) {
  switch (group) {
    case FieldGroup::kId: return "id";
    case FieldGroup::kGeneral: return "general";
    case FieldGroup::kInfrastructure: return "infrastructure";
    case FieldGroup::kEvent: return "event";
    case FieldGroup::kUnit: return "unit";
    case FieldGroup::kLabel: return "label";
  }
  return "";
}

FeatureDictionary FeatureDictionary::parse(std::string_view text) {
  FeatureDictionary dict;
  dict.hash_ = hash_text(text);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto cols = split(line, '|');
    const auto& directive = cols[0];
    auto need = [&](std::size_t n) {
      if (cols.size() != n) {
        throw ParseError(line_no, "directive '" + directive + "' expects " +
                                      std::to_string(n - 1) + " arguments");
      }
    };
    if (directive == "version") {
      need(2);
      dict.version_ = cols[1];
    } else if (directive == "field") {
      need(7);
      FieldSpec f;
      f.key = cols[1];
      f.kind = parse_kind(cols[2], line_no);
      f.group = parse_group(cols[3], line_no);
      f.scope = parse_scope(cols[4], line_no);
      if (cols[5] != "-") {
        for (auto& v : split(cols[5], ',')) f.values.push_back(fold(v));
      }
      f.label = cols[6];
      if (dict.index_.count(f.key)) {
        throw ParseError(line_no, "duplicate field '" + f.key + "'");
      }
      dict.index_.emplace(f.key, dict.fields_.size());
      dict.fields_.push_back(std::move(f));
    } else if (directive == "value") {
      need(4);
      dict.value_alias_[cols[1]][fold(cols[2])] = fold(cols[3]);
    } else if (directive == "alias") {
      need(4);
      dict.column_alias_[cols[1]][cols[2]] = cols[3];
    } else if (directive == "table") {
      need(3);
      dict.tables_[cols[1]] = split(cols[2], ',');
    } else if (directive == "depends") {
      need(4);
      dict.dependencies_.push_back({cols[1], cols[2], cols[3]});
    } else {
      throw ParseError(line_no, "unknown directive '" + directive + "'");
    }
  }
  if (dict.version_.empty()) {
    throw ParseError(1, "feature dictionary lacks a version directive");
  }
  for (const auto& [key, _] : dict.value_alias_) {
    if (!dict.find(key)) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "value alias for undeclared field '" + key + "'");
    }
  }
  for (const auto& [table, columns] : dict.column_alias_) {
    for (const auto& [column, key] : columns) {
      if (!dict.find(key)) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "column alias " + table + "." + column +
                        " targets undeclared field '" + key + "'");
      }
    }
  }
  return dict;
}

FeatureDictionary FeatureDictionary::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

FeatureDictionary FeatureDictionary::builtin() {
  return load(std::filesystem::path(CRASHKIT_DATA_DIR) /
              "feature_dictionary.txt");
}

const FieldSpec* FeatureDictionary::find(std::string_view key) const {
  const auto it = index_.find(key);
  return it == index_.end() ? nullptr : &fields_[it->second];
}

const FieldSpec& FeatureDictionary::at(std::string_view key) const {
  if (const auto* f = find(key)) return *f;
  throw Error(ErrorCode::kTemplate,
              "field '" + std::string(key) + "' is not in the dictionary");
}

std::vector<const FieldSpec*> FeatureDictionary::feature_fields() const {
  std::vector<const FieldSpec*> out;
  for (const auto& f : fields_) {
    if (f.group != FieldGroup::kId && f.group != FieldGroup::kLabel) {
      out.push_back(&f);
    }
  }
  return out;
}

std::optional<std::string> FeatureDictionary::normalize(
    std::string_view key, std::string_view raw) const {
  const FieldSpec* f = find(key);
  if (!f || f->kind != FieldKind::kCategorical) {
    return std::string(trim(raw));
  }
  std::string v = fold(raw);
  if (const auto it = value_alias_.find(key); it != value_alias_.end()) {
    if (const auto a = it->second.find(v); a != it->second.end()) {
      v = a->second;
    }
  }
  if (f->values.empty()) return v;
  if (std::find(f->values.begin(), f->values.end(), v) == f->values.end()) {
    return std::nullopt;
  }
  return v;
}

std::optional<std::string> FeatureDictionary::column_key(
    std::string_view table, std::string_view column) const {
  if (const auto t = column_alias_.find(table); t != column_alias_.end()) {
    if (const auto c = t->second.find(column); c != t->second.end()) {
      return c->second;
    }
  }
  if (find(column)) return std::string(column);
  return std::nullopt;
}

const std::vector<std::string>* FeatureDictionary::table_schema(
    std::string_view name) const {
  const auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

std::vector<FieldDependency> FeatureDictionary::dependencies(
    std::string_view factor) const {
  std::vector<FieldDependency> out;
  for (const auto& d : dependencies_) {
    if (d.factor == factor) out.push_back(d);
  }
  return out;
}

}  // namespace crashkit

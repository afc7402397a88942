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

#ifndef CRASHKIT_FEATURE_DICTIONARY_H_
#define CRASHKIT_FEATURE_DICTIONARY_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crashkit {

enum class FieldKind { kCategorical, kNumeric, kBoolean, kText };
enum class FieldGroup { kId, kGeneral, kInfrastructure, kEvent, kUnit, kLabel };

// How a field is stored on a CrashRecord.
//   record:    one value per crash
//   list:      a multi-valued crash field (e.g. contributing factors)
//   unit:      one value per involved unit
//   narrative: an entry of the event's ordered narrative facts
enum class FieldScope { kRecord, kList, kUnit, kNarrative };

struct FieldSpec {
  std::string key;
  FieldKind kind = FieldKind::kCategorical;
  FieldGroup group = FieldGroup::kGeneral;
  FieldScope scope = FieldScope::kRecord;
  std::vector<std::string> values;  // closed category set; empty otherwise
  std::string label;                // human phrase used by templates
};

// A what-if rewrite touching a correlated field besides the factor's own.
struct FieldDependency {
  std::string factor;
  std::string key;
  std::string value;
};

// The versioned feature dictionary: field kinds, category sets, value and
// column aliases, and the raw table schemas accepted by ingest.
//
// File format: one pipe-separated directive per line, '#' starts a comment.
//
//   version | 1
//   field   | <key> | <kind> | <group> | <scope> | <v1,v2,..|-> | <label>
//   value   | <key> | <raw> | <canonical>
//   alias   | <table> | <column> | <key>
//   table   | <name> | <col1,col2,...>
//   depends | <factor> | <key> | <value>
class FeatureDictionary {
 public:
  static FeatureDictionary parse(std::string_view text);
  static FeatureDictionary load(const std::filesystem::path& path);
  // The dictionary shipped with the repository.
  static FeatureDictionary builtin();

  const std::string& version() const { return version_; }
  // FNV-1a of the source text, hex.
  const std::string& hash() const { return hash_; }

  const std::vector<FieldSpec>& fields() const { return fields_; }
  const FieldSpec* find(std::string_view key) const;
  const FieldSpec& at(std::string_view key) const;  // throws kTemplate

  // Fields that count toward completeness and feed encoders: everything
  // except the id and the label group.
  std::vector<const FieldSpec*> feature_fields() const;

  // Trim, case-fold, map spaces/hyphens to '_', then apply the value alias
  // map. Returns nullopt when a categorical value maps to no known category.
  // Non-categorical fields are returned trimmed.
  std::optional<std::string> normalize(std::string_view key,
                                       std::string_view raw) const;

  // Dictionary key a raw column of `table` feeds, or nullopt.
  std::optional<std::string> column_key(std::string_view table,
                                        std::string_view column) const;
  const std::vector<std::string>* table_schema(std::string_view name) const;

  std::vector<FieldDependency> dependencies(std::string_view factor) const;

 private:
  std::string version_;
  std::string hash_;
  std::vector<FieldSpec> fields_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::map<std::string, std::string, std::less<>>, std::less<>>
      value_alias_;
  std::map<std::string, std::map<std::string, std::string, std::less<>>, std::less<>>
      column_alias_;
  std::map<std::string, std::vector<std::string>, std::less<>> tables_;
  std::vector<FieldDependency> dependencies_;
};

std::string_view kind_name(FieldKind kind);
std::string_view group_name(FieldGroup group);

}  // namespace crashkit

#endif  // CRASHKIT_FEATURE_DICTIONARY_H_

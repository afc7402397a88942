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

#ifndef CRASHKIT_INGEST_H_
#define CRASHKIT_INGEST_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crashkit/feature_dictionary.h"
#include "crashkit/record.h"
#include "crashkit/table.h"
#include "json.hpp"

namespace crashkit {

struct SourceBundle {
  std::filesystem::path crash_table;
  std::filesystem::path road_table;
  std::filesystem::path unit_table;
  std::optional<std::filesystem::path> person_table;
};

struct SourceTables {
  ParsedTable crash;
  ParsedTable road;
  ParsedTable unit;
  std::optional<ParsedTable> person;
};

inline constexpr const char* kDropMissingLabels = "missing_labels";
inline constexpr const char* kDropMissingJoin = "missing_join";
inline constexpr const char* kDropBelowCompleteness = "below_completeness";
inline constexpr const char* kDropDuplicateCaseId = "duplicate_case_id";

struct IngestReport {
  std::map<std::string, std::size_t> rows_read;  // per table
  std::size_t records_built = 0;
  std::size_t records_dropped = 0;
  std::map<std::string, std::size_t> drop_reasons;
  std::vector<std::string> unmatched_road;  // case ids, record kept
  std::vector<std::string> conflicts;       // alias conflicts, crash wins
  std::vector<std::string> unknown_categories;
  std::vector<std::string> malformed;  // "<table>:<line>: <reason>"

  void drop(const std::string& reason, std::size_t n = 1);
  nlohmann::json to_json() const;
};

SourceTables load_sources(const SourceBundle& bundle,
                          const FeatureDictionary& dict,
                          const TableOptions& options = {});

// One record per labelled crash row with at least one unit. Road attributes
// come from the segment whose [begin, end) milepost interval contains the
// crash on the same route. Output is ordered by case id.
std::vector<CrashRecord> join_records(const SourceTables& tables,
                                      const FeatureDictionary& dict,
                                      IngestReport& report);

struct CleanResult {
  std::vector<CrashRecord> records;
  std::vector<std::string> unknown_categories;  // "<case>:<key>=<raw>"
};

// Normalizes every categorical value through the dictionary (case fold,
// trim, value aliases). Unknown values become Missing and are reported.
// Duplicate list entries are merged. Idempotent.
CleanResult clean_features(std::vector<CrashRecord> records,
                           const FeatureDictionary& dict);

struct FilterResult {
  std::vector<CrashRecord> kept;
  std::vector<CrashRecord> dropped;
};

inline constexpr double kDefaultMinCompleteness = 0.6;

// Keeps a record iff completeness(record) >= min_fraction.
FilterResult completeness_filter(std::vector<CrashRecord> records,
                                 double min_fraction,
                                 const FeatureDictionary& dict);

// parse -> join -> clean -> completeness filter.
std::vector<CrashRecord> ingest(const SourceTables& tables,
                                const FeatureDictionary& dict,
                                double min_fraction, IngestReport& report);

}  // namespace crashkit

#endif  // CRASHKIT_INGEST_H_

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

#ifndef CRASHKIT_RECORD_H_
#define CRASHKIT_RECORD_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crashkit/feature_dictionary.h"
#include "crashkit/labels.h"
#include "json.hpp"

namespace crashkit {

// std::nullopt is the single Missing marker for every optional field.
using Category = std::optional<std::string>;

struct LocalDateTime {
  int year = 0;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;

  // "YYYY-MM-DDTHH:MM" (a space separator and a trailing ":SS" are accepted).
  static std::optional<LocalDateTime> parse(std::string_view text);
  std::string format() const;

  friend auto operator<=>(const LocalDateTime&,
                          const LocalDateTime&) = default;
};

struct GeneralInfo {
  std::optional<LocalDateTime> crash_datetime;
  Category city;
  Category route_id;
  std::optional<double> milepost;
  Category road_type;
  std::optional<double> state_plane_easting;
  std::optional<double> state_plane_northing;

  friend bool operator==(const GeneralInfo&, const GeneralInfo&) = default;
};

struct InfrastructureInfo {
  std::optional<int> lane_count;
  std::optional<int> speed_limit;
  std::optional<bool> work_zone;
  Category lighting;
  Category road_surface;
  std::optional<bool> intersection_related;

  friend bool operator==(const InfrastructureInfo&,
                         const InfrastructureInfo&) = default;
};

struct EventInfo {
  // Ordered (factor, value) pairs; factor names are narrative-scope fields of
  // the feature dictionary.
  std::vector<std::pair<std::string, std::string>> narrative_facts;
  std::optional<bool> alcohol_involved;
  std::optional<bool> drug_involved;
  std::vector<std::string> contributing_factors;

  friend bool operator==(const EventInfo&, const EventInfo&) = default;
};

struct UnitInfo {
  Category unit_kind;
  Category vehicle_type;
  std::optional<int> driver_age;
  Category driver_gender;
  Category action;

  friend bool operator==(const UnitInfo&, const UnitInfo&) = default;
};

struct CrashRecord {
  std::string case_id;
  GeneralInfo general;
  InfrastructureInfo infrastructure;
  EventInfo event;
  std::vector<UnitInfo> units;
  Labels labels;

  friend bool operator==(const CrashRecord&, const CrashRecord&) = default;
};

// Raw string form of one field. An empty vector means Missing; record- and
// narrative-scope fields hold at most one value, list- and unit-scope fields
// hold one value per present entry.
using FieldValues = std::vector<std::string>;
using FieldView = std::map<std::string, FieldValues, std::less<>>;

// Canonical string spelling shared by views, templates and encoders.
std::string format_number(double value);
std::string format_bool(bool value);

// Feature fields of a record, keyed by dictionary key (labels and id
// excluded). Narrative facts whose factor is not a dictionary field are
// ignored.
FieldView record_view(const CrashRecord& record,
                      const FeatureDictionary& dict);
// Unit-scope fields of one unit.
FieldView unit_view(const UnitInfo& unit);

// Assigns a raw string to the typed slot named by `key`. Unknown keys and
// unparseable values leave the slot untouched and return false. An empty
// string sets the slot to Missing.
bool assign_field(CrashRecord& record, std::string_view key,
                  std::string_view raw, const FeatureDictionary& dict);
bool assign_unit_field(UnitInfo& unit, std::string_view key,
                       std::string_view raw);

// Fraction of dictionary feature fields that are not Missing.
double completeness(const CrashRecord& record, const FeatureDictionary& dict);

std::optional<bool> parse_bool(std::string_view raw);

// One JSON object per record; Missing is encoded as null.
nlohmann::json to_json(const CrashRecord& record);
CrashRecord record_from_json(const nlohmann::json& j);

std::string to_jsonl(const std::vector<CrashRecord>& records);
std::vector<CrashRecord> records_from_jsonl(std::string_view text);

}  // namespace crashkit

#endif  // CRASHKIT_RECORD_H_

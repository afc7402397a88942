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

#include "crashkit/ingest.h"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_map>

#include "crashkit/error.h"

namespace crashkit {
namespace {

using nlohmann::json;

std::optional<long long> to_integer(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_real(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Labels> parse_labels(const Row& row) {
  const auto injured = to_integer(row.at("injured_count"));
  if (!injured || *injured < 0) return std::nullopt;
  Labels labels;
  labels.injured_count = static_cast<std::uint32_t>(*injured);
  try {
    const auto& sev = row.at("severity");
    if (const auto n = to_integer(sev)) {
      labels.severity = severity_from_ordinal(static_cast<int>(*n));
    } else {
      labels.severity = severity_from_code(sev);
    }
    const auto& at = row.at("accident_type");
    if (const auto n = to_integer(at)) {
      labels.accident_type = accident_type_from_id(static_cast<int>(*n));
    } else {
      labels.accident_type = accident_type_from_abbr(at);
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return labels;
}

struct Segment {
  double begin = 0;
  double end = 0;
  const Row* row = nullptr;
};

// Current value of a record-scope field as its normalized string, if any.
std::optional<std::string> current_value(const CrashRecord& r,
                                         const std::string& key,
                                         const FeatureDictionary& dict) {
  const auto view = record_view(r, dict);
  const auto it = view.find(key);
  if (it == view.end() || it->second.empty()) return std::nullopt;
  return dict.normalize(key, it->second.front());
}

void append_malformed(IngestReport& report, const std::string& table,
                      const ParsedTable& t) {
  for (const auto& m : t.malformed) {
    report.malformed.push_back(table + ":" + std::to_string(m.line_no) + ": " +
                               m.reason);
  }
}

}  // namespace

void IngestReport::drop(const std::string& reason, std::size_t n) {
  records_dropped += n;
  drop_reasons[reason] += n;
}

json IngestReport::to_json() const {
  return json{
      {"rows_read", rows_read},
      {"records_built", records_built},
      {"records_dropped", records_dropped},
      {"drop_reasons", drop_reasons},
      {"unmatched_road", unmatched_road},
      {"conflicts", conflicts},
      {"unknown_categories", unknown_categories},
      {"malformed", malformed},
  };
}

SourceTables load_sources(const SourceBundle& bundle,
                          const FeatureDictionary& dict,
                          const TableOptions& options) {
  SourceTables t;
  t.crash = parse_table(bundle.crash_table, "crash", dict, options);
  t.road = parse_table(bundle.road_table, "road", dict, options);
  t.unit = parse_table(bundle.unit_table, "unit", dict, options);
  if (bundle.person_table) {
    t.person = parse_table(*bundle.person_table, "person", dict, options);
  }
  return t;
}

std::vector<CrashRecord> join_records(const SourceTables& tables,
                                      const FeatureDictionary& dict,
                                      IngestReport& report) {
  report.rows_read["crash"] = tables.crash.rows.size();
  report.rows_read["road"] = tables.road.rows.size();
  report.rows_read["unit"] = tables.unit.rows.size();
  append_malformed(report, "crash", tables.crash);
  append_malformed(report, "road", tables.road);
  append_malformed(report, "unit", tables.unit);
  if (tables.person) {
    report.rows_read["person"] = tables.person->rows.size();
    append_malformed(report, "person", *tables.person);
  }

  // Read-only indexes.
  std::unordered_map<std::string, std::vector<Segment>> segments;
  for (const auto& row : tables.road.rows) {
    const auto b = to_real(row.at("begin_milepost"));
    const auto e = to_real(row.at("end_milepost"));
    if (!b || !e || *e <= *b) continue;
    segments[row.at("route_id")].push_back({*b, *e, &row});
  }
  for (auto& [_, segs] : segments) {
    std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) {
      return std::tie(a.begin, a.end) < std::tie(b.begin, b.end);
    });
  }
  std::unordered_map<std::string, std::vector<std::pair<long long, const Row*>>>
      units;
  for (const auto& row : tables.unit.rows) {
    const auto n = to_integer(row.at("unit_number")).value_or(0);
    units[row.at("report_number")].emplace_back(n, &row);
  }
  for (auto& [_, us] : units) {
    std::sort(us.begin(), us.end(), [](const auto& a, const auto& b) {
      return a.first < b.first;
    });
  }
  std::map<std::pair<std::string, long long>, const Row*> persons;
  if (tables.person) {
    for (const auto& row : tables.person->rows) {
      const auto n = to_integer(row.at("unit_number")).value_or(0);
      persons.emplace(std::make_pair(row.at("report_number"), n), &row);
    }
  }

  std::vector<const Row*> crash_rows;
  for (const auto& row : tables.crash.rows) crash_rows.push_back(&row);
  std::stable_sort(crash_rows.begin(), crash_rows.end(),
                   [](const Row* a, const Row* b) {
                     return a->at("report_number") < b->at("report_number");
                   });

  std::vector<CrashRecord> out;
  std::set<std::string> seen;
  for (const Row* row : crash_rows) {
    const std::string& case_id = row->at("report_number");
    if (case_id.empty() || !seen.insert(case_id).second) {
      report.drop(kDropDuplicateCaseId);
      continue;
    }
    const auto labels = parse_labels(*row);
    if (!labels) {
      report.drop(kDropMissingLabels);
      continue;
    }
    const auto u = units.find(case_id);
    if (u == units.end() || u->second.empty()) {
      report.drop(kDropMissingJoin);
      continue;
    }

    CrashRecord rec;
    rec.case_id = case_id;
    rec.labels = *labels;
    for (const auto& [column, raw] : *row) {
      const auto key = dict.column_key("crash", column);
      if (!key || *key == "case_id") continue;
      const FieldSpec* spec = dict.find(*key);
      if (!spec || spec->group == FieldGroup::kLabel) continue;
      if (!assign_field(rec, *key, raw, dict)) {
        report.unknown_categories.push_back(case_id + ":" + *key + "=" + raw);
      }
    }

    const Segment* hit = nullptr;
    if (rec.general.route_id && rec.general.milepost) {
      const auto s = segments.find(*rec.general.route_id);
      if (s != segments.end()) {
        for (const auto& seg : s->second) {
          if (seg.begin <= *rec.general.milepost &&
              *rec.general.milepost < seg.end) {
            hit = &seg;
            break;
          }
        }
      }
    }
    if (!hit) {
      report.unmatched_road.push_back(case_id);
    } else {
      for (const auto& [column, raw] : *hit->row) {
        const auto key = dict.column_key("road", column);
        if (!key || *key == "route_id") continue;
        const auto existing = current_value(rec, *key, dict);
        if (!existing) {
          assign_field(rec, *key, raw, dict);
          continue;
        }
        const auto incoming = dict.normalize(*key, raw);
        if (!raw.empty() && incoming != existing) {
          report.conflicts.push_back(case_id + ":" + *key + " crash=" +
                                     *existing + " road=" + raw);
        }
      }
    }

    for (const auto& [number, unit_row] : u->second) {
      UnitInfo unit;
      for (const auto& [column, raw] : *unit_row) {
        const auto key = dict.column_key("unit", column);
        if (key) assign_unit_field(unit, *key, raw);
      }
      const auto p = persons.find({case_id, number});
      if (p != persons.end()) {
        for (const auto& [column, raw] : *p->second) {
          const auto key = dict.column_key("person", column);
          if (key) assign_unit_field(unit, *key, raw);
        }
      }
      rec.units.push_back(std::move(unit));
    }
    out.push_back(std::move(rec));
  }
  report.records_built = out.size();
  return out;
}

CleanResult clean_features(std::vector<CrashRecord> records,
                           const FeatureDictionary& dict) {
  CleanResult result;
  std::map<std::string, std::size_t, std::less<>> ranks;
  for (std::size_t i = 0; i < dict.fields().size(); ++i) {
    ranks.emplace(dict.fields()[i].key, i);
  }
  auto field_rank = [&](const std::string& key) { return ranks.at(key); };
  for (auto& r : records) {
    auto report = [&](const std::string& key, const std::string& raw) {
      result.unknown_categories.push_back(r.case_id + ":" + key + "=" + raw);
    };
    auto norm = [&](const std::string& key, Category& slot) {
      if (!slot) return;
      auto v = dict.normalize(key, *slot);
      if (!v) report(key, *slot);
      slot = std::move(v);
    };
    norm("city", r.general.city);
    norm("road_type", r.general.road_type);
    norm("lighting", r.infrastructure.lighting);
    norm("road_surface", r.infrastructure.road_surface);
    if (r.general.route_id) {
      r.general.route_id = dict.normalize("route_id", *r.general.route_id);
    }

    std::vector<std::string> factors;
    for (const auto& f : r.event.contributing_factors) {
      auto v = dict.normalize("contributing_factors", f);
      if (!v) {
        report("contributing_factors", f);
      } else if (std::find(factors.begin(), factors.end(), *v) ==
                 factors.end()) {
        factors.push_back(std::move(*v));
      }
    }
    r.event.contributing_factors = std::move(factors);

    std::vector<std::pair<std::string, std::string>> facts;
    for (const auto& [factor, value] : r.event.narrative_facts) {
      const FieldSpec* spec = dict.find(factor);
      if (!spec || spec->scope != FieldScope::kNarrative) {
        report(factor, value);
        continue;
      }
      auto v = dict.normalize(factor, value);
      if (!v) {
        report(factor, value);
        continue;
      }
      const bool dup = std::any_of(facts.begin(), facts.end(), [&](auto& p) {
        return p.first == factor;
      });
      if (!dup) facts.emplace_back(factor, std::move(*v));
    }
    // Dictionary field order, independent of source column order.
    std::stable_sort(facts.begin(), facts.end(), [&](auto& a, auto& b) {
      return field_rank(a.first) < field_rank(b.first);
    });
    r.event.narrative_facts = std::move(facts);

    for (auto& u : r.units) {
      norm("unit_kind", u.unit_kind);
      norm("vehicle_type", u.vehicle_type);
      norm("driver_gender", u.driver_gender);
      norm("action", u.action);
      if (u.driver_age && (*u.driver_age < 10 || *u.driver_age > 110)) {
        report("driver_age", std::to_string(*u.driver_age));
        u.driver_age.reset();
      }
    }
    auto& inf = r.infrastructure;
    if (inf.speed_limit && (*inf.speed_limit < 5 || *inf.speed_limit > 90)) {
      report("speed_limit", std::to_string(*inf.speed_limit));
      inf.speed_limit.reset();
    }
    if (inf.lane_count && *inf.lane_count < 1) {
      report("lane_count", std::to_string(*inf.lane_count));
      inf.lane_count.reset();
    }
    if (r.general.milepost && *r.general.milepost < 0) {
      report("milepost", format_number(*r.general.milepost));
      r.general.milepost.reset();
    }
  }
  result.records = std::move(records);
  return result;
}

FilterResult completeness_filter(std::vector<CrashRecord> records,
                                 double min_fraction,
                                 const FeatureDictionary& dict) {
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "min_fraction must lie in [0, 1]");
  }
  FilterResult out;
  for (auto& r : records) {
    if (completeness(r, dict) >= min_fraction) {
      out.kept.push_back(std::move(r));
    } else {
      out.dropped.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<CrashRecord> ingest(const SourceTables& tables,
                                const FeatureDictionary& dict,
                                double min_fraction, IngestReport& report) {
  auto joined = join_records(tables, dict, report);
  auto cleaned = clean_features(std::move(joined), dict);
  for (auto& u : cleaned.unknown_categories) {
    report.unknown_categories.push_back(std::move(u));
  }
  auto filtered =
      completeness_filter(std::move(cleaned.records), min_fraction, dict);
  report.records_built = filtered.kept.size();
  report.drop(kDropBelowCompleteness, filtered.dropped.size());
  return std::move(filtered.kept);
}

}  // namespace crashkit

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

#include "crashkit/record.h"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "crashkit/error.h"

namespace crashkit {
namespace {

using nlohmann::json;

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  const auto d = parse_double(s);
  if (!d || std::floor(*d) != *d || std::abs(*d) > 1e9) return std::nullopt;
  return static_cast<int>(*d);
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

void put(FieldView& view, const std::string& key, const Category& v) {
  if (v) view[key].push_back(*v);
}
void put(FieldView& view, const std::string& key,
         const std::optional<double>& v) {
  if (v) view[key].push_back(format_number(*v));
}
void put(FieldView& view, const std::string& key, const std::optional<int>& v) {
  if (v) view[key].push_back(format_number(*v));
}
void put(FieldView& view, const std::string& key,
         const std::optional<bool>& v) {
  if (v) view[key].push_back(format_bool(*v));
}

}  // namespace

std::optional<LocalDateTime> LocalDateTime::parse(std::string_view text) {
  LocalDateTime t;
  int sec = 0;
  char sep = 0;
  const std::string s(text);
  const int n = std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &t.year,
                            &t.month, &t.day, &sep, &t.hour, &t.minute, &sec);
  if (n < 6 || (sep != 'T' && sep != ' ')) return std::nullopt;
  if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 || t.hour < 0 ||
      t.hour > 23 || t.minute < 0 || t.minute > 59) {
    return std::nullopt;
  }
  return t;
}

std::string LocalDateTime::format() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d", year, month, day,
                hour, minute);
  return buf;
}

std::string format_number(double value) {
  if (std::floor(value) == value && std::abs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_bool(bool value) { return value ? "true" : "false"; }

std::optional<bool> parse_bool(std::string_view raw) {
  std::string v;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (v == "true" || v == "yes" || v == "y" || v == "1") return true;
  if (v == "false" || v == "no" || v == "n" || v == "0") return false;
  return std::nullopt;
}

FieldView record_view(const CrashRecord& r, const FeatureDictionary& dict) {
  FieldView all;
  const auto& g = r.general;
  if (g.crash_datetime) all["crash_datetime"].push_back(g.crash_datetime->format());
  put(all, "city", g.city);
  put(all, "route_id", g.route_id);
  put(all, "milepost", g.milepost);
  put(all, "road_type", g.road_type);
  put(all, "state_plane_easting", g.state_plane_easting);
  put(all, "state_plane_northing", g.state_plane_northing);
  const auto& inf = r.infrastructure;
  put(all, "lane_count", inf.lane_count);
  put(all, "speed_limit", inf.speed_limit);
  put(all, "work_zone", inf.work_zone);
  put(all, "lighting", inf.lighting);
  put(all, "road_surface", inf.road_surface);
  put(all, "intersection_related", inf.intersection_related);
  const auto& ev = r.event;
  put(all, "alcohol_involved", ev.alcohol_involved);
  put(all, "drug_involved", ev.drug_involved);
  for (const auto& f : ev.contributing_factors) {
    all["contributing_factors"].push_back(f);
  }
  for (const auto& [factor, value] : ev.narrative_facts) {
    all[factor].push_back(value);
  }
  for (const auto& u : r.units) {
    for (auto& [k, v] : unit_view(u)) {
      for (auto& s : v) all[k].push_back(std::move(s));
    }
  }

  FieldView view;
  for (const FieldSpec* f : dict.feature_fields()) {
    auto it = all.find(f->key);
    auto& slot = view[f->key];
    if (it == all.end()) continue;
    if (f->scope == FieldScope::kRecord || f->scope == FieldScope::kNarrative) {
      slot.push_back(it->second.front());
    } else {
      slot = it->second;
    }
  }
  return view;
}

FieldView unit_view(const UnitInfo& u) {
  FieldView view;
  put(view, "unit_kind", u.unit_kind);
  put(view, "vehicle_type", u.vehicle_type);
  put(view, "driver_age", u.driver_age);
  put(view, "driver_gender", u.driver_gender);
  put(view, "action", u.action);
  return view;
}

bool assign_unit_field(UnitInfo& u, std::string_view key,
                       std::string_view raw) {
  const bool missing = raw.empty();
  auto cat = [&](Category& slot) {
    slot = missing ? Category{} : Category{std::string(raw)};
    return true;
  };
  if (key == "unit_kind") return cat(u.unit_kind);
  if (key == "vehicle_type") return cat(u.vehicle_type);
  if (key == "driver_gender") return cat(u.driver_gender);
  if (key == "action") return cat(u.action);
  if (key == "driver_age") {
    if (missing) {
      u.driver_age.reset();
      return true;
    }
    const auto v = parse_int(raw);
    if (!v) return false;
    u.driver_age = *v;
    return true;
  }
  return false;
}

bool assign_field(CrashRecord& r, std::string_view key, std::string_view raw,
                  const FeatureDictionary& dict) {
  const bool missing = raw.empty();
  auto cat = [&](Category& slot) {
    slot = missing ? Category{} : Category{std::string(raw)};
    return true;
  };
  auto num = [&](auto& slot) {
    using T = typename std::decay_t<decltype(slot)>::value_type;
    if (missing) {
      slot.reset();
      return true;
    }
    if constexpr (std::is_same_v<T, int>) {
      const auto v = parse_int(raw);
      if (!v) return false;
      slot = *v;
    } else {
      const auto v = parse_double(raw);
      if (!v) return false;
      slot = *v;
    }
    return true;
  };
  auto flag = [&](std::optional<bool>& slot) {
    if (missing) {
      slot.reset();
      return true;
    }
    const auto v = parse_bool(raw);
    if (!v) return false;
    slot = *v;
    return true;
  };

  auto& g = r.general;
  auto& inf = r.infrastructure;
  auto& ev = r.event;
  if (key == "case_id") {
    r.case_id = std::string(raw);
    return true;
  }
  if (key == "crash_datetime") {
    if (missing) {
      g.crash_datetime.reset();
      return true;
    }
    const auto t = LocalDateTime::parse(raw);
    if (!t) return false;
    g.crash_datetime = *t;
    return true;
  }
  if (key == "city") return cat(g.city);
  if (key == "route_id") return cat(g.route_id);
  if (key == "milepost") return num(g.milepost);
  if (key == "road_type") return cat(g.road_type);
  if (key == "state_plane_easting") return num(g.state_plane_easting);
  if (key == "state_plane_northing") return num(g.state_plane_northing);
  if (key == "lane_count") return num(inf.lane_count);
  if (key == "speed_limit") return num(inf.speed_limit);
  if (key == "work_zone") return flag(inf.work_zone);
  if (key == "lighting") return cat(inf.lighting);
  if (key == "road_surface") return cat(inf.road_surface);
  if (key == "intersection_related") return flag(inf.intersection_related);
  if (key == "alcohol_involved") return flag(ev.alcohol_involved);
  if (key == "drug_involved") return flag(ev.drug_involved);
  if (key == "contributing_factors") {
    ev.contributing_factors.clear();
    std::size_t start = 0;
    while (!missing && start <= raw.size()) {
      auto end = raw.find(';', start);
      if (end == std::string_view::npos) end = raw.size();
      auto item = raw.substr(start, end - start);
      if (!item.empty()) ev.contributing_factors.emplace_back(item);
      start = end + 1;
    }
    return true;
  }
  if (const FieldSpec* f = dict.find(key);
      f && f->scope == FieldScope::kNarrative) {
    auto& facts = ev.narrative_facts;
    auto it = std::find_if(facts.begin(), facts.end(),
                           [&](const auto& p) { return p.first == key; });
    if (missing) {
      if (it != facts.end()) facts.erase(it);
    } else if (it != facts.end()) {
      it->second = std::string(raw);
    } else {
      facts.emplace_back(std::string(key), std::string(raw));
    }
    return true;
  }
  return false;
}

double completeness(const CrashRecord& record, const FeatureDictionary& dict) {
  const auto view = record_view(record, dict);
  if (view.empty()) return 1.0;
  std::size_t present = 0;
  for (const auto& [_, values] : view) present += values.empty() ? 0 : 1;
  return static_cast<double>(present) / static_cast<double>(view.size());
}

json to_json(const CrashRecord& r) {
  json j;
  j["case_id"] = r.case_id;
  const auto& g = r.general;
  j["general"] = {
      {"crash_datetime",
       g.crash_datetime ? json(g.crash_datetime->format()) : json(nullptr)},
      {"city", opt(g.city)},
      {"route_id", opt(g.route_id)},
      {"milepost", opt(g.milepost)},
      {"road_type", opt(g.road_type)},
      {"state_plane_easting", opt(g.state_plane_easting)},
      {"state_plane_northing", opt(g.state_plane_northing)},
  };
  const auto& inf = r.infrastructure;
  j["infrastructure"] = {
      {"lane_count", opt(inf.lane_count)},
      {"speed_limit", opt(inf.speed_limit)},
      {"work_zone", opt(inf.work_zone)},
      {"lighting", opt(inf.lighting)},
      {"road_surface", opt(inf.road_surface)},
      {"intersection_related", opt(inf.intersection_related)},
  };
  json facts = json::array();
  for (const auto& [k, v] : r.event.narrative_facts) facts.push_back({k, v});
  j["event"] = {
      {"narrative_facts", facts},
      {"alcohol_involved", opt(r.event.alcohol_involved)},
      {"drug_involved", opt(r.event.drug_involved)},
      {"contributing_factors", r.event.contributing_factors},
  };
  json units = json::array();
  for (const auto& u : r.units) {
    units.push_back({
        {"unit_kind", opt(u.unit_kind)},
        {"vehicle_type", opt(u.vehicle_type)},
        {"driver_age", opt(u.driver_age)},
        {"driver_gender", opt(u.driver_gender)},
        {"action", opt(u.action)},
    });
  }
  j["units"] = units;
  j["labels"] = {
      {"injured_count", r.labels.injured_count},
      {"severity", std::string(code(r.labels.severity))},
      {"accident_type", std::string(abbr(r.labels.accident_type))},
  };
  return j;
}

CrashRecord record_from_json(const json& j) {
  try {
    CrashRecord r;
    r.case_id = j.at("case_id").get<std::string>();
    const auto& g = j.at("general");
    if (auto t = get_opt<std::string>(g, "crash_datetime")) {
      r.general.crash_datetime = LocalDateTime::parse(*t);
    }
    r.general.city = get_opt<std::string>(g, "city");
    r.general.route_id = get_opt<std::string>(g, "route_id");
    r.general.milepost = get_opt<double>(g, "milepost");
    r.general.road_type = get_opt<std::string>(g, "road_type");
    r.general.state_plane_easting = get_opt<double>(g, "state_plane_easting");
    r.general.state_plane_northing =
        get_opt<double>(g, "state_plane_northing");
    const auto& inf = j.at("infrastructure");
    r.infrastructure.lane_count = get_opt<int>(inf, "lane_count");
    r.infrastructure.speed_limit = get_opt<int>(inf, "speed_limit");
    r.infrastructure.work_zone = get_opt<bool>(inf, "work_zone");
    r.infrastructure.lighting = get_opt<std::string>(inf, "lighting");
    r.infrastructure.road_surface = get_opt<std::string>(inf, "road_surface");
    r.infrastructure.intersection_related =
        get_opt<bool>(inf, "intersection_related");
    const auto& ev = j.at("event");
    for (const auto& p : ev.at("narrative_facts")) {
      r.event.narrative_facts.emplace_back(p.at(0).get<std::string>(),
                                           p.at(1).get<std::string>());
    }
    r.event.alcohol_involved = get_opt<bool>(ev, "alcohol_involved");
    r.event.drug_involved = get_opt<bool>(ev, "drug_involved");
    r.event.contributing_factors =
        ev.at("contributing_factors").get<std::vector<std::string>>();
    for (const auto& u : j.at("units")) {
      UnitInfo unit;
      unit.unit_kind = get_opt<std::string>(u, "unit_kind");
      unit.vehicle_type = get_opt<std::string>(u, "vehicle_type");
      unit.driver_age = get_opt<int>(u, "driver_age");
      unit.driver_gender = get_opt<std::string>(u, "driver_gender");
      unit.action = get_opt<std::string>(u, "action");
      r.units.push_back(std::move(unit));
    }
    const auto& l = j.at("labels");
    r.labels.injured_count = l.at("injured_count").get<std::uint32_t>();
    r.labels.severity =
        severity_from_code(l.at("severity").get<std::string>());
    r.labels.accident_type =
        accident_type_from_abbr(l.at("accident_type").get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad record: ") + e.what());
  }
}

std::string to_jsonl(const std::vector<CrashRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<CrashRecord> records_from_jsonl(std::string_view text) {
  std::vector<CrashRecord> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    out.push_back(record_from_json(j));
  }
  return out;
}

}  // namespace crashkit

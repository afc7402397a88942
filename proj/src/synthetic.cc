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

#include "crashkit/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include "crashkit/error.h"
#include "crashkit/geo.h"
#include "crashkit/hashing.h"
#include "crashkit/table.h"

namespace crashkit {
namespace {

constexpr std::uint64_t kNetworkStream = 0x6e6574ULL << 40;

constexpr std::array<const char*, 12> kCities = {
    "vancouver",  "olympia",     "yakima",     "kennewick",
    "pasco",      "richland",    "walla_walla", "longview",
    "centralia",  "ellensburg",  "aberdeen",   "chehalis"};

struct RouteDef {
  const char* id;
  const char* road_type;
  double length;
};

constexpr std::array<RouteDef, 14> kRoutes = {{
    {"I-5", "interstate", 180},      {"I-82", "interstate", 130},
    {"I-205", "interstate", 40},     {"US-12", "us_route", 220},
    {"US-97", "us_route", 120},      {"US-101", "us_route", 150},
    {"US-395", "us_route", 90},      {"SR-14", "state_route", 180},
    {"SR-24", "state_route", 80},    {"SR-500", "state_route", 20},
    {"CR-1120", "county_road", 30},  {"CR-2210", "county_road", 25},
    {"CS-0101", "city_street", 8},   {"CS-0207", "city_street", 6},
}};

constexpr double kSegmentLength = 5.0;

template <std::size_t N>
std::size_t pick(CounterRng& rng, const std::array<double, N>& w) {
  return rng.categorical(std::span<const double>(w));
}

double round_to(double v, double step) { return std::round(v / step) * step; }

std::vector<RoadSegment> build_network(std::uint64_t seed) {
  std::vector<RoadSegment> out;
  CounterRng rng(seed, kNetworkStream);
  for (const auto& route : kRoutes) {
    const std::string type = route.road_type;
    for (double b = 0; b < route.length; b += kSegmentLength) {
      RoadSegment s;
      s.route_id = route.id;
      s.begin_milepost = b;
      s.end_milepost = std::min(b + kSegmentLength, route.length);
      s.road_type = type;
      if (type == "interstate") {
        s.lane_count = 4 + 2 * static_cast<int>(rng.below(2));
        s.speed_limit = rng.bernoulli(0.7) ? 70 : 60;
      } else if (type == "us_route") {
        s.lane_count = 2 + 2 * static_cast<int>(rng.below(2));
        s.speed_limit = std::array{50, 55, 60}[rng.below(3)];
      } else if (type == "state_route") {
        s.lane_count = 2 + static_cast<int>(rng.below(3));
        s.speed_limit = std::array{40, 45, 50, 55, 60}[rng.below(5)];
      } else if (type == "county_road") {
        s.lane_count = 2;
        s.speed_limit = std::array{35, 45, 50}[rng.below(3)];
      } else {
        s.lane_count = 2 + 2 * static_cast<int>(rng.below(2));
        s.speed_limit = std::array{25, 30, 35}[rng.below(3)];
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Applies every effect of `task` whose factor holds.
void plant(std::vector<double>& probs, Task task, const CrashRecord& r,
           const std::vector<PlantedEffect>& effects) {
  double total = 0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
  for (const auto& e : effects) {
    if (e.task != task || !base_predicate(r, e.factor)) continue;
    const double old = probs[e.class_index];
    const double boosted = std::min(old * e.multiplier, 0.95);
    const double rest = 1.0 - old;
    const double scale = rest > 0 ? (1.0 - boosted) / rest : 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      probs[i] = (i == e.class_index) ? boosted : probs[i] * scale;
    }
  }
}

template <typename T>
void maybe_missing(CounterRng& rng, std::optional<T>& slot, double p = 0.03) {
  if (rng.bernoulli(p)) slot.reset();
}

CrashRecord generate_one(std::size_t index, const SyntheticSpec& spec,
                         const std::vector<RoadSegment>& network) {
  CounterRng rng(spec.seed, index);
  CrashRecord r;
  char id[32];
  std::snprintf(id, sizeof(id), "WA%02d-%06zu", spec.year % 100, index + 1);
  r.case_id = id;

  // General.
  LocalDateTime t;
  t.year = spec.year;
  t.month = 1 + static_cast<int>(rng.below(12));
  t.day = 1 + static_cast<int>(rng.below(28));
  t.hour = static_cast<int>(pick(
      rng, std::array<double, 24>{1, 1, 1, 1, 1, 2, 4, 6, 6, 4, 4, 5,
                                  5, 5, 6, 7, 8, 8, 6, 4, 3, 2, 2, 1}));
  t.minute = static_cast<int>(rng.below(60));
  r.general.crash_datetime = t;

  const auto route_idx = pick(
      rng, std::array<double, 14>{14, 8, 4, 7, 5, 5, 4, 7, 4, 3, 4, 3, 9, 7});
  const RouteDef& route = kRoutes[route_idx];
  const double mp = round_to(rng.uniform() * route.length, 0.01);
  const RoadSegment* seg = nullptr;
  for (const auto& s : network) {
    if (s.route_id == route.id && s.begin_milepost <= mp &&
        mp < s.end_milepost) {
      seg = &s;
      break;
    }
  }
  r.general.route_id = route.id;
  r.general.milepost = mp;
  r.general.city = kCities[rng.below(kCities.size())];
  r.general.road_type = route.road_type;
  const double lat = 45.6 + rng.uniform() * 1.7;
  const double lon = -123.9 + rng.uniform() * 6.8;
  const auto xy = geo::lcc_forward({lat, lon});
  r.general.state_plane_easting = round_to(xy.easting, 0.01);
  r.general.state_plane_northing = round_to(xy.northing, 0.01);
  maybe_missing(rng, r.general.city);
  maybe_missing(rng, r.general.road_type);

  // Infrastructure.
  auto& inf = r.infrastructure;
  if (seg) {
    inf.lane_count = seg->lane_count;
    inf.speed_limit = seg->speed_limit;
  }
  const std::string type = route.road_type;
  const bool urban = type == "city_street";
  inf.work_zone = rng.bernoulli(0.07);
  static constexpr const char* kLighting[] = {
      "daylight", "dark_street_lights_on", "dark_no_street_lights", "dawn",
      "dusk"};
  inf.lighting = kLighting[pick(
      rng, urban ? std::array<double, 5>{60, 28, 2, 5, 5}
                 : std::array<double, 5>{60, 8, 22, 5, 5})];
  static constexpr const char* kSurface[] = {"dry", "wet", "icy", "snow",
                                             "other"};
  inf.road_surface =
      kSurface[pick(rng, std::array<double, 5>{66, 17, 11, 4, 2})];
  inf.intersection_related = rng.bernoulli(urban ? 0.55 : 0.2);
  maybe_missing(rng, inf.lighting);
  maybe_missing(rng, inf.intersection_related);
  maybe_missing(rng, inf.road_surface, 0.02);

  // Event.
  auto& ev = r.event;
  ev.alcohol_involved = rng.bernoulli(0.075);
  ev.drug_involved = rng.bernoulli(0.03);
  const std::string surface = inf.road_surface.value_or("dry");
  static constexpr const char* kWeather[] = {"clear",   "overcast", "raining",
                                             "snowing", "fog",      "sleet"};
  std::array<double, 6> weather_w{55, 25, 10, 2, 5, 3};
  if (surface == "wet") weather_w = {10, 25, 60, 0, 5, 0};
  if (surface == "icy") weather_w = {35, 25, 0, 20, 10, 10};
  if (surface == "snow") weather_w = {10, 15, 0, 65, 5, 5};
  ev.narrative_facts.emplace_back("weather", kWeather[pick(rng, weather_w)]);
  const bool at_intersection = inf.intersection_related.value_or(false);
  static constexpr const char* kControl[] = {"signal", "stop_sign",
                                             "yield_sign", "no_control"};
  ev.narrative_facts.emplace_back(
      "traffic_control",
      kControl[pick(rng, at_intersection ? std::array<double, 4>{50, 30, 10, 10}
                                         : std::array<double, 4>{3, 2, 1, 94})]);
  static constexpr const char* kJunction[] = {
      "not_at_junction", "four_way_intersection", "t_intersection", "driveway",
      "ramp"};
  ev.narrative_facts.emplace_back(
      "junction_type",
      kJunction[pick(rng, at_intersection
                              ? std::array<double, 5>{0, 60, 30, 5, 5}
                              : std::array<double, 5>{80, 0, 0, 12, 8})]);
  static constexpr const char* kAlignment[] = {"straight_level",
                                               "straight_grade", "curve_level",
                                               "curve_grade"};
  ev.narrative_facts.emplace_back(
      "roadway_alignment",
      kAlignment[pick(rng, std::array<double, 4>{55, 15, 20, 10})]);
  if (rng.bernoulli(0.03)) ev.narrative_facts.erase(ev.narrative_facts.begin());

  static constexpr const char* kFactors[] = {
      "exceeding_safe_speed", "distraction",          "failure_to_yield",
      "following_too_closely", "improper_lane_change", "inattention",
      "over_center_line",     "fatigue"};
  const std::size_t n_factors = pick(rng, std::array<double, 3>{35, 45, 20});
  for (std::size_t i = 0; i < n_factors; ++i) {
    const std::string f = kFactors[rng.below(std::size(kFactors))];
    if (std::find(ev.contributing_factors.begin(),
                  ev.contributing_factors.end(),
                  f) == ev.contributing_factors.end()) {
      ev.contributing_factors.push_back(f);
    }
  }
  if (*ev.alcohol_involved) ev.contributing_factors.push_back("alcohol_impairment");
  if (*ev.drug_involved) ev.contributing_factors.push_back("drug_impairment");
  if (ev.contributing_factors.empty()) {
    ev.contributing_factors.push_back("none_apparent");
  }
  maybe_missing(rng, ev.drug_involved);

  // Units.
  const std::size_t vehicles = 1 + pick(rng, std::array<double, 3>{38, 48, 14});
  const bool pedestrian = vehicles == 1 && rng.bernoulli(urban ? 0.25 : 0.06);
  const bool cyclist =
      vehicles == 1 && !pedestrian && rng.bernoulli(urban ? 0.15 : 0.04);
  static constexpr const char* kVehicle[] = {"passenger_car", "pickup_truck",
                                             "suv",           "motorcycle",
                                             "heavy_truck",   "bus"};
  static constexpr const char* kAction[] = {
      "going_straight", "turning_left", "turning_right", "changing_lanes",
      "slowing_or_stopped", "backing", "crossing_road", "parked"};
  bool motorcycle = false;
  for (std::size_t v = 0; v < vehicles; ++v) {
    UnitInfo u;
    u.unit_kind = "vehicle";
    u.vehicle_type = kVehicle[pick(rng, std::array<double, 6>{45, 20, 22, 5, 6, 2})];
    motorcycle = motorcycle || *u.vehicle_type == "motorcycle";
    u.driver_age = 16 + static_cast<int>(rng.below(70));
    u.driver_gender = rng.bernoulli(0.58) ? "male" : "female";
    u.action = kAction[pick(
        rng, at_intersection ? std::array<double, 8>{40, 25, 15, 2, 15, 3, 0, 0}
                             : std::array<double, 8>{55, 5, 5, 12, 18, 2, 0, 3})];
    maybe_missing(rng, u.driver_age, 0.06);
    maybe_missing(rng, u.driver_gender, 0.05);
    r.units.push_back(std::move(u));
  }
  if (pedestrian || cyclist) {
    UnitInfo u;
    u.unit_kind = pedestrian ? "pedestrian" : "cyclist";
    u.driver_age = 8 + static_cast<int>(rng.below(75));
    if (*u.driver_age < 10) u.driver_age.reset();
    u.driver_gender = rng.bernoulli(0.55) ? "male" : "female";
    u.action = pedestrian ? "crossing_road" : "going_straight";
    r.units.push_back(std::move(u));
  }

  // Labels.
  const int speed = inf.speed_limit.value_or(45);
  const bool fast = speed >= 55;
  const bool single = vehicles == 1 && !pedestrian && !cyclist;

  // Order: SVO AIR Oth SL FEC REC OT AC PC SR PCC HOC OR AIL.
  std::vector<double> at(14, 0.0);
  if (pedestrian) {
    at = {1, 1, 2, 0, 1, 1, 0, 0, 85, 0, 1, 0, 1, 1};
  } else if (cyclist) {
    at = {1, 2, 2, 1, 1, 1, 0, 0, 0, 1, 85, 0, 1, 2};
  } else if (single) {
    at = fast ? std::vector<double>{20, 0, 4, 0, 0, 0, 28, 12, 0, 0, 0, 0, 36, 0}
              : std::vector<double>{38, 0, 8, 0, 0, 0, 10, 6, 0, 0, 0, 0, 38, 0};
  } else if (at_intersection) {
    at = {1, 30, 4, 3, 5, 14, 1, 0, 0, 3, 0, 3, 1, 35};
  } else {
    at = {1, 3, 5, 10, 3, 48, 2, 1, 0, 11, 0, fast ? 10.0 : 4.0, 3, 3};
  }
  plant(at, Task::kAccidentType, r, spec.effects);
  r.labels.accident_type =
      static_cast<AccidentType>(rng.categorical(std::span<const double>(at)) + 1);

  // O C B A K.
  std::vector<double> sev = {55, 22, 14, 6, 3};
  if (fast) sev = {45, 23, 17, 10, 5};
  if (pedestrian || cyclist) sev = {8, 20, 32, 26, 14};
  if (motorcycle) sev = {12, 20, 30, 25, 13};
  if (r.labels.accident_type == AccidentType::kHOC ||
      r.labels.accident_type == AccidentType::kOT) {
    for (std::size_t i = 0; i < 5; ++i) sev[i] *= 1.0 + 0.4 * i;
  }
  plant(sev, Task::kSeverity, r, spec.effects);
  r.labels.severity =
      static_cast<Severity>(rng.categorical(std::span<const double>(sev)) + 1);

  // ZERO ONE TWO THREE_OR_MORE.
  std::vector<double> inj;
  switch (r.labels.severity) {
    case Severity::kO: inj = {92, 6, 1.5, 0.5}; break;
    case Severity::kC: inj = {5, 62, 22, 11}; break;
    case Severity::kB: inj = {3, 52, 28, 17}; break;
    case Severity::kA: inj = {2, 45, 30, 23}; break;
    case Severity::kK: inj = {20, 30, 25, 25}; break;
  }
  if (r.units.size() >= 3) {
    inj[2] *= 1.5;
    inj[3] *= 2.0;
  }
  plant(inj, Task::kInjury, r, spec.effects);
  const auto bucket = rng.categorical(std::span<const double>(inj));
  std::uint32_t injured = static_cast<std::uint32_t>(bucket);
  if (bucket == 3) {
    while (rng.bernoulli(0.35) && injured < 12) ++injured;
  }
  r.labels.injured_count = injured;
  return r;
}

}  // namespace

std::vector<PlantedEffect> SyntheticSpec::default_effects() {
  return {
      {Factor::kIcyRoad, Task::kAccidentType,
       static_cast<std::size_t>(AccidentType::kOT) - 1, 3.0},
      {Factor::kAlcohol, Task::kSeverity,
       static_cast<std::size_t>(Severity::kA) - 1, 2.0},
      {Factor::kWorkZone, Task::kInjury,
       static_cast<std::size_t>(InjuryBucket::kThreeOrMore), 1.5},
  };
}

void SyntheticSpec::validate() const {
  for (const auto& e : effects) {
    if (!(e.multiplier > 0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "effect multipliers must be positive");
    }
    if (e.class_index >= class_count(e.task)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "effect class index out of range for its task");
    }
  }
  if (year < 1900 || year > 2999) {
    throw Error(ErrorCode::kInvalidArgument, "year out of range");
  }
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  corpus.network = build_network(spec.seed);
  corpus.records.reserve(spec.n_records);
  for (std::size_t i = 0; i < spec.n_records; ++i) {
    corpus.records.push_back(generate_one(i, spec, corpus.network));
  }
  return corpus;
}

void write_source_tables(const SyntheticCorpus& corpus,
                         const std::filesystem::path& dir) {
  auto opt_num = [](const auto& v) {
    return v ? format_number(static_cast<double>(*v)) : std::string();
  };
  auto opt_bool = [](const std::optional<bool>& v) {
    return v ? format_bool(*v) : std::string();
  };
  auto line = [](std::initializer_list<std::string> cells) {
    std::string out;
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out += ',';
      out += quote_cell(c, ',');
      first = false;
    }
    return out + "\n";
  };

  std::string crash = line(
      {"report_number", "crash_datetime", "city", "route_id", "milepost",
       "road_type", "state_plane_easting", "state_plane_northing", "work_zone",
       "lighting", "road_surface", "intersection_related", "alcohol_involved",
       "drug_involved", "contributing_factors", "weather", "traffic_control",
       "junction_type", "roadway_alignment", "injured_count", "severity",
       "accident_type"});
  std::string unit =
      line({"report_number", "unit_number", "unit_kind", "vehicle_type",
            "action"});
  std::string person =
      line({"report_number", "unit_number", "driver_age", "driver_gender"});
  for (const auto& r : corpus.records) {
    std::map<std::string, std::string> facts(r.event.narrative_facts.begin(),
                                             r.event.narrative_facts.end());
    std::string factors;
    for (const auto& f : r.event.contributing_factors) {
      if (!factors.empty()) factors += ';';
      factors += f;
    }
    const auto& g = r.general;
    const auto& inf = r.infrastructure;
    crash += line({r.case_id,
                   g.crash_datetime ? g.crash_datetime->format() : "",
                   g.city.value_or(""), g.route_id.value_or(""),
                   opt_num(g.milepost), g.road_type.value_or(""),
                   opt_num(g.state_plane_easting),
                   opt_num(g.state_plane_northing), opt_bool(inf.work_zone),
                   inf.lighting.value_or(""), inf.road_surface.value_or(""),
                   opt_bool(inf.intersection_related),
                   opt_bool(r.event.alcohol_involved),
                   opt_bool(r.event.drug_involved), factors, facts["weather"],
                   facts["traffic_control"], facts["junction_type"],
                   facts["roadway_alignment"],
                   std::to_string(r.labels.injured_count),
                   std::to_string(ordinal(r.labels.severity)),
                   std::to_string(id(r.labels.accident_type))});
    for (std::size_t u = 0; u < r.units.size(); ++u) {
      const auto& x = r.units[u];
      const auto n = std::to_string(u + 1);
      unit += line({r.case_id, n, x.unit_kind.value_or(""),
                    x.vehicle_type.value_or(""), x.action.value_or("")});
      person += line({r.case_id, n, opt_num(x.driver_age),
                      x.driver_gender.value_or("")});
    }
  }
  std::string road = line({"route_id", "begin_milepost", "end_milepost",
                           "lane_count", "speed_limit", "functional_class"});
  for (const auto& s : corpus.network) {
    road += line({s.route_id, format_number(s.begin_milepost),
                  format_number(s.end_milepost), std::to_string(s.lane_count),
                  std::to_string(s.speed_limit), s.road_type});
  }
  write_file(dir / "crash.csv", crash);
  write_file(dir / "road.csv", road);
  write_file(dir / "unit.csv", unit);
  write_file(dir / "person.csv", person);
}

}  // namespace crashkit

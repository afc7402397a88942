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

#ifndef CRASHKIT_SYNTHETIC_H_
#define CRASHKIT_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crashkit/labels.h"
#include "crashkit/random.h"
#include "crashkit/record.h"
#include "crashkit/whatif.h"

namespace crashkit {

// A planted conditional effect: when `factor` holds, the probability of
// class `class_index` of `task` is multiplied by `multiplier` (capped at
// 0.95) and the other classes are rescaled to keep the total at 1.
struct PlantedEffect {
  Factor factor = Factor::kIcyRoad;
  Task task = Task::kAccidentType;
  std::size_t class_index = 0;
  double multiplier = 1.0;
};

struct SyntheticSpec {
  std::size_t n_records = 20000;
  std::uint64_t seed = kDefaultSeed;
  std::vector<PlantedEffect> effects = default_effects();
  int year = 2022;

  // icy -> overturn x3, alcohol -> serious injury x2,
  // work zone -> three or more injured x1.5.
  static std::vector<PlantedEffect> default_effects();
  void validate() const;  // throws kInvalidArgument
};

// Road segment of the synthetic network; ingest joins crashes to these.
struct RoadSegment {
  std::string route_id;
  double begin_milepost = 0;
  double end_milepost = 0;
  int lane_count = 0;
  int speed_limit = 0;
  std::string road_type;
};

struct SyntheticCorpus {
  std::vector<RoadSegment> network;
  std::vector<CrashRecord> records;
};

// Records are clean (clean_features leaves them unchanged), ordered by case
// id, and each is a pure function of (seed, index).
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

// Writes crash.csv, road.csv, unit.csv, person.csv in the raw schemas of
// the feature dictionary, so a corpus can be fed back through ingest.
void write_source_tables(const SyntheticCorpus& corpus,
                         const std::filesystem::path& dir);

}  // namespace crashkit

#endif  // CRASHKIT_SYNTHETIC_H_

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

#include "crashkit/labels.h"

#include <array>

#include "crashkit/error.h"

namespace crashkit {
namespace {

struct SeverityRow {
  std::string_view code;
  std::string_view name;
  std::string_view token;
};

constexpr std::array<SeverityRow, 5> kSeverity = {{
    {"O", "No Apparent Injury", "<NO APPARENT INJURY>"},
    {"C", "Possible Injury", "<POSSIBLE INJURY>"},
    {"B", "Minor Injury", "<MINOR INJURY>"},
    {"A", "Serious Injury", "<SERIOUS INJURY>"},
    {"K", "Fatal", "<FATAL>"},
}};

struct AccidentTypeRow {
  std::string_view abbr;
  std::string_view name;
  std::string_view token;
};

constexpr std::array<AccidentTypeRow, 14> kAccidentType = {{
    {"SVO", "Single Vehicle With Object", "<SINGLE VEHICLE WITH OBJECT>"},
    {"AIR", "Angle Impacts Right", "<ANGLE IMPACTS_RIGHT>"},
    {"Oth", "Other", "<OTHER>"},
    {"SL", "Sidewipes Left", "<SIDESWIPES_LEFT>"},
    {"FEC", "Front End Collision", "<FRONT END COLLISIONS>"},
    {"REC", "Rear End Collision", "<REAR END COLLISIONS>"},
    {"OT", "Overturn", "<OVERTURN>"},
    {"AC", "Animal Collision", "<ANIMAL COLLISIONS>"},
    {"PC", "Pedestrian Collision", "<PEDESTRIAN COLLISIONS>"},
    {"SR", "Sidewipes Right", "<SIDESWIPES_RIGHT>"},
    {"PCC", "Pedal Cyclist Collision", "<PEDALCYCLIST COLLISIONS>"},
    {"HOC", "Head On Collision", "<HEAD ON COLLISIONS>"},
    {"OR", "Off Road", "<OFF ROAD>"},
    {"AIL", "Angle Impact Left", "<ANGLE IMPACTS_LEFT>"},
}};

struct BucketRow {
  std::string_view name;
  std::string_view token;
};

constexpr std::array<BucketRow, 4> kBucket = {{
    {"ZERO", "<ZERO>"},
    {"ONE", "<ONE>"},
    {"TWO", "<TWO>"},
    {"THREE_OR_MORE", "<THREE OR MORE>"},
}};

const SeverityRow& row(Severity s) {
  return kSeverity[static_cast<int>(s) - 1];
}
const AccidentTypeRow& row(AccidentType t) {
  return kAccidentType[static_cast<int>(t) - 1];
}

}  // namespace

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kInjury: return "injury";
    case Task::kSeverity: return "severity";
    case Task::kAccidentType: return "accident_type";
  }
  return "";
}

Task task_from_name(std::string_view name) {
  for (Task t : kAllTasks) {
    if (task_name(t) == name) return t;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown task '" + std::string(name) + "'");
}

InjuryBucket bucket_injuries(std::uint32_t injured) {
  if (injured >= 3) return InjuryBucket::kThreeOrMore;
  return static_cast<InjuryBucket>(injured);
}

std::string_view bucket_name(InjuryBucket bucket) {
  return kBucket[static_cast<int>(bucket)].name;
}

std::string_view token(InjuryBucket bucket) {
  return kBucket[static_cast<int>(bucket)].token;
}

Severity severity_from_ordinal(int ordinal) {
  if (ordinal < 1 || ordinal > 5) {
    throw Error(ErrorCode::kOutOfRange,
                "severity ordinal " + std::to_string(ordinal) +
                    " outside 1..5");
  }
  return static_cast<Severity>(ordinal);
}

Severity severity_from_code(std::string_view c) {
  for (int i = 0; i < 5; ++i) {
    if (kSeverity[i].code == c) return static_cast<Severity>(i + 1);
  }
  throw Error(ErrorCode::kOutOfRange,
              "unknown severity code '" + std::string(c) + "'");
}

int ordinal(Severity severity) { return static_cast<int>(severity); }
std::string_view code(Severity severity) { return row(severity).code; }
std::string_view name(Severity severity) { return row(severity).name; }
std::string_view token(Severity severity) { return row(severity).token; }

AccidentType accident_type_from_id(int id) {
  if (id < 1 || id > 14) {
    throw Error(ErrorCode::kOutOfRange,
                "accident type id " + std::to_string(id) + " outside 1..14");
  }
  return static_cast<AccidentType>(id);
}

AccidentType accident_type_from_abbr(std::string_view a) {
  for (int i = 0; i < 14; ++i) {
    if (kAccidentType[i].abbr == a) return static_cast<AccidentType>(i + 1);
  }
  throw Error(ErrorCode::kOutOfRange,
              "unknown accident type '" + std::string(a) + "'");
}

int id(AccidentType type) { return static_cast<int>(type); }
std::string_view abbr(AccidentType type) { return row(type).abbr; }
std::string_view name(AccidentType type) { return row(type).name; }
std::string_view token(AccidentType type) { return row(type).token; }

std::string format_crash_result(const Labels& labels) {
  std::string out(abbr(labels.accident_type));
  out += '_';
  out += code(labels.severity);
  out += '^';
  out += bucket_name(bucket_injuries(labels.injured_count));
  return out;
}

std::size_t class_count(Task task) {
  switch (task) {
    case Task::kInjury: return kBucket.size();
    case Task::kSeverity: return kSeverity.size();
    case Task::kAccidentType: return kAccidentType.size();
  }
  return 0;
}

std::vector<std::string> class_tokens(Task task) {
  std::vector<std::string> out;
  switch (task) {
    case Task::kInjury:
      for (const auto& r : kBucket) out.emplace_back(r.token);
      break;
    case Task::kSeverity:
      for (const auto& r : kSeverity) out.emplace_back(r.token);
      break;
    case Task::kAccidentType:
      for (const auto& r : kAccidentType) out.emplace_back(r.token);
      break;
  }
  return out;
}

std::vector<std::string> class_names(Task task) {
  std::vector<std::string> out;
  switch (task) {
    case Task::kInjury:
      for (const auto& r : kBucket) out.emplace_back(r.name);
      break;
    case Task::kSeverity:
      for (const auto& r : kSeverity) out.emplace_back(r.code);
      break;
    case Task::kAccidentType:
      for (const auto& r : kAccidentType) out.emplace_back(r.abbr);
      break;
  }
  return out;
}

std::size_t class_index(const Labels& labels, Task task) {
  switch (task) {
    case Task::kInjury:
      return static_cast<std::size_t>(bucket_injuries(labels.injured_count));
    case Task::kSeverity:
      return static_cast<std::size_t>(labels.severity) - 1;
    case Task::kAccidentType:
      return static_cast<std::size_t>(labels.accident_type) - 1;
  }
  return 0;
}

std::optional<std::size_t> parse_token(Task task, std::string_view text) {
  const auto tokens = class_tokens(task);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == text) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> scan_token(Task task, std::string_view text) {
  constexpr std::string_view kAnswer = "The answer is:";
  const auto tokens = class_tokens(task);
  auto earliest = [&](std::size_t from) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    std::size_t best_pos = std::string_view::npos;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto pos = text.find(tokens[i], from);
      if (pos < best_pos) {
        best_pos = pos;
        best = i;
      }
    }
    return best;
  };
  if (const auto at = text.find(kAnswer); at != std::string_view::npos) {
    if (auto hit = earliest(at + kAnswer.size())) return hit;
  }
  return earliest(0);
}

std::vector<std::string> label_vocabulary() {
  std::vector<std::string> out;
  for (Task t : kAllTasks) {
    for (auto& tok : class_tokens(t)) out.push_back(std::move(tok));
  }
  for (const auto& r : kSeverity) out.emplace_back(r.name);
  for (const auto& r : kAccidentType) out.emplace_back(r.name);
  return out;
}

}  // namespace crashkit

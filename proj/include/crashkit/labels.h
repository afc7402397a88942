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

#ifndef CRASHKIT_LABELS_H_
#define CRASHKIT_LABELS_H_

// Label codecs for the three prediction tasks. Every label has a 0-based
// class index (used by models and metrics), a human name, and a special-token
// spelling shared byte-for-byte with the fine-tuning adapter.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crashkit {

enum class Task { kInjury, kSeverity, kAccidentType };

inline constexpr Task kAllTasks[] = {Task::kInjury, Task::kSeverity,
                                     Task::kAccidentType};

std::string_view task_name(Task task);
// Accepts "injury", "severity", "accident_type". Throws kInvalidArgument.
Task task_from_name(std::string_view name);

enum class InjuryBucket { kZero = 0, kOne, kTwo, kThreeOrMore };

// ZERO iff t=0, ONE iff t=1, TWO iff t=2, THREE_OR_MORE iff t>=3.
InjuryBucket bucket_injuries(std::uint32_t injured);
std::string_view bucket_name(InjuryBucket bucket);  // "THREE_OR_MORE"
std::string_view token(InjuryBucket bucket);        // "<THREE OR MORE>"

// KABCO severity; the enumerator value is the ordinal 1..5.
enum class Severity { kO = 1, kC, kB, kA, kK };

Severity severity_from_ordinal(int ordinal);  // throws kOutOfRange
Severity severity_from_code(std::string_view code);
int ordinal(Severity severity);
std::string_view code(Severity severity);  // "O", "C", "B", "A", "K"
std::string_view name(Severity severity);  // "No Apparent Injury"
std::string_view token(Severity severity);  // "<NO APPARENT INJURY>"

// Accident types; the enumerator value is the table id 1..14.
enum class AccidentType {
  kSVO = 1, kAIR, kOth, kSL, kFEC, kREC, kOT,
  kAC, kPC, kSR, kPCC, kHOC, kOR, kAIL,
};

AccidentType accident_type_from_id(int id);  // throws kOutOfRange
AccidentType accident_type_from_abbr(std::string_view abbr);
int id(AccidentType type);
std::string_view abbr(AccidentType type);
std::string_view name(AccidentType type);
std::string_view token(AccidentType type);

struct Labels {
  std::uint32_t injured_count = 0;
  Severity severity = Severity::kO;
  AccidentType accident_type = AccidentType::kSVO;

  friend bool operator==(const Labels&, const Labels&) = default;
};

// Renders CR = AT_S^I as "<AT.abbr>_<S.code>^<bucket-name>", e.g. "REC_C^ONE".
std::string format_crash_result(const Labels& labels);

// Task-generic views. Class indices are 0-based and follow the table order.
std::size_t class_count(Task task);
std::vector<std::string> class_tokens(Task task);
std::vector<std::string> class_names(Task task);
std::size_t class_index(const Labels& labels, Task task);

// Exact match against the task's token vocabulary.
std::optional<std::size_t> parse_token(Task task, std::string_view text);

// Earliest token of the task vocabulary occurring anywhere in `text`, with a
// preference for the first one after "The answer is:" when present.
std::optional<std::size_t> scan_token(Task task, std::string_view text);

// Every token and every human label name across all three tasks.
std::vector<std::string> label_vocabulary();

}  // namespace crashkit

#endif  // CRASHKIT_LABELS_H_

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

#ifndef CRASHKIT_TEXTUALIZE_H_
#define CRASHKIT_TEXTUALIZE_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crashkit/feature_dictionary.h"
#include "crashkit/labels.h"
#include "crashkit/record.h"
#include "json.hpp"

namespace crashkit {

inline constexpr std::array<std::string_view, 4> kParagraphTitles = {
    "General Information", "Infrastructure Information", "Event Information",
    "Unit Information"};

inline constexpr std::string_view kAnswerPrefix = "The answer is: ";

// Deterministic paragraph templates.
//
// A template file is split into `[section]` blocks:
//   [system]                 shared system prompt; may use {task_question}
//                            and {task_tokens}
//   [task.<task>]            the {task_question} text for one task
//   [paragraph.<group>]      one clause per line for general, infrastructure,
//                            event, unit
//   [unit]                   clauses repeated for every unit
//   [phrase]                 `<key>.<value> = text` overrides for rendering
//                            a value, e.g. `work_zone.true = inside ...`
//   [missing]                `<key> = text` hedges; `default` uses {label}
//
// Slots are `{key}` for any non-label dictionary field, plus the reserved
// slots {unit_count}, {unit_ordinal}, {task_question} and {task_tokens}.
class TemplateSet {
 public:
  // Throws kTemplate when a slot names no dictionary field or a label field.
  static TemplateSet parse(std::string_view text, const FeatureDictionary& dict);
  static TemplateSet load(const std::filesystem::path& path,
                          const FeatureDictionary& dict);
  static TemplateSet builtin(const FeatureDictionary& dict);

  const std::string& hash() const { return hash_; }

  std::string system_prompt(Task task) const;
  const std::vector<std::string>& clauses(std::size_t paragraph) const {
    return paragraphs_[paragraph];
  }
  const std::vector<std::string>& unit_clauses() const { return unit_; }
  std::string missing_phrase(const FieldSpec& field) const;
  // Value as it appears in prose; underscores become spaces unless a phrase
  // override exists.
  std::string render_value(const FieldSpec& field,
                           const std::string& value) const;

 private:
  std::string hash_;
  std::string system_;
  std::map<std::string, std::string> task_question_;
  std::array<std::vector<std::string>, 4> paragraphs_;
  std::vector<std::string> unit_;
  std::map<std::string, std::string> phrase_;
  std::map<std::string, std::string> missing_;
  std::string missing_default_ = "The {label} was not recorded.";
};

using Paragraphs = std::array<std::string, 4>;

// General -> Infrastructure -> Event -> Unit. Missing fields become hedged
// clauses; label fields never appear.
Paragraphs render_paragraphs(const CrashRecord& record,
                             const TemplateSet& templates,
                             const FeatureDictionary& dict);

// "General Information: ...\n\nInfrastructure Information: ..." etc.
std::string join_user_text(const Paragraphs& paragraphs);

struct PromptBundle {
  std::string case_id;
  Task task = Task::kInjury;
  std::string system_text;
  std::string user_text;
  std::string target_text;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

std::string target_text(const Labels& labels, Task task);

PromptBundle build_prompt(const CrashRecord& record, Task task,
                          const TemplateSet& templates,
                          const FeatureDictionary& dict);

// Word count of each paragraph outside [min_words, max_words]; empty when
// all are within budget.
std::vector<std::string> word_budget_warnings(const Paragraphs& paragraphs,
                                              std::size_t min_words = 60,
                                              std::size_t max_words = 160);

// Occurrences of label tokens or label names in `text`.
std::vector<std::string> scan_leakage(std::string_view text);

// SFT line: {"assistant","case_id","system","user"}.
nlohmann::json sft_json(const PromptBundle& bundle);
PromptBundle bundle_from_sft(const nlohmann::json& j, Task task);

// Renders one SFT line per record, ordered by case id.
std::string render_sft(std::vector<CrashRecord> records, Task task,
                       const TemplateSet& templates,
                       const FeatureDictionary& dict);
// Writes render_sft to `path`; returns the number of lines. Throws kIo.
std::size_t export_sft(const std::vector<CrashRecord>& records, Task task,
                       const TemplateSet& templates,
                       const FeatureDictionary& dict,
                       const std::filesystem::path& path);

// Prompt bundles as JSON lines, including task and template hash.
nlohmann::json bundle_json(const PromptBundle& bundle,
                           const std::string& template_hash);

}  // namespace crashkit

#endif  // CRASHKIT_TEXTUALIZE_H_

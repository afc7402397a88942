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

#include "crashkit/textualize.h"

#include <algorithm>
#include <sstream>

#include "crashkit/error.h"
#include "crashkit/hashing.h"

namespace crashkit {
namespace {

using nlohmann::json;

constexpr std::string_view kReservedSlots[] = {"unit_count", "unit_ordinal",
                                               "task_question", "task_tokens"};

bool is_reserved(std::string_view slot) {
  return std::find(std::begin(kReservedSlots), std::end(kReservedSlots),
                   slot) != std::end(kReservedSlots);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> slots_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    const auto end = text.find('}', pos);
    if (end == std::string_view::npos) break;
    out.emplace_back(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

std::string substitute(std::string_view text,
                       const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = text.find('}', open);
    if (close == std::string_view::npos) break;
    out.append(text.substr(pos, open - pos));
    const std::string slot(text.substr(open + 1, close - open - 1));
    const auto it = values.find(slot);
    out += it == values.end() ? "{" + slot + "}" : it->second;
    pos = close + 1;
  }
  out.append(text.substr(pos));
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string ordinal_word(std::size_t i) {
  static constexpr const char* kWords[] = {"first", "second", "third",
                                           "fourth", "fifth", "sixth"};
  if (i < std::size(kWords)) return kWords[i];
  return std::to_string(i + 1) + "th";
}

std::string pretty_datetime(const std::string& raw) {
  static constexpr const char* kMonths[] = {
      "January", "February", "March",     "April",   "May",      "June",
      "July",    "August",   "September", "October", "November", "December"};
  const auto t = LocalDateTime::parse(raw);
  if (!t) return raw;
  char time[8];
  std::snprintf(time, sizeof(time), "%02d:%02d", t->hour, t->minute);
  return std::string(kMonths[t->month - 1]) + " " + std::to_string(t->day) +
         ", " + std::to_string(t->year) + " at " + time;
}

// Renders one clause against `view`. Any Missing slot turns the clause into
// hedges; present slots of such a clause are restated on their own so that
// nothing is dropped.
std::string render_clause(const std::string& clause, const FieldView& view,
                          const std::map<std::string, std::string>& reserved,
                          const TemplateSet& templates,
                          const FeatureDictionary& dict) {
  std::map<std::string, std::string> values = reserved;
  std::vector<const FieldSpec*> missing;
  std::vector<const FieldSpec*> present;
  for (const auto& slot : slots_of(clause)) {
    if (is_reserved(slot)) continue;
    const FieldSpec& f = dict.at(slot);
    const auto it = view.find(slot);
    if (it == view.end() || it->second.empty()) {
      missing.push_back(&f);
      continue;
    }
    present.push_back(&f);
    std::vector<std::string> rendered;
    for (const auto& v : it->second) {
      rendered.push_back(templates.render_value(f, v));
    }
    values[slot] = join_list(rendered);
  }
  if (missing.empty()) return substitute(clause, values);

  std::string out;
  for (const FieldSpec* f : missing) {
    if (!out.empty()) out += ' ';
    out += templates.missing_phrase(*f);
  }
  for (const FieldSpec* f : present) {
    out += " The " + f->label + " was " + values[f->key] + ".";
  }
  return out;
}

std::string join_clauses(const std::vector<std::string>& clauses) {
  std::string out;
  for (const auto& c : clauses) {
    if (c.empty()) continue;
    if (!out.empty()) out += ' ';
    out += c;
  }
  return out;
}

std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\n' || c == '\t';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace

TemplateSet TemplateSet::parse(std::string_view text,
                               const FeatureDictionary& dict) {
  TemplateSet t;
  t.hash_ = hash_text(text);
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  auto check_slots = [&](std::string_view line) {
    for (const auto& slot : slots_of(line)) {
      if (is_reserved(slot) || slot == "label") continue;
      const FieldSpec* f = dict.find(slot);
      if (!f) {
        throw Error(ErrorCode::kTemplate,
                    "line " + std::to_string(line_no) + ": slot {" + slot +
                        "} is not a dictionary field");
      }
      if (f->group == FieldGroup::kLabel || f->group == FieldGroup::kId) {
        throw Error(ErrorCode::kTemplate,
                    "line " + std::to_string(line_no) + ": slot {" + slot +
                        "} would leak a label or identifier");
      }
    }
  };
  auto key_value = [&](std::string_view line) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kTemplate, "line " + std::to_string(line_no) +
                                            ": expected key = text");
    }
    return std::make_pair(std::string(trim(line.substr(0, eq))),
                          std::string(trim(line.substr(eq + 1))));
  };

  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = std::string(line.substr(1, line.size() - 2));
      continue;
    }
    check_slots(line);
    if (section == "system") {
      if (!t.system_.empty()) t.system_ += ' ';
      t.system_ += line;
    } else if (section.rfind("task.", 0) == 0) {
      const auto task = task_from_name(section.substr(5));
      auto& q = t.task_question_[std::string(task_name(task))];
      if (!q.empty()) q += ' ';
      q += line;
    } else if (section.rfind("paragraph.", 0) == 0) {
      const auto group = section.substr(10);
      std::size_t idx = 4;
      if (group == "general") idx = 0;
      if (group == "infrastructure") idx = 1;
      if (group == "event") idx = 2;
      if (group == "unit") idx = 3;
      if (idx == 4) {
        throw Error(ErrorCode::kTemplate, "unknown paragraph '" + group + "'");
      }
      t.paragraphs_[idx].emplace_back(line);
    } else if (section == "unit") {
      t.unit_.emplace_back(line);
    } else if (section == "phrase") {
      auto [k, v] = key_value(line);
      t.phrase_[k] = v;
    } else if (section == "missing") {
      auto [k, v] = key_value(line);
      if (k == "default") {
        t.missing_default_ = v;
      } else {
        dict.at(k);
        t.missing_[k] = v;
      }
    } else {
      throw Error(ErrorCode::kTemplate, "line " + std::to_string(line_no) +
                                            ": text outside a known section");
    }
  }
  for (Task task : kAllTasks) {
    if (!t.task_question_.count(std::string(task_name(task)))) {
      throw Error(ErrorCode::kTemplate, "templates lack [task." +
                                            std::string(task_name(task)) + "]");
    }
  }
  return t;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path,
                              const FeatureDictionary& dict) {
  return parse(read_file(path), dict);
}

TemplateSet TemplateSet::builtin(const FeatureDictionary& dict) {
  return load(std::filesystem::path(CRASHKIT_DATA_DIR) / "templates.txt", dict);
}

std::string TemplateSet::system_prompt(Task task) const {
  std::string tokens;
  for (const auto& tok : class_tokens(task)) {
    if (!tokens.empty()) tokens += ", ";
    tokens += tok;
  }
  return substitute(system_,
                    {{"task_question",
                      task_question_.at(std::string(task_name(task)))},
                     {"task_tokens", tokens}});
}

std::string TemplateSet::missing_phrase(const FieldSpec& field) const {
  if (const auto it = missing_.find(field.key); it != missing_.end()) {
    return it->second;
  }
  return substitute(missing_default_, {{"label", field.label}});
}

std::string TemplateSet::render_value(const FieldSpec& field,
                                      const std::string& value) const {
  if (const auto it = phrase_.find(field.key + "." + value);
      it != phrase_.end()) {
    return it->second;
  }
  if (field.key == "crash_datetime") return pretty_datetime(value);
  if (field.kind == FieldKind::kBoolean) {
    return value == "true" ? "yes" : "no";
  }
  if (field.kind == FieldKind::kCategorical) {
    std::string out = value;
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
  }
  return value;
}

Paragraphs render_paragraphs(const CrashRecord& record,
                             const TemplateSet& templates,
                             const FeatureDictionary& dict) {
  const FieldView view = record_view(record, dict);
  const std::map<std::string, std::string> reserved = {
      {"unit_count", std::to_string(record.units.size())}};
  Paragraphs out;
  for (std::size_t p = 0; p < 4; ++p) {
    std::vector<std::string> clauses;
    for (const auto& c : templates.clauses(p)) {
      clauses.push_back(render_clause(c, view, reserved, templates, dict));
    }
    if (p == 3) {
      for (std::size_t u = 0; u < record.units.size(); ++u) {
        const FieldView uv = unit_view(record.units[u]);
        auto unit_reserved = reserved;
        unit_reserved["unit_ordinal"] = ordinal_word(u);
        for (const auto& c : templates.unit_clauses()) {
          clauses.push_back(
              render_clause(c, uv, unit_reserved, templates, dict));
        }
      }
    }
    out[p] = join_clauses(clauses);
  }
  return out;
}

std::string join_user_text(const Paragraphs& paragraphs) {
  std::string out;
  for (std::size_t p = 0; p < 4; ++p) {
    if (p > 0) out += "\n\n";
    out += kParagraphTitles[p];
    out += ": ";
    out += paragraphs[p];
  }
  return out;
}

std::string target_text(const Labels& labels, Task task) {
  return std::string(kAnswerPrefix) +
         class_tokens(task)[class_index(labels, task)];
}

PromptBundle build_prompt(const CrashRecord& record, Task task,
                          const TemplateSet& templates,
                          const FeatureDictionary& dict) {
  PromptBundle b;
  b.case_id = record.case_id;
  b.task = task;
  b.system_text = templates.system_prompt(task);
  b.user_text = join_user_text(render_paragraphs(record, templates, dict));
  b.target_text = target_text(record.labels, task);
  return b;
}

std::vector<std::string> word_budget_warnings(const Paragraphs& paragraphs,
                                              std::size_t min_words,
                                              std::size_t max_words) {
  std::vector<std::string> out;
  for (std::size_t p = 0; p < 4; ++p) {
    const auto n = count_words(paragraphs[p]);
    if (n < min_words || n > max_words) {
      out.push_back(std::string(kParagraphTitles[p]) + ": " +
                    std::to_string(n) + " words");
    }
  }
  return out;
}

std::vector<std::string> scan_leakage(std::string_view text) {
  std::vector<std::string> hits;
  for (const auto& term : label_vocabulary()) {
    if (text.find(term) != std::string_view::npos) hits.push_back(term);
  }
  return hits;
}

json sft_json(const PromptBundle& b) {
  return json{{"case_id", b.case_id},
              {"system", b.system_text},
              {"user", b.user_text},
              {"assistant", b.target_text}};
}

PromptBundle bundle_from_sft(const json& j, Task task) {
  PromptBundle b;
  try {
    b.case_id = j.at("case_id").get<std::string>();
    b.system_text = j.at("system").get<std::string>();
    b.user_text = j.at("user").get<std::string>();
    b.target_text = j.at("assistant").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad SFT line: ") + e.what());
  }
  b.task = task;
  return b;
}

std::string render_sft(std::vector<CrashRecord> records, Task task,
                       const TemplateSet& templates,
                       const FeatureDictionary& dict) {
  std::stable_sort(records.begin(), records.end(),
                   [](const CrashRecord& a, const CrashRecord& b) {
                     return a.case_id < b.case_id;
                   });
  std::string out;
  for (const auto& r : records) {
    out += sft_json(build_prompt(r, task, templates, dict)).dump();
    out += '\n';
  }
  return out;
}

std::size_t export_sft(const std::vector<CrashRecord>& records, Task task,
                       const TemplateSet& templates,
                       const FeatureDictionary& dict,
                       const std::filesystem::path& path) {
  write_file(path, render_sft(records, task, templates, dict));
  return records.size();
}

json bundle_json(const PromptBundle& b, const std::string& template_hash) {
  return json{{"case_id", b.case_id},
              {"task", std::string(task_name(b.task))},
              {"system", b.system_text},
              {"user", b.user_text},
              {"target", b.target_text},
              {"template_hash", template_hash}};
}

}  // namespace crashkit

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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "crashkit/error.h"
#include "crashkit/hashing.h"
#include "test_support.h"

namespace crashkit {
namespace {

const std::filesystem::path kData(CRASHKIT_TEST_DATA_DIR);

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CrashRecord golden_record() {
  return record_from_json(nlohmann::json::parse(slurp(kData / "golden_record.json")));
}

TEST(TextualizeTest, GoldenUserText) {
  const PromptBundle b = build_prompt(golden_record(), Task::kSeverity,
                                      testing::templates(), testing::dict());
  EXPECT_EQ(b.user_text, slurp(kData / "golden_user_text.txt"));
  EXPECT_EQ(b.target_text, "The answer is: <SERIOUS INJURY>");
  EXPECT_EQ(b.case_id, "WA22-004217");
}

TEST(TextualizeTest, ParagraphOrderAndTitles) {
  const Paragraphs p =
      render_paragraphs(golden_record(), testing::templates(), testing::dict());
  const std::string text = join_user_text(p);
  std::size_t last = 0;
  for (std::string_view title : kParagraphTitles) {
    const auto at = text.find(std::string(title) + ": ");
    ASSERT_NE(at, std::string::npos) << title;
    EXPECT_GE(at, last);
    last = at;
  }
}

TEST(TextualizeTest, MissingFieldsAreHedged) {
  const std::string text = join_user_text(
      render_paragraphs(golden_record(), testing::templates(), testing::dict()));
  EXPECT_NE(text.find("Whether the crash happened inside a work zone was not "
                      "recorded."),
            std::string::npos);
  EXPECT_NE(text.find("The age of this person was not recorded."),
            std::string::npos);
  EXPECT_NE(text.find("The traffic control was not recorded."),
            std::string::npos);
}

TEST(TextualizeTest, SystemPromptListsExactlyTheTaskTokens) {
  for (Task t : kAllTasks) {
    const std::string sys = testing::templates().system_prompt(t);
    for (const auto& tok : class_tokens(t)) {
      EXPECT_NE(sys.find(tok), std::string::npos) << tok;
    }
    for (Task other : kAllTasks) {
      if (other == t) continue;
      for (const auto& tok : class_tokens(other)) {
        EXPECT_EQ(sys.find(tok), std::string::npos) << tok;
      }
    }
    EXPECT_NE(sys.find(std::string(kAnswerPrefix)), std::string::npos);
  }
}

TEST(TextualizeTest, TargetText) {
  const Labels l{5, Severity::kK, AccidentType::kHOC};
  EXPECT_EQ(target_text(l, Task::kInjury), "The answer is: <THREE OR MORE>");
  EXPECT_EQ(target_text(l, Task::kSeverity), "The answer is: <FATAL>");
  EXPECT_EQ(target_text(l, Task::kAccidentType),
            "The answer is: <HEAD ON COLLISIONS>");
}

TEST(TextualizeTest, NoLeakageProperty) {
  const auto pool = testing::corpus(300);
  CounterRng rng(kDefaultSeed, 6);
  for (std::size_t i = 0; i < testing::kPropertyCases; ++i) {
    const CrashRecord r = testing::random_record(rng, pool);
    const std::string text = join_user_text(
        render_paragraphs(r, testing::templates(), testing::dict()));
    ASSERT_TRUE(scan_leakage(text).empty()) << r.case_id << ": "
                                            << scan_leakage(text)[0];
    // Changing only the labels must not change the prose.
    CrashRecord relabelled = r;
    relabelled.labels = {9, Severity::kK, AccidentType::kAIL};
    ASSERT_EQ(text, join_user_text(render_paragraphs(
                        relabelled, testing::templates(), testing::dict())));
  }
}

TEST(TextualizeTest, ScanLeakageFindsTokensAndNames) {
  EXPECT_FALSE(scan_leakage("this was <FATAL> indeed").empty());
  EXPECT_FALSE(scan_leakage("a Serious Injury crash").empty());
  EXPECT_TRUE(scan_leakage("a quiet road").empty());
}

TEST(TextualizeTest, SftLinesAreDeterministicAndSorted) {
  auto records = testing::corpus(50);
  const std::string a = render_sft(records, Task::kInjury, testing::templates(),
                                   testing::dict());
  std::reverse(records.begin(), records.end());
  const std::string b = render_sft(records, Task::kInjury, testing::templates(),
                                   testing::dict());
  EXPECT_EQ(a, b);
  EXPECT_EQ(hash_text(a), hash_text(b));

  std::istringstream in(a);
  std::string line, prev;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"assistant", "case_id", "system",
                                              "user"}));
    const std::string id = j.at("case_id");
    EXPECT_LT(prev, id);
    prev = id;
    const PromptBundle back = bundle_from_sft(j, Task::kInjury);
    EXPECT_EQ(sft_json(back), j);
    ++n;
  }
  EXPECT_EQ(n, 50u);
}

TEST(TextualizeTest, ExportSftWritesFile) {
  const auto dir = testing::scratch_dir("sft");
  const auto records = testing::corpus(10);
  const std::size_t n = export_sft(records, Task::kAccidentType,
                                   testing::templates(), testing::dict(),
                                   dir / "train.jsonl");
  EXPECT_EQ(n, 10u);
  EXPECT_EQ(slurp(dir / "train.jsonl"),
            render_sft(records, Task::kAccidentType, testing::templates(),
                       testing::dict()));
  std::filesystem::remove_all(dir);
}

TEST(TextualizeTest, TemplateErrors) {
  auto expect_template_error = [](const std::string& text) {
    try {
      TemplateSet::parse(text, testing::dict());
      FAIL() << "expected Template error for: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTemplate);
    }
  };
  expect_template_error("[paragraph.general]\nIt rained {no_such_field}.\n");
  expect_template_error("[paragraph.general]\nIt was {severity}.\n");
  expect_template_error("[paragraph.general]\nIt was {injured_count}.\n");
}

TEST(TextualizeTest, TemplateHashTracksContent) {
  const std::string base = slurp(std::filesystem::path(CRASHKIT_DATA_DIR) /
                                 "templates.txt");
  const TemplateSet a = TemplateSet::parse(base, testing::dict());
  const TemplateSet c = TemplateSet::parse(
      base + "\n[phrase]\nlighting.dusk = at dusk\n", testing::dict());
  EXPECT_EQ(a.hash(), testing::templates().hash());
  EXPECT_NE(a.hash(), c.hash());
}

TEST(TextualizeTest, WordBudget) {
  Paragraphs p;
  p.fill(std::string(100, 'x'));
  EXPECT_EQ(word_budget_warnings(p).size(), 4u);
  std::string words;
  for (int i = 0; i < 80; ++i) words += "word ";
  p.fill(words);
  EXPECT_TRUE(word_budget_warnings(p).empty());
}

}  // namespace
}  // namespace crashkit

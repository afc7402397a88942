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

#include "crashkit/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "crashkit/error.h"
#include "crashkit/random.h"
#include "test_support.h"

namespace crashkit {
namespace {

const std::vector<std::string> kAbc = {"a", "b", "c"};

std::vector<std::string> classes(std::size_t k) {
  std::vector<std::string> c;
  for (std::size_t i = 0; i < k; ++i) c.push_back("c" + std::to_string(i));
  return c;
}

TEST(EvalTest, SixCaseHandCount) {
  const std::vector<std::size_t> truth = {0, 0, 1, 1, 2, 2};
  const std::vector<std::size_t> pred = {0, 1, 1, 1, 0, 2};
  const ConfusionMatrix cm = confusion(truth, pred, kAbc);
  EXPECT_EQ(cm.counts, (std::vector<std::vector<long long>>{
                           {1, 1, 0}, {0, 2, 0}, {1, 0, 1}}));
  const Metrics m = metrics(cm);
  // Per class (p, r, f): a (1/2, 1/2, 1/2), b (2/3, 1, 4/5), c (1, 1/2, 2/3);
  // every class has weight 1/3.
  EXPECT_NEAR(m.accuracy, 4.0 / 6.0, 1e-12);
  EXPECT_NEAR(m.precision, (0.5 + 2.0 / 3.0 + 1.0) / 3.0, 1e-12);
  EXPECT_NEAR(m.recall, (0.5 + 1.0 + 0.5) / 3.0, 1e-12);
  EXPECT_NEAR(m.f1, (0.5 + 0.8 + 2.0 / 3.0) / 3.0, 1e-12);
}

TEST(EvalTest, StringLabelsMatchIndexLabels) {
  const ConfusionMatrix a = confusion(std::vector<std::string>{"a", "b", "c"},
                                      std::vector<std::string>{"b", "b", "c"},
                                      kAbc);
  const std::vector<std::size_t> t = {0, 1, 2}, p = {1, 1, 2};
  EXPECT_EQ(a.counts, confusion(t, p, kAbc).counts);
}

// Brute force over explicit (truth, pred) pairs, written without a
// confusion matrix.
Metrics brute_force(const std::vector<std::size_t>& t,
                    const std::vector<std::size_t>& p, std::size_t k) {
  Metrics m;
  const double n = static_cast<double>(t.size());
  double correct = 0;
  for (std::size_t i = 0; i < t.size(); ++i) correct += t[i] == p[i];
  m.accuracy = correct / n;
  for (std::size_t c = 0; c < k; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      tp += t[i] == c && p[i] == c;
      fp += t[i] != c && p[i] == c;
      fn += t[i] == c && p[i] != c;
    }
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0;
    const double rec = tp + fn > 0 ? tp / (tp + fn) : 0;
    const double f = prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0;
    const double w = (tp + fn) / n;
    m.precision += w * prec;
    m.recall += w * rec;
    m.f1 += w * f;
  }
  return m;
}

TEST(EvalTest, FiveClassBruteForceProperty) {
  CounterRng rng(kDefaultSeed, 12);
  for (std::size_t trial = 0; trial < testing::kPropertyCases; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<std::size_t> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = rng.below(5);
      p[i] = rng.bernoulli(0.5) ? t[i] : rng.below(5);
    }
    const Metrics got = metrics(confusion(t, p, classes(5)));
    const Metrics want = brute_force(t, p, 5);
    ASSERT_NEAR(got.accuracy, want.accuracy, 1e-12);
    ASSERT_NEAR(got.precision, want.precision, 1e-12);
    ASSERT_NEAR(got.recall, want.recall, 1e-12);
    ASSERT_NEAR(got.f1, want.f1, 1e-12);
    // Prevalence-weighted recall is always the accuracy.
    ASSERT_NEAR(got.recall, got.accuracy, 1e-12);
    for (double v : {got.accuracy, got.precision, got.recall, got.f1}) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0 + 1e-12);
    }
  }
}

TEST(EvalTest, ConstantPredictorProperty) {
  // Always predicting class c with prevalence p gives precision p^2 and
  // F1 2p^2 / (1 + p).
  CounterRng rng(kDefaultSeed, 13);
  for (std::size_t trial = 0; trial < testing::kPropertyCases; ++trial) {
    const std::size_t k = 2 + rng.below(13);
    const std::size_t n = 1 + rng.below(80);
    const std::size_t c = rng.below(k);
    std::vector<std::size_t> t(n), p(n, c);
    for (auto& v : t) v = rng.below(k);
    t[0] = c;
    const double prev =
        static_cast<double>(std::count(t.begin(), t.end(), c)) / n;
    const Metrics m = metrics(confusion(t, p, classes(k)));
    ASSERT_NEAR(m.accuracy, prev, 1e-12);
    ASSERT_NEAR(m.precision, prev * prev, 1e-12);
    ASSERT_NEAR(m.f1, 2 * prev * prev / (1 + prev), 1e-12);
  }
}

TEST(EvalTest, Errors) {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return std::string(code_name(e.code()));
    }
    return std::string("none");
  };
  const std::vector<std::size_t> two = {0, 1}, one = {0}, bad = {0, 3};
  EXPECT_EQ(code_of([&] { confusion(two, one, kAbc); }), "E_LENGTH_MISMATCH");
  EXPECT_EQ(code_of([&] { confusion(two, bad, kAbc); }), "E_UNKNOWN_LABEL");
  EXPECT_EQ(code_of([&] {
              confusion(std::vector<std::string>{"a"},
                        std::vector<std::string>{"z"}, kAbc);
            }),
            "E_UNKNOWN_LABEL");
  EXPECT_EQ(code_of([&] { metrics(ConfusionMatrix(kAbc)); }), "E_EMPTY_MATRIX");
  ConfusionMatrix other(classes(2));
  EXPECT_EQ(code_of([&] { ConfusionMatrix(kAbc).merge(other); }),
            "E_DIMENSION_MISMATCH");
}

TEST(EvalTest, MergeAddsCounts) {
  const std::vector<std::size_t> t1 = {0, 1}, p1 = {0, 0}, t2 = {2}, p2 = {2};
  ConfusionMatrix a = confusion(t1, p1, kAbc);
  a.merge(confusion(t2, p2, kAbc));
  EXPECT_EQ(a.total(), 3);
  EXPECT_EQ(a.counts[2][2], 1);
}

MetricRow row(const std::string& name, std::array<double, 12> v) {
  MetricRow r;
  r.model_name = name;
  for (std::size_t i = 0; i < 12; ++i) r.cells[i] = v[i];
  return r;
}

// Columns: acc(inj, sev, type), prec(...), rec(...), f1(...).
std::vector<MetricRow> reference_rows() {
  return {
      row("RF", {.353, .339, .384, .124, .115, .543, .353, .339, .384, .184, .171, .395}),
      row("AdaBoost", {.353, .339, .579, .124, .115, .383, .353, .339, .579, .184, .171, .447}),
      row("CatBoost", {.353, .339, .702, .124, .115, .664, .353, .339, .702, .184, .171, .667}),
      row("BN", {.394, .341, .653, .485, .306, .563, .394, .341, .653, .287, .181, .578}),
      row("DT", {.353, .347, .677, .124, .207, .631, .353, .347, .677, .184, .190, .640}),
      row("LR", {.353, .339, .566, .124, .115, .471, .353, .339, .566, .184, .171, .457}),
      row("LLaMA2-7B", {.399, .382, .740, .404, .411, .771, .399, .382, .740, .401, .379, .744}),
      row("LLaMA2-13B", {.439, .393, .748, .431, .375, .767, .439, .393, .748, .427, .353, .755}),
      row("LLaMA2-70B", {.447, .436, .747, .451, .446, .775, .447, .436, .747, .445, .411, .757}),
  };
}

TEST(EvalTest, RanksOfReferenceCells) {
  const auto ranked = rank_table(reference_rows());
  ASSERT_EQ(ranked.size(), 9u);
  std::map<std::string, double> score;
  for (const auto& r : ranked) score[r.row.model_name] = r.score;
  EXPECT_EQ(ranked[0].row.model_name, "LLaMA2-70B");
  EXPECT_NEAR(score["LLaMA2-70B"], 15.0 / 12.0, 1e-12);
  EXPECT_NEAR(score["LLaMA2-13B"], 26.0 / 12.0, 1e-12);
  EXPECT_NEAR(score["LLaMA2-7B"], 34.0 / 12.0, 1e-12);
  // acc_injury: 70B > 13B > 7B > BN > five baselines tied at .353.
  const auto& rf = *std::find_if(ranked.begin(), ranked.end(),
                                 [](auto& r) { return r.row.model_name == "RF"; });
  EXPECT_DOUBLE_EQ(rf.ranks[0], 7.0);  // 1 + 4 better + 4 tied / 2
}

TEST(EvalTest, TiesShareTheMeanRank) {
  std::array<double, 12> v;
  v.fill(0.5);
  const auto ranked = rank_table({row("x", v), row("y", v)});
  for (const auto& r : ranked) {
    for (double rank : r.ranks) EXPECT_DOUBLE_EQ(rank, 1.5);
    EXPECT_DOUBLE_EQ(r.score, 1.5);
  }
  EXPECT_EQ(ranked[0].row.model_name, "x");  // name breaks the score tie
}

TEST(EvalTest, RankingIgnoresRowOrderProperty) {
  CounterRng rng(kDefaultSeed, 14);
  for (std::size_t trial = 0; trial < testing::kPropertyCases; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<MetricRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, 12> v;
      // Coarse values so ties are common.
      for (double& x : v) x = static_cast<double>(rng.below(4)) / 4.0;
      rows.push_back(row("m" + std::to_string(i), v));
    }
    const auto a = rank_table(rows);
    std::vector<MetricRow> shuffled = rows;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    }
    const auto b = rank_table(shuffled);
    ASSERT_EQ(a.size(), b.size());
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].row.model_name, b[i].row.model_name);
      ASSERT_EQ(a[i].ranks, b[i].ranks);
      total += a[i].score;
    }
    // Mid-ranks always sum to 1 + 2 + ... + n in each column.
    ASSERT_NEAR(total, n * (n + 1) / 2.0, 1e-9);
  }
}

TEST(EvalTest, RankTableErrors) {
  std::array<double, 12> v;
  v.fill(0.1);
  try {
    rank_table({row("only", v)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  MetricRow hole = row("hole", v);
  hole.cells[5].reset();
  try {
    rank_table({row("x", v), hole});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingCell);
  }
}

TEST(EvalTest, MetricRowJsonAndColumns) {
  const auto names = rank_column_names();
  ASSERT_EQ(names.size(), kRankColumns);
  EXPECT_EQ(names[0], "acc_injury");
  EXPECT_EQ(names[5], "prec_accident_type");
  EXPECT_EQ(names[11], "f1_accident_type");
  MetricRow r;
  r.model_name = "DT";
  r.set(Task::kSeverity, Metrics{0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(*r.cells[1], 0.1);
  EXPECT_EQ(*r.cells[4], 0.2);
  EXPECT_EQ(*r.cells[7], 0.3);
  EXPECT_EQ(*r.cells[10], 0.4);
  const MetricRow back = MetricRow::from_json(r.to_json());
  EXPECT_EQ(back.model_name, "DT");
  EXPECT_EQ(back.cells, r.cells);
}

TEST(EvalTest, FormattedRankTableListsEveryModel) {
  const std::string text = format_rank_table(rank_table(reference_rows()));
  for (const auto& r : reference_rows()) {
    EXPECT_NE(text.find(r.model_name), std::string::npos);
  }
  EXPECT_NE(text.find("1.250"), std::string::npos);
}

}  // namespace
}  // namespace crashkit

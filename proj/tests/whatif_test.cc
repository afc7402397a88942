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

#include "crashkit/whatif.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "crashkit/error.h"
#include "test_support.h"

namespace crashkit {
namespace {

// 842 test cases of which exactly 63 are alcohol-involved.
std::vector<CrashRecord> alcohol_test_set() {
  auto rs = testing::corpus(842);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto& f = rs[i].event.contributing_factors;
    f.erase(std::remove(f.begin(), f.end(), "alcohol_impairment"), f.end());
    rs[i].event.alcohol_involved = i % 13 == 0 && i / 13 < 63;
  }
  return rs;
}

std::size_t adverse(const std::vector<CrashRecord>& rs, Factor f) {
  return static_cast<std::size_t>(std::count_if(
      rs.begin(), rs.end(),
      [&](const CrashRecord& r) { return base_predicate(r, f); }));
}

TEST(WhatIfTest, ReferenceCardinalities) {
  const auto rs = alcohol_test_set();
  ASSERT_EQ(adverse(rs, Factor::kAlcohol), 63u);
  const struct {
    Rate rate;
    std::size_t selected, total;
  } cases[] = {{Rate::times(1), 63, 126},
               {Rate::times(2), 126, 189},
               {Rate::everything(), 779, 842}};
  for (const auto& c : cases) {
    const PerturbationPlan p = plan(rs, Factor::kAlcohol, c.rate, kDefaultSeed);
    EXPECT_EQ(p.base_count, 63u);
    EXPECT_EQ(p.complement_count, 779u);
    EXPECT_EQ(p.selected_case_ids.size(), c.selected) << c.rate.label();
    EXPECT_EQ(p.adverse_after(), c.total);
    const auto out = apply_records(rs, p, testing::dict());
    ASSERT_EQ(out.size(), rs.size());
    EXPECT_EQ(adverse(out, Factor::kAlcohol), c.total);
  }
}

TEST(WhatIfTest, SmallerRatesSelectNestedSubsets) {
  const auto rs = alcohol_test_set();
  const auto p1 = plan(rs, Factor::kAlcohol, Rate::times(1), 99);
  const auto p2 = plan(rs, Factor::kAlcohol, Rate::times(2), 99);
  const auto pa = plan(rs, Factor::kAlcohol, Rate::everything(), 99);
  EXPECT_TRUE(std::includes(p2.selected_case_ids.begin(),
                            p2.selected_case_ids.end(),
                            p1.selected_case_ids.begin(),
                            p1.selected_case_ids.end()));
  EXPECT_TRUE(std::includes(pa.selected_case_ids.begin(),
                            pa.selected_case_ids.end(),
                            p2.selected_case_ids.begin(),
                            p2.selected_case_ids.end()));
  EXPECT_TRUE(std::is_sorted(p1.selected_case_ids.begin(),
                             p1.selected_case_ids.end()));
  // Selection is drawn only from the complement.
  for (const auto& id : pa.selected_case_ids) {
    const auto& r = *std::find_if(rs.begin(), rs.end(),
                                  [&](auto& x) { return x.case_id == id; });
    EXPECT_FALSE(base_predicate(r, Factor::kAlcohol));
  }
  EXPECT_NE(plan(rs, Factor::kAlcohol, Rate::times(1), 100).selected_case_ids,
            p1.selected_case_ids);
}

TEST(WhatIfTest, RewriteIsIdempotentAndOnlyTouchesTheFactorProperty) {
  const auto pool = testing::corpus(300);
  CounterRng rng(kDefaultSeed, 15);
  for (std::size_t i = 0; i < testing::kPropertyCases; ++i) {
    const CrashRecord r = testing::random_record(rng, pool);
    for (Factor f : kAllFactors) {
      const CrashRecord once = rewrite(r, f, testing::dict());
      ASSERT_TRUE(base_predicate(once, f));
      ASSERT_EQ(rewrite(once, f, testing::dict()), once);
      ASSERT_EQ(once.labels, r.labels);
      ASSERT_EQ(once.case_id, r.case_id);
      ASSERT_EQ(once.units, r.units);
      ASSERT_EQ(once.general, r.general);
    }
  }
}

TEST(WhatIfTest, ApplyConservesUnselectedRecords) {
  const auto rs = alcohol_test_set();
  const auto p = plan(rs, Factor::kIcyRoad, Rate::times(1), kDefaultSeed);
  const std::set<std::string> chosen(p.selected_case_ids.begin(),
                                     p.selected_case_ids.end());
  const auto out = apply(rs, p, testing::templates(), testing::dict());
  ASSERT_EQ(out.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(out[i].record.case_id, rs[i].case_id);
    if (chosen.count(rs[i].case_id)) {
      EXPECT_TRUE(out[i].perturbed);
      EXPECT_EQ(out[i].record.infrastructure.road_surface, "icy");
      EXPECT_NE(out[i].user_text.find("icy"), std::string::npos);
    } else {
      EXPECT_FALSE(out[i].perturbed);
      EXPECT_EQ(out[i].record, rs[i]);
    }
  }
}

TEST(WhatIfTest, MissingCountsAsComplement) {
  auto rs = testing::corpus(10);
  for (auto& r : rs) r.infrastructure.work_zone.reset();
  rs[0].infrastructure.work_zone = true;
  const auto p = plan(rs, Factor::kWorkZone, Rate::everything(), 1);
  EXPECT_EQ(p.base_count, 1u);
  EXPECT_EQ(p.complement_count, 9u);
}

TEST(WhatIfTest, EmptyComplementThrows) {
  auto rs = testing::corpus(20);
  for (auto& r : rs) r.infrastructure.road_surface = "icy";
  try {
    plan(rs, Factor::kIcyRoad, Rate::times(1), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyComplement);
  }
}

TEST(WhatIfTest, RateParsingAndLabels) {
  EXPECT_EQ(Rate::parse("1").label(), "+100%");
  EXPECT_EQ(Rate::parse("2.0").label(), "+200%");
  EXPECT_EQ(Rate::parse("+100%").label(), "+100%");
  EXPECT_TRUE(Rate::parse("all").all);
  EXPECT_EQ(Rate::everything().label(), "all");
  EXPECT_THROW(Rate::parse("lots"), Error);
  EXPECT_THROW(Rate::parse("-1"), Error);
  for (Factor f : kAllFactors) EXPECT_EQ(factor_from_name(factor_name(f)), f);
}

TEST(WhatIfTest, ShiftIsZeroSumProperty) {
  CounterRng rng(kDefaultSeed, 16);
  const auto cls = class_names(Task::kAccidentType);
  for (std::size_t trial = 0; trial < testing::kPropertyCases; ++trial) {
    const std::size_t n = 1 + rng.below(100);
    std::vector<std::size_t> before(n), after(n);
    for (std::size_t i = 0; i < n; ++i) {
      before[i] = rng.below(cls.size());
      after[i] = rng.bernoulli(0.7) ? before[i] : rng.below(cls.size());
    }
    const ShiftReport s = shift_report(before, after, cls);
    ASSERT_EQ(std::accumulate(s.delta.begin(), s.delta.end(), 0LL), 0);
    ASSERT_EQ(std::accumulate(s.before.begin(), s.before.end(), 0LL),
              static_cast<long long>(n));
    for (std::size_t c = 0; c < cls.size(); ++c) {
      ASSERT_EQ(s.delta[c], s.after[c] - s.before[c]);
    }
  }
}

TEST(WhatIfTest, ShiftReportErrorsAndCsv) {
  const std::vector<std::string> cls = {"x", "y"};
  const std::vector<std::size_t> a = {0, 0, 1}, b = {1, 1, 1}, c = {0};
  const ShiftReport s = shift_report(a, b, cls);
  EXPECT_EQ(s.delta, (std::vector<long long>{-2, 2}));
  EXPECT_DOUBLE_EQ(s.relative[0], -1.0);
  EXPECT_EQ(s.plot_csv(), "class,delta\nx,-2\ny,2\n");
  EXPECT_THROW(shift_report(a, c, cls), Error);
  const std::vector<std::size_t> bad = {0, 0, 5};
  EXPECT_THROW(shift_report(a, bad, cls), Error);
}

}  // namespace
}  // namespace crashkit

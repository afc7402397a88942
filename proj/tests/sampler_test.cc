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

#include "crashkit/sampler.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "crashkit/error.h"
#include "crashkit/ingest.h"
#include "crashkit/synthetic.h"
#include "test_support.h"

namespace crashkit {
namespace {

std::set<std::string> ids(const std::vector<CrashRecord>& rs) {
  std::set<std::string> s;
  for (const auto& r : rs) s.insert(r.case_id);
  return s;
}

TEST(SamplerTest, SplitIsAnExactPartitionByMonth) {
  auto records = testing::corpus(2000);
  records[3].general.crash_datetime.reset();
  const Split s = split(records, SplitSpec{});
  EXPECT_EQ(s.train.size() + s.test.size() + s.unassigned.size(),
            records.size());
  ASSERT_EQ(s.unassigned.size(), 1u);
  EXPECT_EQ(s.unassigned[0].case_id, records[3].case_id);
  for (const auto& r : s.test) {
    const int m = r.general.crash_datetime->month;
    EXPECT_TRUE(m == 1 || m == 6 || m == 12) << m;
  }
  for (const auto& r : s.train) {
    const int m = r.general.crash_datetime->month;
    EXPECT_FALSE(m == 1 || m == 6 || m == 12) << m;
  }
  std::set<std::string> all = ids(s.train);
  for (const auto& id : ids(s.test)) EXPECT_TRUE(all.insert(id).second);
  // Input order is kept within a part.
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end(),
                             [](auto& a, auto& b) { return a.case_id < b.case_id; }));
}

TEST(SamplerTest, UniformResampleEqualizesBuckets) {
  const Split s = split(testing::corpus(3000), SplitSpec{});
  std::map<InjuryBucket, std::size_t> before;
  for (const auto& r : s.test) ++before[bucket_injuries(r.labels.injured_count)];
  ASSERT_EQ(before.size(), 4u);
  std::size_t smallest = SIZE_MAX;
  for (auto& [b, n] : before) smallest = std::min(smallest, n);

  const auto uni = resample_uniform_injury(s.test, kDefaultSeed);
  std::map<InjuryBucket, std::size_t> after;
  for (const auto& r : uni) ++after[bucket_injuries(r.labels.injured_count)];
  for (auto& [b, n] : after) EXPECT_EQ(n, smallest);
  EXPECT_EQ(uni.size(), 4 * smallest);
  // Without replacement, a subset of the test part, ordered by case id.
  const auto test_ids = ids(s.test);
  EXPECT_EQ(ids(uni).size(), uni.size());
  for (const auto& r : uni) EXPECT_TRUE(test_ids.count(r.case_id));
  EXPECT_TRUE(std::is_sorted(uni.begin(), uni.end(),
                             [](auto& a, auto& b) { return a.case_id < b.case_id; }));
  // Same seed, same draw; another seed, another draw.
  EXPECT_EQ(ids(resample_uniform_injury(s.test, kDefaultSeed)), ids(uni));
  EXPECT_NE(ids(resample_uniform_injury(s.test, kDefaultSeed + 1)), ids(uni));
}

TEST(SamplerTest, EmptyBucketThrows) {
  auto records = testing::corpus(200);
  for (auto& r : records) {
    if (r.labels.injured_count == 2) r.labels.injured_count = 1;
  }
  try {
    resample_uniform_injury(records, kDefaultSeed);
    FAIL() << "expected EmptyBucket";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyBucket);
  }
}

TEST(SamplerTest, SpecValidation) {
  SplitSpec bad;
  bad.test_months = {0};
  EXPECT_THROW(bad.validate(), Error);
  bad.test_months = {13};
  EXPECT_THROW(bad.validate(), Error);
  bad.test_months = {};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(SamplerTest, ManifestRoundTripAndSelect) {
  const auto records = testing::corpus(100);
  SplitManifest m;
  m.train = {records[5].case_id, records[2].case_id};
  m.test = {records[7].case_id};
  m.test_months = {1, 6, 12};
  m.seed = 42;
  const SplitManifest back = SplitManifest::from_json(m.to_json());
  EXPECT_EQ(back.train, m.train);
  EXPECT_EQ(back.test, m.test);
  EXPECT_EQ(back.test_months, m.test_months);
  EXPECT_EQ(back.seed, 42u);
  const auto sel = select_ids(records, m.train);
  ASSERT_EQ(sel.size(), 2u);
  EXPECT_EQ(sel[0].case_id, records[5].case_id);
  EXPECT_EQ(sel[1].case_id, records[2].case_id);
  EXPECT_THROW(select_ids(records, {"WA99-000000"}), Error);
}

TEST(SyntheticTest, DeterministicPerSeed) {
  EXPECT_EQ(testing::corpus(500, 7), testing::corpus(500, 7));
  EXPECT_NE(testing::corpus(500, 7), testing::corpus(500, 8));
  // Each record depends only on (seed, index).
  const auto small = testing::corpus(100, 7);
  const auto big = testing::corpus(500, 7);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i], big[i]);
}

TEST(SyntheticTest, RecordsAreClean) {
  const auto records = testing::corpus(1000);
  const CleanResult c = clean_features(records, testing::dict());
  EXPECT_TRUE(c.unknown_categories.empty());
  EXPECT_EQ(c.records, records);
}

TEST(SyntheticTest, PlantedIcyOverturnRatio) {
  const auto records = testing::corpus(20000);
  std::size_t icy = 0, icy_ot = 0, other = 0, other_ot = 0;
  for (const auto& r : records) {
    const bool ot = r.labels.accident_type == AccidentType::kOT;
    if (r.infrastructure.road_surface == "icy") {
      ++icy;
      icy_ot += ot;
    } else {
      ++other;
      other_ot += ot;
    }
  }
  ASSERT_GT(icy, 500u);
  const double ratio = (static_cast<double>(icy_ot) / icy) /
                       (static_cast<double>(other_ot) / other);
  EXPECT_GE(ratio, 2.5);
  EXPECT_LE(ratio, 3.5);
}

TEST(SyntheticTest, SpecValidation) {
  SyntheticSpec s;
  s.effects[0].multiplier = 0;
  EXPECT_THROW(s.validate(), Error);
  s = SyntheticSpec{};
  s.effects[0].class_index = 99;
  EXPECT_THROW(s.validate(), Error);
  s = SyntheticSpec{};
  s.year = 1800;
  EXPECT_THROW(s.validate(), Error);
  s = SyntheticSpec{};
  s.n_records = 0;
  EXPECT_NO_THROW(s.validate());
  EXPECT_TRUE(generate_synthetic(s).records.empty());
}

}  // namespace
}  // namespace crashkit

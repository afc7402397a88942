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

#include "crashkit/ingest.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "crashkit/error.h"
#include "crashkit/table.h"
#include "test_support.h"

namespace crashkit {
namespace {

const std::filesystem::path kFixture =
    std::filesystem::path(CRASHKIT_TEST_DATA_DIR) / "ingest";

SourceBundle fixture_bundle() {
  return {kFixture / "crash.csv", kFixture / "road.csv", kFixture / "unit.csv",
          kFixture / "person.csv"};
}

const CrashRecord& find(const std::vector<CrashRecord>& rs,
                        const std::string& id) {
  auto it = std::find_if(rs.begin(), rs.end(),
                         [&](const CrashRecord& r) { return r.case_id == id; });
  if (it == rs.end()) throw std::runtime_error("no record " + id);
  return *it;
}

TEST(TableTest, QuotedCellsKeepDelimitersQuotesAndNewlines) {
  std::vector<MalformedLine> bad;
  std::vector<std::size_t> starts;
  const auto recs = split_records(
      "a,b,c\n\"x, y\",\"say \"\"hi\"\"\",\"two\nlines\"\n1,2,3\n", ',', &bad,
      &starts);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1][0], "x, y");
  EXPECT_EQ(recs[1][1], "say \"hi\"");
  EXPECT_EQ(recs[1][2], "two\nlines");
  EXPECT_EQ(recs[2], (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_TRUE(bad.empty());
  // The record after the embedded newline starts on physical line 4.
  EXPECT_EQ(starts[2], 4u);
}

TEST(TableTest, QuoteCellRoundTrip) {
  for (const std::string cell : {"plain", "a,b", "say \"x\"", "l1\nl2", ""}) {
    const std::string line = quote_cell(cell, ',') + "," + quote_cell("z", ',');
    const auto recs = split_records(line, ',', nullptr, nullptr);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0][0], cell);
  }
}

TEST(TableTest, HeaderMustMatchSchema) {
  try {
    parse_table_text("route_id,begin_milepost\nI-5,0\n", "road",
                     testing::dict());
    FAIL() << "expected SchemaMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(TableTest, RaggedLinesAreCollectedOrThrown) {
  const std::string text =
      "route_id,begin_milepost,end_milepost,lane_count,speed_limit,"
      "functional_class\nI-5,0,5,4,70,interstate\nI-5,5,10\n";
  const ParsedTable t = parse_table_text(text, "road", testing::dict());
  EXPECT_EQ(t.rows.size(), 1u);
  ASSERT_EQ(t.malformed.size(), 1u);
  EXPECT_EQ(t.malformed[0].line_no, 3u);
  TableOptions strict;
  strict.strict = true;
  EXPECT_THROW(parse_table_text(text, "road", testing::dict(), strict), Error);
}

TEST(IngestTest, FixtureJoinCleanAndDrops) {
  const SourceTables tables = load_sources(fixture_bundle(), testing::dict());
  IngestReport report;
  const auto records = ingest(tables, testing::dict(), 0.0, report);

  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].case_id, "WA22-000001");
  EXPECT_EQ(records[1].case_id, "WA22-000002");
  EXPECT_EQ(report.drop_reasons.at(kDropMissingLabels), 1u);
  EXPECT_EQ(report.drop_reasons.at(kDropMissingJoin), 1u);
  EXPECT_EQ(report.records_dropped, 2u);

  const CrashRecord& a = find(records, "WA22-000001");
  EXPECT_EQ(a.general.city, "yakima,_east");  // case-folded slug
  EXPECT_EQ(a.general.road_type, "interstate");
  EXPECT_EQ(a.infrastructure.lane_count, 4);
  EXPECT_EQ(a.infrastructure.speed_limit, 70);
  EXPECT_EQ(a.infrastructure.lighting, "daylight");
  EXPECT_EQ(a.infrastructure.road_surface, "icy");
  EXPECT_EQ(a.event.contributing_factors,
            std::vector<std::string>{"inattention"});
  ASSERT_EQ(a.units.size(), 1u);
  EXPECT_EQ(a.units[0].driver_gender, "female");
  EXPECT_EQ(a.units[0].driver_age, 34);
  EXPECT_EQ(a.labels.injured_count, 1u);
  EXPECT_EQ(a.labels.severity, Severity::kB);
  EXPECT_EQ(a.labels.accident_type, AccidentType::kOT);

  // Orphan route: kept, road attributes Missing, reported.
  const CrashRecord& b = find(records, "WA22-000002");
  EXPECT_FALSE(b.infrastructure.lane_count);
  EXPECT_FALSE(b.infrastructure.speed_limit);
  EXPECT_EQ(report.unmatched_road, std::vector<std::string>{"WA22-000002"});
  // Unknown category becomes Missing.
  EXPECT_FALSE(b.infrastructure.lighting);
  EXPECT_FALSE(report.unknown_categories.empty());
  ASSERT_EQ(b.units.size(), 2u);
  EXPECT_EQ(b.units[1].unit_kind, "pedestrian");
  EXPECT_FALSE(b.units[1].vehicle_type);
  EXPECT_EQ(b.units[0].driver_gender, "male");
}

TEST(IngestTest, CompletenessFilterBoundary) {
  const SourceTables tables = load_sources(fixture_bundle(), testing::dict());
  IngestReport report;
  const auto all = ingest(tables, testing::dict(), 0.0, report);
  const double c = completeness(all[1], testing::dict());
  ASSERT_GT(c, 0.0);
  ASSERT_LT(c, 1.0);
  EXPECT_EQ(completeness_filter(all, c, testing::dict()).kept.size(),
            static_cast<std::size_t>(std::count_if(
                all.begin(), all.end(), [&](const CrashRecord& r) {
                  return completeness(r, testing::dict()) >= c;
                })));
  const auto strict = completeness_filter(all, c + 1e-9, testing::dict());
  EXPECT_TRUE(std::none_of(strict.kept.begin(), strict.kept.end(),
                           [](const CrashRecord& r) {
                             return r.case_id == "WA22-000002";
                           }));
}

TEST(IngestTest, SyntheticTablesRoundTrip) {
  SyntheticSpec spec;
  spec.n_records = 300;
  const SyntheticCorpus corpus = generate_synthetic(spec);
  const auto dir = testing::scratch_dir("ingest_rt");
  write_source_tables(corpus, dir);
  const SourceTables tables = load_sources(
      {dir / "crash.csv", dir / "road.csv", dir / "unit.csv",
       dir / "person.csv"},
      testing::dict());
  IngestReport report;
  const auto records = ingest(tables, testing::dict(), 0.0, report);
  ASSERT_EQ(records.size(), corpus.records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    // A road type missing on the crash row is filled from its segment.
    CrashRecord expected = corpus.records[i];
    if (!expected.general.road_type) {
      for (const RoadSegment& seg : corpus.network) {
        if (seg.route_id == expected.general.route_id &&
            seg.begin_milepost <= *expected.general.milepost &&
            *expected.general.milepost < seg.end_milepost) {
          expected.general.road_type = seg.road_type;
        }
      }
    }
    ASSERT_EQ(to_json(records[i]).dump(), to_json(expected).dump());
  }
  std::filesystem::remove_all(dir);
}

TEST(IngestTest, CleanFeaturesIsIdempotentProperty) {
  const auto pool = testing::corpus(200);
  CounterRng rng(kDefaultSeed, 5);
  const char* kNoise[] = {" Ice", "DAY", "frozen", "moonlight", "ped", "F"};
  std::vector<CrashRecord> batch;
  for (std::size_t i = 0; i < testing::kPropertyCases; ++i) {
    CrashRecord r = testing::random_record(rng, pool);
    if (rng.bernoulli(0.5)) r.infrastructure.road_surface = kNoise[rng.below(6)];
    if (rng.bernoulli(0.5)) r.infrastructure.lighting = kNoise[rng.below(6)];
    if (!r.units.empty() && rng.bernoulli(0.5)) {
      r.units[0].driver_gender = kNoise[rng.below(6)];
    }
    if (rng.bernoulli(0.3) && !r.event.contributing_factors.empty()) {
      r.event.contributing_factors.push_back(r.event.contributing_factors[0]);
    }
    batch.push_back(std::move(r));
  }
  const CleanResult once = clean_features(batch, testing::dict());
  const CleanResult twice = clean_features(once.records, testing::dict());
  ASSERT_EQ(once.records.size(), twice.records.size());
  for (std::size_t i = 0; i < once.records.size(); ++i) {
    ASSERT_EQ(once.records[i], twice.records[i]);
  }
  EXPECT_TRUE(twice.unknown_categories.empty());
}

TEST(IngestTest, MissingFileIsIoError) {
  SourceBundle b = fixture_bundle();
  b.road_table = kFixture / "nope.csv";
  try {
    load_sources(b, testing::dict());
    FAIL() << "expected Io";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace crashkit

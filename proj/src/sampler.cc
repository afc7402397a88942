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

#include <algorithm>
#include <array>
#include <unordered_map>

#include "crashkit/error.h"

namespace crashkit {

void SplitSpec::validate() const {
  if (test_months.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "test_months must be non-empty");
  }
  for (int m : test_months) {
    if (m < 1 || m > 12) {
      throw Error(ErrorCode::kInvalidArgument,
                  "test month " + std::to_string(m) + " outside 1..12");
    }
  }
}

Split split(std::vector<CrashRecord> records, const SplitSpec& spec) {
  spec.validate();
  Split out;
  for (auto& r : records) {
    if (!r.general.crash_datetime) {
      out.unassigned.push_back(std::move(r));
    } else if (spec.test_months.count(r.general.crash_datetime->month)) {
      out.test.push_back(std::move(r));
    } else {
      out.train.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<CrashRecord> resample_uniform_injury(
    const std::vector<CrashRecord>& test, std::uint64_t seed) {
  std::array<std::vector<const CrashRecord*>, 4> buckets;
  for (const auto& r : test) {
    buckets[static_cast<std::size_t>(bucket_injuries(r.labels.injured_count))]
        .push_back(&r);
  }
  std::size_t smallest = test.size();
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    if (buckets[b].empty()) {
      throw Error(ErrorCode::kEmptyBucket,
                  "injury bucket " +
                      std::string(bucket_name(static_cast<InjuryBucket>(b))) +
                      " has no test records");
    }
    smallest = std::min(smallest, buckets[b].size());
  }
  std::vector<CrashRecord> out;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    auto& members = buckets[b];
    // Canonical order first so the draw depends only on the set of records.
    std::sort(members.begin(), members.end(),
              [](const CrashRecord* x, const CrashRecord* y) {
                return x->case_id < y->case_id;
              });
    CounterRng rng(seed, 0x7265736d00ULL + b);
    rng.partial_shuffle(members, smallest);
    for (std::size_t i = 0; i < smallest; ++i) out.push_back(*members[i]);
  }
  std::sort(out.begin(), out.end(),
            [](const CrashRecord& x, const CrashRecord& y) {
              return x.case_id < y.case_id;
            });
  return out;
}

nlohmann::json SplitManifest::to_json() const {
  return nlohmann::json{{"train", train},
                        {"test", test},
                        {"test_uniform", test_uniform},
                        {"unassigned", unassigned},
                        {"test_months", test_months},
                        {"seed", seed}};
}

SplitManifest SplitManifest::from_json(const nlohmann::json& j) {
  SplitManifest m;
  try {
    m.train = j.at("train").get<std::vector<std::string>>();
    m.test = j.at("test").get<std::vector<std::string>>();
    m.test_uniform = j.at("test_uniform").get<std::vector<std::string>>();
    m.unassigned = j.at("unassigned").get<std::vector<std::string>>();
    m.test_months = j.at("test_months").get<std::set<int>>();
    m.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad split manifest: ") +
                                       e.what());
  }
  return m;
}

std::vector<CrashRecord> select_ids(const std::vector<CrashRecord>& records,
                                    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, const CrashRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.case_id, &r);
  std::vector<CrashRecord> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "case id '" + id + "' not found in records");
    }
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace crashkit

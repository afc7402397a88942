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

#ifndef CRASHKIT_SAMPLER_H_
#define CRASHKIT_SAMPLER_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "crashkit/random.h"
#include "crashkit/record.h"
#include "json.hpp"

namespace crashkit {

enum class ResampleTarget { kUniformInjury, kNone };

struct SplitSpec {
  std::set<int> test_months = {1, 6, 12};
  std::uint64_t seed = kDefaultSeed;
  ResampleTarget resample_target = ResampleTarget::kUniformInjury;

  void validate() const;  // throws kInvalidArgument
};

struct Split {
  std::vector<CrashRecord> train;
  std::vector<CrashRecord> test;
  std::vector<CrashRecord> unassigned;  // records without a crash date
};

// Exact partition by crash month; input order is preserved in each part.
Split split(std::vector<CrashRecord> records, const SplitSpec& spec);

// Downsamples without replacement so every injury bucket keeps the smallest
// bucket's count. The result is ordered by case id. Throws kEmptyBucket.
std::vector<CrashRecord> resample_uniform_injury(
    const std::vector<CrashRecord>& test, std::uint64_t seed);

// Case ids of each partition, as written to split manifests.
struct SplitManifest {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::vector<std::string> test_uniform;
  std::vector<std::string> unassigned;
  std::set<int> test_months;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static SplitManifest from_json(const nlohmann::json& j);
};

// Selects records whose case id is in `ids`, in the order of `ids`. Throws
// kInvalidArgument for an id absent from `records`.
std::vector<CrashRecord> select_ids(const std::vector<CrashRecord>& records,
                                    const std::vector<std::string>& ids);

}  // namespace crashkit

#endif  // CRASHKIT_SAMPLER_H_

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

#ifndef CRASHKIT_WHATIF_H_
#define CRASHKIT_WHATIF_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crashkit/feature_dictionary.h"
#include "crashkit/record.h"
#include "json.hpp"

namespace crashkit {

class TemplateSet;

enum class Factor { kAlcohol, kIcyRoad, kWorkZone };

inline constexpr Factor kAllFactors[] = {Factor::kAlcohol, Factor::kIcyRoad,
                                         Factor::kWorkZone};

std::string_view factor_name(Factor factor);  // alcohol, icy_road, work_zone
Factor factor_from_name(std::string_view name);

// True when the adverse condition holds. A Missing value counts as the
// non-adverse condition.
bool base_predicate(const CrashRecord& record, Factor factor);

// Flips the record into the adverse condition:
//   alcohol:   alcohol_involved = true, plus the alcohol_impairment factor
//   icy_road:  road_surface = icy
//   work_zone: work_zone = true
// and sets any correlated fields the dictionary lists with `depends`.
// Idempotent.
CrashRecord rewrite(CrashRecord record, Factor factor,
                    const FeatureDictionary& dict);

// Perturbation intensity: a multiple of the adverse base count, or ALL.
struct Rate {
  double multiple = 1.0;
  bool all = false;

  static Rate times(double m) { return {m, false}; }
  static Rate everything() { return {0.0, true}; }
  std::string label() const;  // "+100%", "+200%", "all"
  static Rate parse(std::string_view text);  // "1", "2.0", "all", "+100%"
};

struct PerturbationPlan {
  Factor factor = Factor::kAlcohol;
  Rate rate;
  std::uint64_t seed = 0;
  std::vector<std::string> selected_case_ids;  // sorted
  std::size_t base_count = 0;
  std::size_t complement_count = 0;

  std::size_t adverse_after() const {
    return base_count + selected_case_ids.size();
  }
  nlohmann::json to_json() const;
};

// Selects min(round(base * rate), complement) complement cases (all of them
// for ALL) uniformly without replacement. Throws kEmptyComplement. For a
// fixed seed and factor, a smaller rate selects a prefix-subset of a larger
// one.
PerturbationPlan plan(const std::vector<CrashRecord>& test, Factor factor,
                      Rate rate, std::uint64_t seed);

// Rewrites the planned records; everything else is returned unchanged.
// |output| == |input|.
std::vector<CrashRecord> apply_records(const std::vector<CrashRecord>& test,
                                       const PerturbationPlan& plan,
                                       const FeatureDictionary& dict);

struct PerturbedCase {
  CrashRecord record;
  std::string user_text;  // regenerated for perturbed records
  bool perturbed = false;
};

std::vector<PerturbedCase> apply(const std::vector<CrashRecord>& test,
                                 const PerturbationPlan& plan,
                                 const TemplateSet& templates,
                                 const FeatureDictionary& dict);

struct ShiftReport {
  std::vector<std::string> classes;
  std::vector<long long> before;
  std::vector<long long> after;
  std::vector<long long> delta;     // after - before
  std::vector<double> relative;     // delta / max(before, 1)

  nlohmann::json to_json() const;
  // "class,delta" lines for bar-chart plotting.
  std::string plot_csv() const;
};

// Class-count shift between two prediction vectors over the same cases.
// Throws kLengthMismatch, kUnknownLabel.
ShiftReport shift_report(std::span<const std::size_t> before,
                         std::span<const std::size_t> after,
                         const std::vector<std::string>& classes);

}  // namespace crashkit

#endif  // CRASHKIT_WHATIF_H_

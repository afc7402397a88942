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

#include <algorithm>
#include <cmath>
#include <set>

#include "crashkit/error.h"
#include "crashkit/random.h"
#include "crashkit/textualize.h"

namespace crashkit {

std::string_view factor_name(Factor factor) {
  switch (factor) {
    case Factor::kAlcohol: return "alcohol";
    case Factor::kIcyRoad: return "icy_road";
    case Factor::kWorkZone: return "work_zone";
  }
  return "";
}

Factor factor_from_name(std::string_view name) {
  for (Factor f : kAllFactors) {
    if (factor_name(f) == name) return f;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown factor '" + std::string(name) + "'");
}

bool base_predicate(const CrashRecord& r, Factor factor) {
  switch (factor) {
    case Factor::kAlcohol: return r.event.alcohol_involved.value_or(false);
    case Factor::kIcyRoad: return r.infrastructure.road_surface == "icy";
    case Factor::kWorkZone: return r.infrastructure.work_zone.value_or(false);
  }
  return false;
}

CrashRecord rewrite(CrashRecord r, Factor factor,
                    const FeatureDictionary& dict) {
  switch (factor) {
    case Factor::kAlcohol: {
      r.event.alcohol_involved = true;
      auto& fs = r.event.contributing_factors;
      std::erase(fs, std::string("none_apparent"));
      if (std::find(fs.begin(), fs.end(), "alcohol_impairment") == fs.end()) {
        fs.push_back("alcohol_impairment");
      }
      break;
    }
    case Factor::kIcyRoad:
      r.infrastructure.road_surface = "icy";
      break;
    case Factor::kWorkZone:
      r.infrastructure.work_zone = true;
      break;
  }
  for (const auto& dep : dict.dependencies(factor_name(factor))) {
    assign_field(r, dep.key, dep.value, dict);
  }
  return r;
}

std::string Rate::label() const {
  if (all) return "all";
  return "+" + std::to_string(static_cast<long long>(std::llround(multiple * 100))) + "%";
}

Rate Rate::parse(std::string_view text) {
  if (text == "all" || text == "ALL") return everything();
  std::string s(text);
  double scale = 1.0;
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  if (!s.empty() && s.back() == '%') {
    s.pop_back();
    scale = 0.01;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !(v >= 0) || !std::isfinite(v)) throw 0;
    return times(v * scale);
  } catch (...) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad rate '" + std::string(text) + "'");
  }
}

nlohmann::json PerturbationPlan::to_json() const {
  return nlohmann::json{{"factor", std::string(factor_name(factor))},
                        {"rate", rate.label()},
                        {"seed", seed},
                        {"base_count", base_count},
                        {"complement_count", complement_count},
                        {"adverse_after", adverse_after()},
                        {"selected_case_ids", selected_case_ids}};
}

PerturbationPlan plan(const std::vector<CrashRecord>& test, Factor factor,
                      Rate rate, std::uint64_t seed) {
  PerturbationPlan p;
  p.factor = factor;
  p.rate = rate;
  p.seed = seed;
  std::vector<std::string> complement;
  for (const auto& r : test) {
    if (base_predicate(r, factor)) {
      ++p.base_count;
    } else {
      complement.push_back(r.case_id);
    }
  }
  p.complement_count = complement.size();
  if (complement.empty()) {
    throw Error(ErrorCode::kEmptyComplement,
                "no non-adverse cases to perturb for " +
                    std::string(factor_name(factor)));
  }
  std::size_t k = complement.size();
  if (!rate.all) {
    const auto want = static_cast<std::size_t>(
        std::llround(static_cast<double>(p.base_count) * rate.multiple));
    k = std::min(want, complement.size());
  }
  std::sort(complement.begin(), complement.end());
  CounterRng rng(seed, 0x77686174ULL + static_cast<std::uint64_t>(factor));
  rng.partial_shuffle(complement, k);
  complement.resize(k);
  std::sort(complement.begin(), complement.end());
  p.selected_case_ids = std::move(complement);
  return p;
}

std::vector<CrashRecord> apply_records(const std::vector<CrashRecord>& test,
                                       const PerturbationPlan& plan,
                                       const FeatureDictionary& dict) {
  const std::set<std::string> selected(plan.selected_case_ids.begin(),
                                       plan.selected_case_ids.end());
  std::vector<CrashRecord> out;
  out.reserve(test.size());
  for (const auto& r : test) {
    out.push_back(selected.count(r.case_id) ? rewrite(r, plan.factor, dict)
                                            : r);
  }
  return out;
}

std::vector<PerturbedCase> apply(const std::vector<CrashRecord>& test,
                                 const PerturbationPlan& plan,
                                 const TemplateSet& templates,
                                 const FeatureDictionary& dict) {
  const std::set<std::string> selected(plan.selected_case_ids.begin(),
                                       plan.selected_case_ids.end());
  std::vector<PerturbedCase> out;
  out.reserve(test.size());
  for (const auto& r : test) {
    PerturbedCase c;
    c.perturbed = selected.count(r.case_id) > 0;
    c.record = c.perturbed ? rewrite(r, plan.factor, dict) : r;
    c.user_text =
        join_user_text(render_paragraphs(c.record, templates, dict));
    out.push_back(std::move(c));
  }
  return out;
}

nlohmann::json ShiftReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    rows.push_back({{"class", classes[c]},
                    {"before", before[c]},
                    {"after", after[c]},
                    {"delta", delta[c]},
                    {"relative", relative[c]}});
  }
  return rows;
}

std::string ShiftReport::plot_csv() const {
  std::string out = "class,delta\n";
  for (std::size_t c = 0; c < classes.size(); ++c) {
    out += classes[c] + "," + std::to_string(delta[c]) + "\n";
  }
  return out;
}

ShiftReport shift_report(std::span<const std::size_t> before,
                         std::span<const std::size_t> after,
                         const std::vector<std::string>& classes) {
  if (before.size() != after.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "before/after prediction vectors differ in length");
  }
  ShiftReport s;
  s.classes = classes;
  s.before.assign(classes.size(), 0);
  s.after.assign(classes.size(), 0);
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i] >= classes.size() || after[i] >= classes.size()) {
      throw Error(ErrorCode::kUnknownLabel, "prediction outside class set");
    }
    ++s.before[before[i]];
    ++s.after[after[i]];
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    s.delta.push_back(s.after[c] - s.before[c]);
    s.relative.push_back(static_cast<double>(s.delta[c]) /
                         static_cast<double>(std::max(s.before[c], 1LL)));
  }
  return s;
}

}  // namespace crashkit

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

#include "crashkit/encoder.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string_view>

#include "crashkit/error.h"

namespace crashkit {

namespace {

constexpr std::string_view kMissingColumn = "<missing>";

std::optional<double> to_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Numeric value of a field in a view: the single value, or the mean over
// present unit values.
std::optional<double> numeric_value(const FieldValues* values) {
  if (values == nullptr || values->empty()) return std::nullopt;
  double sum = 0;
  std::size_t n = 0;
  for (const auto& s : *values) {
    if (auto v = to_number(s)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

const FieldValues* lookup(const FieldView& view, std::string_view key) {
  auto it = view.find(key);
  return it == view.end() ? nullptr : &it->second;
}

}  // namespace

Encoder Encoder::fit(const std::vector<CrashRecord>& train,
                     const FeatureDictionary& dict) {
  Encoder e;
  e.dict_ = dict;
  std::vector<FieldView> views;
  views.reserve(train.size());
  for (const auto& r : train) views.push_back(record_view(r, dict));

  for (const FieldSpec* spec : dict.feature_fields()) {
    if (spec->kind == FieldKind::kText) continue;
    FieldEncoding f;
    f.key = spec->key;
    f.kind = spec->kind;
    f.scope = spec->scope;
    f.offset = e.names_.size();
    if (spec->kind == FieldKind::kCategorical) {
      std::set<std::string> seen;
      for (const auto& v : views) {
        if (const auto* vals = lookup(v, f.key)) {
          seen.insert(vals->begin(), vals->end());
        }
      }
      f.categories.assign(seen.begin(), seen.end());
      for (const auto& c : f.categories) e.names_.push_back(f.key + "=" + c);
    } else if (spec->kind == FieldKind::kNumeric) {
      double sum = 0, sum_sq = 0;
      std::size_t n = 0;
      for (const auto& v : views) {
        if (auto x = numeric_value(lookup(v, f.key))) {
          sum += *x;
          sum_sq += *x * *x;
          ++n;
        }
      }
      if (n > 0) {
        f.mean = sum / static_cast<double>(n);
        const double var =
            std::max(0.0, sum_sq / static_cast<double>(n) - f.mean * f.mean);
        f.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
      }
      e.names_.push_back(f.key);
    } else {
      e.names_.push_back(f.key);
    }
    e.names_.push_back(f.key + "=" + std::string(kMissingColumn));
    e.fields_.push_back(std::move(f));
  }
  return e;
}

void Encoder::encode_into(const CrashRecord& record,
                          std::span<double> out) const {
  if (out.size() != width()) {
    throw Error(ErrorCode::kDimensionMismatch, "output row has wrong width");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const FieldView view = record_view(record, dict_);
  for (const auto& f : fields_) {
    const FieldValues* vals = lookup(view, f.key);
    switch (f.kind) {
      case FieldKind::kCategorical: {
        const std::size_t missing_col = f.offset + f.categories.size();
        if (vals != nullptr) {
          for (const auto& v : *vals) {
            auto it =
                std::lower_bound(f.categories.begin(), f.categories.end(), v);
            if (it != f.categories.end() && *it == v) {
              out[f.offset + (it - f.categories.begin())] += 1.0;
            } else {
              out[missing_col] += 1.0;
            }
          }
        }
        if (f.scope == FieldScope::kUnit) {
          const std::size_t reported = vals ? vals->size() : 0;
          if (record.units.size() > reported) {
            out[missing_col] +=
                static_cast<double>(record.units.size() - reported);
          }
        } else if (vals == nullptr || vals->empty()) {
          out[missing_col] = 1.0;
        }
        break;
      }
      case FieldKind::kNumeric: {
        if (auto x = numeric_value(vals)) {
          out[f.offset] = (*x - f.mean) / f.scale;
        } else {
          out[f.offset + 1] = 1.0;
        }
        break;
      }
      case FieldKind::kBoolean: {
        std::optional<bool> b;
        if (vals != nullptr && !vals->empty()) b = parse_bool(vals->front());
        if (b) {
          out[f.offset] = *b ? 1.0 : 0.0;
        } else {
          out[f.offset + 1] = 1.0;
        }
        break;
      }
      case FieldKind::kText:
        break;
    }
  }
}

std::vector<double> Encoder::encode(const CrashRecord& record) const {
  std::vector<double> row(width());
  encode_into(record, row);
  return row;
}

Matrix Encoder::transform(const std::vector<CrashRecord>& records) const {
  Matrix m(records.size(), width());
  for (std::size_t i = 0; i < records.size(); ++i) {
    encode_into(records[i], m.row(i));
  }
  return m;
}

nlohmann::json Encoder::to_json() const {
  nlohmann::json fields = nlohmann::json::array();
  for (const auto& f : fields_) {
    fields.push_back({{"key", f.key},
                      {"kind", std::string(kind_name(f.kind))},
                      {"categories", f.categories},
                      {"mean", f.mean},
                      {"scale", f.scale}});
  }
  return {{"dictionary_version", dict_.version()},
          {"dictionary_hash", dict_.hash()},
          {"fields", fields}};
}

Encoder Encoder::from_json(const nlohmann::json& j,
                           const FeatureDictionary& dict) {
  Encoder e;
  e.dict_ = dict;
  try {
    if (j.at("dictionary_hash").get<std::string>() != dict.hash()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "model was trained with a different feature dictionary");
    }
    for (const auto& jf : j.at("fields")) {
      FieldEncoding f;
      f.key = jf.at("key").get<std::string>();
      const FieldSpec& spec = dict.at(f.key);
      f.kind = spec.kind;
      f.scope = spec.scope;
      f.categories = jf.at("categories").get<std::vector<std::string>>();
      f.mean = jf.at("mean").get<double>();
      f.scale = jf.at("scale").get<double>();
      f.offset = e.names_.size();
      if (f.kind == FieldKind::kCategorical) {
        for (const auto& c : f.categories) e.names_.push_back(f.key + "=" + c);
      } else {
        e.names_.push_back(f.key);
      }
      e.names_.push_back(f.key + "=" + std::string(kMissingColumn));
      e.fields_.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("bad encoder: ") + ex.what());
  }
  return e;
}

EncodedDataset encode_dataset(const Encoder& encoder,
                              const std::vector<CrashRecord>& records,
                              Task task) {
  EncodedDataset d;
  d.x = encoder.transform(records);
  d.classes = class_names(task);
  for (const auto& r : records) {
    d.y.push_back(class_index(r.labels, task));
    d.case_ids.push_back(r.case_id);
  }
  return d;
}

}  // namespace crashkit

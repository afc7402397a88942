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

#ifndef CRASHKIT_ENCODER_H_
#define CRASHKIT_ENCODER_H_

#include <span>
#include <string>
#include <vector>

#include "crashkit/feature_dictionary.h"
#include "crashkit/labels.h"
#include "crashkit/record.h"
#include "crashkit/tree.h"
#include "json.hpp"

namespace crashkit {

// Frozen encoding of one dictionary field. Column layout, in dictionary
// order:
//   categorical (record/narrative): one column per training category,
//       then "<key>=<missing>"; an unseen category encodes as Missing.
//   categorical (list/unit): per-category counts, then a count of Missing
//       (or unseen) entries.
//   numeric: standardized value (0 when Missing), then a Missing indicator.
//       Unit-scope numerics use the mean over units that report a value.
//   boolean: 0/1, then a Missing indicator.
// Text fields are not encoded.
struct FieldEncoding {
  std::string key;
  FieldKind kind = FieldKind::kCategorical;
  FieldScope scope = FieldScope::kRecord;
  std::vector<std::string> categories;  // sorted
  double mean = 0;
  double scale = 1;
  std::size_t offset = 0;
};

class Encoder {
 public:
  // Statistics come from `train` only.
  static Encoder fit(const std::vector<CrashRecord>& train,
                     const FeatureDictionary& dict);

  std::size_t width() const { return names_.size(); }
  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<FieldEncoding>& fields() const { return fields_; }

  void encode_into(const CrashRecord& record, std::span<double> out) const;
  std::vector<double> encode(const CrashRecord& record) const;
  Matrix transform(const std::vector<CrashRecord>& records) const;

  nlohmann::json to_json() const;
  // Throws kSchemaMismatch when `dict` is not the dictionary the encoder
  // was fitted with.
  static Encoder from_json(const nlohmann::json& j,
                           const FeatureDictionary& dict);

 private:
  FeatureDictionary dict_;
  std::vector<FieldEncoding> fields_;
  std::vector<std::string> names_;
};

struct EncodedDataset {
  Matrix x;
  std::vector<std::size_t> y;
  std::vector<std::string> case_ids;
  std::vector<std::string> classes;
};

EncodedDataset encode_dataset(const Encoder& encoder,
                              const std::vector<CrashRecord>& records,
                              Task task);

}  // namespace crashkit

#endif  // CRASHKIT_ENCODER_H_

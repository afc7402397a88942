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

#ifndef CRASHKIT_EVAL_H_
#define CRASHKIT_EVAL_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashkit/labels.h"
#include "json.hpp"

namespace crashkit {

// Rows are truth, columns are predictions.
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  std::vector<std::vector<long long>> counts;

  explicit ConfusionMatrix(std::vector<std::string> classes = {});
  long long total() const;
  // Adds another matrix over the same classes (partial counts from
  // parallel scoring). Throws kDimensionMismatch.
  void merge(const ConfusionMatrix& other);
  nlohmann::json to_json() const;
};

// Throws kLengthMismatch, kUnknownLabel.
ConfusionMatrix confusion(std::span<const std::size_t> truth,
                          std::span<const std::size_t> pred,
                          const std::vector<std::string>& classes);
ConfusionMatrix confusion(const std::vector<std::string>& truth,
                          const std::vector<std::string>& pred,
                          const std::vector<std::string>& classes);

struct Metrics {
  double accuracy = 0;
  double precision = 0;  // weighted by true-class prevalence
  double recall = 0;     // weighted; always equals accuracy
  double f1 = 0;         // per-class F1, weighted
};

// Throws kEmptyMatrix when the matrix has no cases.
Metrics metrics(const ConfusionMatrix& cm);

// The twelve cells of a comparison row, ordered metric-major:
// accuracy(injury, severity, type), precision(...), recall(...), f1(...).
inline constexpr std::size_t kRankColumns = 12;
std::vector<std::string> rank_column_names();

struct MetricRow {
  std::string model_name;
  std::array<std::optional<double>, kRankColumns> cells{};

  void set(Task task, const Metrics& m);
  nlohmann::json to_json() const;
  static MetricRow from_json(const nlohmann::json& j);
};

struct RankedRow {
  MetricRow row;
  std::array<double, kRankColumns> ranks{};
  double score = 0;  // mean of the column ranks
};

// Within each column rank 1 is the highest value and ties share the
// average of their positions; rows are returned by ascending score (then
// name). Throws kInvalidArgument for fewer than two rows, kMissingCell.
std::vector<RankedRow> rank_table(const std::vector<MetricRow>& rows);

// Reports round to three decimals; the math above is full precision.
std::string format_confusion(const ConfusionMatrix& cm);
std::string format_rank_table(const std::vector<RankedRow>& ranked);
nlohmann::json metrics_json(const Metrics& m);
nlohmann::json rank_table_json(const std::vector<RankedRow>& ranked);

}  // namespace crashkit

#endif  // CRASHKIT_EVAL_H_

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

#ifndef CRASHKIT_MODELS_H_
#define CRASHKIT_MODELS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crashkit/random.h"
#include "crashkit/tree.h"
#include "json.hpp"

namespace crashkit {

// Baseline families. naive_bayes discretizes every column into quantile
// bins; gbdt is one-vs-rest gradient boosting with logistic loss and
// second-order leaves.
enum class ModelKind { kLogReg, kTree, kForest, kAdaBoost, kNaiveBayes, kGbdt };

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::kForest,     ModelKind::kAdaBoost, ModelKind::kGbdt,
    ModelKind::kNaiveBayes, ModelKind::kTree,     ModelKind::kLogReg};

std::string_view model_kind_name(ModelKind kind);  // "logreg", "forest", ...
ModelKind model_kind_from_name(std::string_view name);
std::string_view model_display_name(ModelKind kind);  // "LR", "RF", ...

struct ModelSpec {
  ModelKind kind = ModelKind::kTree;
  int max_depth = 8;
  std::size_t n_estimators = 1;
  double learning_rate = 0.5;
  double l2 = 1e-3;
  std::size_t epochs = 150;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0: sqrt(d) for forests, all otherwise
  bool bootstrap = true;         // forests only
  double alpha = 1.0;            // naive Bayes Laplace smoothing
  std::size_t max_bins = 64;
  std::uint64_t seed = kDefaultSeed;

  static ModelSpec defaults(ModelKind kind);
  void validate() const;  // throws kInvalidArgument
  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

// Fitted parameters of one model family.
class ModelImpl {
 public:
  virtual ~ModelImpl() = default;
  virtual std::vector<double> scores(std::span<const double> row) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

// Index of the largest score; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores);

// A trained, immutable classifier. Copies share the fitted parameters.
class Classifier {
 public:
  // Throws kEmptyMatrix for no rows, kLengthMismatch, kUnknownLabel. A
  // training set with a single class yields a constant (degenerate) model.
  static Classifier train(const ModelSpec& spec, const Matrix& x,
                          std::span<const std::size_t> y,
                          std::size_t n_classes);

  // Throws kDimensionMismatch when the row width differs from training.
  std::vector<double> scores(std::span<const double> row) const;
  std::size_t predict_one(std::span<const double> row) const;
  std::vector<std::size_t> predict(const Matrix& x) const;

  const ModelSpec& spec() const { return spec_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return n_classes_; }
  bool degenerate() const { return degenerate_; }

  nlohmann::json to_json() const;
  static Classifier from_json(const nlohmann::json& j);

 private:
  ModelSpec spec_;
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
  bool degenerate_ = false;
  std::shared_ptr<const ModelImpl> impl_;
};

// Multinomial logistic regression objective, exposed for gradient checks.
// `w` holds n_classes rows of [bias, w_1 .. w_d]:
//   loss = mean cross-entropy + l2/2 * sum of non-bias weights squared.
// When `grad` is non-null it receives d loss / d w.
double logreg_objective(const Matrix& x, std::span<const std::size_t> y,
                        std::size_t n_classes, std::span<const double> w,
                        double l2, std::vector<double>* grad);

}  // namespace crashkit

#endif  // CRASHKIT_MODELS_H_

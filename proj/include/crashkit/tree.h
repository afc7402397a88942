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

#ifndef CRASHKIT_TREE_H_
#define CRASHKIT_TREE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "crashkit/random.h"
#include "json.hpp"

namespace crashkit {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Per-feature threshold lists and the bin code of every cell. Bin b of
// feature f holds values in (t[b-1], t[b]]; splitting after bin b sends
// x <= t[b] left.
class BinnedMatrix {
 public:
  BinnedMatrix(const Matrix& x, std::size_t max_bins);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint16_t code(std::size_t i, std::size_t f) const {
    return codes_[f * rows_ + i];
  }
  std::size_t bin_count(std::size_t f) const {
    return thresholds_[f].size() + 1;
  }
  const std::vector<double>& thresholds(std::size_t f) const {
    return thresholds_[f];
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::vector<double>> thresholds_;
  std::vector<std::uint16_t> codes_;  // column-major
};

struct TreeParams {
  int max_depth = 8;
  std::size_t min_samples_leaf = 1;
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;  // features tried per split; 0 = all
  double l2 = 0.0;               // regression leaves only
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  // Leaf payload: normalized class distribution, or a single leaf value.
  std::vector<double> value;
};

class DecisionTree {
 public:
  // CART with weighted Gini impurity. `samples` may repeat indices
  // (bootstrap). `rng` is consulted only when params.max_features limits the
  // candidate features.
  static DecisionTree fit_classifier(const BinnedMatrix& x,
                                     std::span<const std::size_t> labels,
                                     std::span<const double> weights,
                                     std::size_t n_classes,
                                     std::vector<std::size_t> samples,
                                     const TreeParams& params,
                                     CounterRng* rng = nullptr);

  // Second-order regression tree: leaves hold -G / (H + l2).
  static DecisionTree fit_regressor(const BinnedMatrix& x,
                                    std::span<const double> gradients,
                                    std::span<const double> hessians,
                                    std::vector<std::size_t> samples,
                                    const TreeParams& params);

  const std::vector<double>& predict(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace crashkit

#endif  // CRASHKIT_TREE_H_

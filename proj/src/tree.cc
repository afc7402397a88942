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

#include "crashkit/tree.h"

#include <algorithm>
#include <functional>
#include <numeric>

#include "crashkit/error.h"

namespace crashkit {

BinnedMatrix::BinnedMatrix(const Matrix& x, std::size_t max_bins)
    : rows_(x.rows), cols_(x.cols), thresholds_(x.cols),
      codes_(x.rows * x.cols, 0) {
  if (max_bins < 2 || max_bins > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "max_bins must be in [2, 65535]");
  }
  std::vector<double> column(rows_);
  for (std::size_t f = 0; f < cols_; ++f) {
    for (std::size_t i = 0; i < rows_; ++i) column[i] = x.at(i, f);
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> unique = sorted;
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    auto& t = thresholds_[f];
    if (unique.size() <= max_bins) {
      for (std::size_t u = 0; u + 1 < unique.size(); ++u) {
        t.push_back(0.5 * (unique[u] + unique[u + 1]));
      }
    } else {
      for (std::size_t k = 1; k < max_bins; ++k) {
        const double v = sorted[k * sorted.size() / max_bins];
        if (v < unique.back() && (t.empty() || v > t.back())) t.push_back(v);
      }
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      codes_[f * rows_ + i] = static_cast<std::uint16_t>(
          std::lower_bound(t.begin(), t.end(), column[i]) - t.begin());
    }
  }
}

namespace {

struct Split {
  bool found = false;
  std::size_t feature = 0;
  std::size_t bin = 0;
  double gain = 0;
};

// Candidate features for one split: all of them in order, or a random
// max_features-subset (sorted so that ties still break on the lowest index).
std::vector<std::size_t> candidate_features(std::size_t n,
                                            std::size_t max_features,
                                            CounterRng* rng) {
  std::vector<std::size_t> fs(n);
  std::iota(fs.begin(), fs.end(), 0);
  if (max_features == 0 || max_features >= n || rng == nullptr) return fs;
  rng->partial_shuffle(fs, max_features);
  fs.resize(max_features);
  std::sort(fs.begin(), fs.end());
  return fs;
}

class ClassifierBuilder {
 public:
  ClassifierBuilder(const BinnedMatrix& x, std::span<const std::size_t> y,
                    std::span<const double> w, std::size_t k,
                    const TreeParams& p, CounterRng* rng,
                    std::vector<TreeNode>& nodes)
      : x_(x), y_(y), w_(w), k_(k), p_(p), rng_(rng), nodes_(nodes) {}

  int build(std::vector<std::size_t> samples, int depth) {
    std::vector<double> dist(k_, 0.0);
    double total = 0;
    for (std::size_t i : samples) {
      dist[y_[i]] += w_[i];
      total += w_[i];
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::size_t nonzero = 0;
    for (double d : dist) nonzero += d > 0;
    for (double& d : dist) {
      d = total > 0 ? d / total : 1.0 / static_cast<double>(k_);
    }
    nodes_[id].value = dist;
    if (depth >= p_.max_depth || samples.size() < p_.min_samples_split ||
        nonzero <= 1 || total <= 0) {
      return id;
    }
    const Split s = best_split(samples);
    if (!s.found) return id;
    std::vector<std::size_t> left, right;
    for (std::size_t i : samples) {
      (x_.code(i, s.feature) <= s.bin ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[id].feature = static_cast<int>(s.feature);
    nodes_[id].threshold = x_.thresholds(s.feature)[s.bin];
    nodes_[id].value.clear();
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

 private:
  Split best_split(const std::vector<std::size_t>& samples) {
    Split best;
    std::vector<double> parent(k_, 0.0);
    double w_total = 0;
    for (std::size_t i : samples) {
      parent[y_[i]] += w_[i];
      w_total += w_[i];
    }
    double parent_score = 0;
    for (double v : parent) parent_score += v * v;
    parent_score /= w_total;

    for (std::size_t f : candidate_features(x_.cols(), p_.max_features, rng_)) {
      const std::size_t bins = x_.bin_count(f);
      if (bins < 2) continue;
      hist_.assign(bins * k_, 0.0);
      counts_.assign(bins, 0);
      for (std::size_t i : samples) {
        const std::size_t b = x_.code(i, f);
        hist_[b * k_ + y_[i]] += w_[i];
        ++counts_[b];
      }
      std::vector<double> left(k_, 0.0);
      double w_left = 0;
      std::size_t n_left = 0;
      for (std::size_t b = 0; b + 1 < bins; ++b) {
        for (std::size_t c = 0; c < k_; ++c) {
          left[c] += hist_[b * k_ + c];
          w_left += hist_[b * k_ + c];
        }
        n_left += counts_[b];
        const std::size_t n_right = samples.size() - n_left;
        if (n_left < p_.min_samples_leaf) continue;
        if (n_right < p_.min_samples_leaf) break;
        const double w_right = w_total - w_left;
        if (w_left <= 0 || w_right <= 0) continue;
        double sl = 0, sr = 0;
        for (std::size_t c = 0; c < k_; ++c) {
          const double r = parent[c] - left[c];
          sl += left[c] * left[c];
          sr += r * r;
        }
        const double gain = sl / w_left + sr / w_right - parent_score;
        // Zero-gain splits are allowed (as in standard CART) so that
        // interactions such as XOR remain reachable by a greedy search.
        if (gain > -1e-12 && (!best.found || gain > best.gain + 1e-12)) {
          best = {true, f, b, gain};
        }
      }
    }
    return best;
  }

  const BinnedMatrix& x_;
  std::span<const std::size_t> y_;
  std::span<const double> w_;
  std::size_t k_;
  const TreeParams& p_;
  CounterRng* rng_;
  std::vector<TreeNode>& nodes_;
  std::vector<double> hist_;
  std::vector<std::size_t> counts_;
};

class RegressorBuilder {
 public:
  RegressorBuilder(const BinnedMatrix& x, std::span<const double> g,
                   std::span<const double> h, const TreeParams& p,
                   std::vector<TreeNode>& nodes)
      : x_(x), g_(g), h_(h), p_(p), nodes_(nodes) {}

  int build(std::vector<std::size_t> samples, int depth) {
    double G = 0, H = 0;
    for (std::size_t i : samples) {
      G += g_[i];
      H += h_[i];
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const double denom = H + p_.l2;
    nodes_[id].value = {denom > 0 ? -G / denom : 0.0};
    if (depth >= p_.max_depth || samples.size() < p_.min_samples_split) {
      return id;
    }
    const Split s = best_split(samples, G, H);
    if (!s.found) return id;
    std::vector<std::size_t> left, right;
    for (std::size_t i : samples) {
      (x_.code(i, s.feature) <= s.bin ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[id].feature = static_cast<int>(s.feature);
    nodes_[id].threshold = x_.thresholds(s.feature)[s.bin];
    nodes_[id].value.clear();
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

 private:
  double score(double g, double h) const {
    const double d = h + p_.l2;
    return d > 0 ? g * g / d : 0.0;
  }

  Split best_split(const std::vector<std::size_t>& samples, double G,
                   double H) {
    Split best;
    const double parent = score(G, H);
    for (std::size_t f = 0; f < x_.cols(); ++f) {
      const std::size_t bins = x_.bin_count(f);
      if (bins < 2) continue;
      hg_.assign(bins, 0.0);
      hh_.assign(bins, 0.0);
      counts_.assign(bins, 0);
      for (std::size_t i : samples) {
        const std::size_t b = x_.code(i, f);
        hg_[b] += g_[i];
        hh_[b] += h_[i];
        ++counts_[b];
      }
      double gl = 0, hl = 0;
      std::size_t n_left = 0;
      for (std::size_t b = 0; b + 1 < bins; ++b) {
        gl += hg_[b];
        hl += hh_[b];
        n_left += counts_[b];
        if (n_left < p_.min_samples_leaf) continue;
        if (samples.size() - n_left < p_.min_samples_leaf) break;
        const double gain = score(gl, hl) + score(G - gl, H - hl) - parent;
        if (gain > 1e-12 && (!best.found || gain > best.gain + 1e-12)) {
          best = {true, f, b, gain};
        }
      }
    }
    return best;
  }

  const BinnedMatrix& x_;
  std::span<const double> g_;
  std::span<const double> h_;
  const TreeParams& p_;
  std::vector<TreeNode>& nodes_;
  std::vector<double> hg_, hh_;
  std::vector<std::size_t> counts_;
};

}  // namespace

DecisionTree DecisionTree::fit_classifier(const BinnedMatrix& x,
                                          std::span<const std::size_t> labels,
                                          std::span<const double> weights,
                                          std::size_t n_classes,
                                          std::vector<std::size_t> samples,
                                          const TreeParams& params,
                                          CounterRng* rng) {
  if (labels.size() != x.rows() || weights.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "labels/weights do not match rows");
  }
  if (n_classes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no classes");
  }
  for (std::size_t y : labels) {
    if (y >= n_classes) throw Error(ErrorCode::kUnknownLabel, "label out of range");
  }
  DecisionTree tree;
  ClassifierBuilder(x, labels, weights, n_classes, params, rng, tree.nodes_)
      .build(std::move(samples), 0);
  return tree;
}

DecisionTree DecisionTree::fit_regressor(const BinnedMatrix& x,
                                         std::span<const double> gradients,
                                         std::span<const double> hessians,
                                         std::vector<std::size_t> samples,
                                         const TreeParams& params) {
  if (gradients.size() != x.rows() || hessians.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch,
                "gradients/hessians do not match rows");
  }
  DecisionTree tree;
  RegressorBuilder(x, gradients, hessians, params, tree.nodes_)
      .build(std::move(samples), 0);
  return tree;
}

const std::vector<double>& DecisionTree::predict(
    std::span<const double> row) const {
  int n = 0;
  while (nodes_[n].feature >= 0) {
    const auto& node = nodes_[n];
    n = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[n].value;
}

int DecisionTree::depth() const {
  std::function<int(int)> d = [&](int n) -> int {
    if (nodes_[n].feature < 0) return 0;
    return 1 + std::max(d(nodes_[n].left), d(nodes_[n].right));
  };
  return nodes_.empty() ? 0 : d(0);
}

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json f = nlohmann::json::array(), t = nlohmann::json::array(),
                 l = nlohmann::json::array(), r = nlohmann::json::array(),
                 v = nlohmann::json::array();
  for (const auto& n : nodes_) {
    f.push_back(n.feature);
    t.push_back(n.threshold);
    l.push_back(n.left);
    r.push_back(n.right);
    v.push_back(n.value);
  }
  return {{"feature", f}, {"threshold", t}, {"left", l}, {"right", r},
          {"value", v}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  DecisionTree tree;
  try {
    const auto& f = j.at("feature");
    for (std::size_t i = 0; i < f.size(); ++i) {
      TreeNode n;
      n.feature = f[i].get<int>();
      n.threshold = j.at("threshold")[i].get<double>();
      n.left = j.at("left")[i].get<int>();
      n.right = j.at("right")[i].get<int>();
      n.value = j.at("value")[i].get<std::vector<double>>();
      tree.nodes_.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad tree: ") + e.what());
  }
  const int size = static_cast<int>(tree.nodes_.size());
  if (size == 0) throw Error(ErrorCode::kParse, "bad tree: no nodes");
  for (int i = 0; i < size; ++i) {
    const auto& n = tree.nodes_[i];
    if (n.feature >= 0 && (n.left <= i || n.left >= size || n.right <= i ||
                           n.right >= size)) {
      throw Error(ErrorCode::kParse, "bad tree: child index out of range");
    }
  }
  return tree;
}

}  // namespace crashkit

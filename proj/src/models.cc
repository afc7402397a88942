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

#include "crashkit/models.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crashkit/error.h"

namespace crashkit {

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kTree: return "tree";
    case ModelKind::kForest: return "forest";
    case ModelKind::kAdaBoost: return "adaboost";
    case ModelKind::kNaiveBayes: return "naive_bayes";
    case ModelKind::kGbdt: return "gbdt";
  }
  return "";
}

ModelKind model_kind_from_name(std::string_view name) {
  for (ModelKind k : kAllModelKinds) {
    if (model_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown model kind '" + std::string(name) + "'");
}

std::string_view model_display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogReg: return "LR";
    case ModelKind::kTree: return "DT";
    case ModelKind::kForest: return "RF";
    case ModelKind::kAdaBoost: return "AdaBoost";
    case ModelKind::kNaiveBayes: return "NB";
    case ModelKind::kGbdt: return "GBDT";
  }
  return "";
}

ModelSpec ModelSpec::defaults(ModelKind kind) {
  ModelSpec s;
  s.kind = kind;
  switch (kind) {
    case ModelKind::kLogReg:
      s.learning_rate = 0.5;
      s.l2 = 1e-3;
      s.epochs = 150;
      break;
    case ModelKind::kTree:
      s.max_depth = 8;
      s.min_samples_leaf = 5;
      break;
    case ModelKind::kForest:
      s.n_estimators = 30;
      s.max_depth = 10;
      s.min_samples_leaf = 2;
      break;
    case ModelKind::kAdaBoost:
      s.n_estimators = 50;
      s.max_depth = 1;
      s.learning_rate = 1.0;
      break;
    case ModelKind::kNaiveBayes:
      s.alpha = 1.0;
      s.max_bins = 10;
      break;
    case ModelKind::kGbdt:
      s.n_estimators = 30;
      s.max_depth = 3;
      s.learning_rate = 0.2;
      s.l2 = 1.0;
      s.min_samples_leaf = 5;
      break;
  }
  return s;
}

void ModelSpec::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "model spec: " + what);
  };
  if (max_depth < 0) bad("max_depth must be >= 0");
  if (n_estimators == 0) bad("n_estimators must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    bad("learning_rate must be > 0");
  }
  if (!(l2 >= 0)) bad("l2 must be >= 0");
  if (min_samples_leaf == 0) bad("min_samples_leaf must be >= 1");
  if (!(alpha > 0)) bad("alpha must be > 0");
  if (max_bins < 2 || max_bins > 65535) bad("max_bins must be in [2, 65535]");
}

nlohmann::json ModelSpec::to_json() const {
  return {{"kind", std::string(model_kind_name(kind))},
          {"max_depth", max_depth},
          {"n_estimators", n_estimators},
          {"learning_rate", learning_rate},
          {"l2", l2},
          {"epochs", epochs},
          {"min_samples_leaf", min_samples_leaf},
          {"max_features", max_features},
          {"bootstrap", bootstrap},
          {"alpha", alpha},
          {"max_bins", max_bins},
          {"seed", seed}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  try {
    ModelSpec s = defaults(model_kind_from_name(j.at("kind").get<std::string>()));
    s.max_depth = j.value("max_depth", s.max_depth);
    s.n_estimators = j.value("n_estimators", s.n_estimators);
    s.learning_rate = j.value("learning_rate", s.learning_rate);
    s.l2 = j.value("l2", s.l2);
    s.epochs = j.value("epochs", s.epochs);
    s.min_samples_leaf = j.value("min_samples_leaf", s.min_samples_leaf);
    s.max_features = j.value("max_features", s.max_features);
    s.bootstrap = j.value("bootstrap", s.bootstrap);
    s.alpha = j.value("alpha", s.alpha);
    s.max_bins = j.value("max_bins", s.max_bins);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad model spec: ") + e.what());
  }
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

namespace {

TreeParams tree_params(const ModelSpec& s, std::size_t max_features) {
  TreeParams p;
  p.max_depth = s.max_depth;
  p.min_samples_leaf = s.min_samples_leaf;
  p.min_samples_split = std::max<std::size_t>(2, 2 * s.min_samples_leaf);
  p.max_features = max_features;
  p.l2 = s.l2;
  return p;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

nlohmann::json trees_json(const std::vector<DecisionTree>& trees) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& t : trees) a.push_back(t.to_json());
  return a;
}

std::vector<DecisionTree> trees_from_json(const nlohmann::json& a) {
  std::vector<DecisionTree> trees;
  for (const auto& t : a) trees.push_back(DecisionTree::from_json(t));
  return trees;
}

// ---------------------------------------------------------------- constant

class ConstantModel : public ModelImpl {
 public:
  ConstantModel(std::size_t n_classes, std::size_t label)
      : scores_(n_classes, 0.0) {
    scores_[label] = 1.0;
  }
  explicit ConstantModel(std::vector<double> scores)
      : scores_(std::move(scores)) {}
  std::vector<double> scores(std::span<const double>) const override {
    return scores_;
  }
  nlohmann::json to_json() const override { return {{"scores", scores_}}; }

 private:
  std::vector<double> scores_;
};

// ---------------------------------------------------------------- logreg

// Compressed rows: encoded crash features are mostly zero.
struct SparseRows {
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  explicit SparseRows(const Matrix& x) {
    start.reserve(x.rows + 1);
    start.push_back(0);
    for (std::size_t i = 0; i < x.rows; ++i) {
      for (std::size_t j = 0; j < x.cols; ++j) {
        const double v = x.at(i, j);
        if (v != 0.0) {
          index.push_back(static_cast<std::uint32_t>(j));
          value.push_back(v);
        }
      }
      start.push_back(index.size());
    }
  }
};

double objective_sparse(const SparseRows& rows, std::size_t d,
                        std::span<const std::size_t> y, std::size_t k,
                        std::span<const double> w, double l2,
                        std::vector<double>* grad) {
  const std::size_t stride = d + 1;
  const std::size_t n = y.size();
  if (grad) grad->assign(w.size(), 0.0);
  std::vector<double> z(k);
  double loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = w[c * stride];
      for (std::size_t p = rows.start[i]; p < rows.start[i + 1]; ++p) {
        s += w[c * stride + 1 + rows.index[p]] * rows.value[p];
      }
      z[c] = s;
    }
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (double& v : z) {
      v = std::exp(v - m);
      sum += v;
    }
    loss += -(std::log(z[y[i]] / sum));
    if (grad) {
      for (std::size_t c = 0; c < k; ++c) {
        const double r = z[c] / sum - (c == y[i] ? 1.0 : 0.0);
        (*grad)[c * stride] += r;
        for (std::size_t p = rows.start[i]; p < rows.start[i + 1]; ++p) {
          (*grad)[c * stride + 1 + rows.index[p]] += r * rows.value[p];
        }
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  loss *= inv_n;
  double reg = 0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 1; j < stride; ++j) {
      const double v = w[c * stride + j];
      reg += v * v;
    }
  }
  loss += 0.5 * l2 * reg;
  if (grad) {
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < stride; ++j) {
        double& g = (*grad)[c * stride + j];
        g *= inv_n;
        if (j > 0) g += l2 * w[c * stride + j];
      }
    }
  }
  return loss;
}

class LogRegModel : public ModelImpl {
 public:
  LogRegModel(std::size_t d, std::size_t k, std::vector<double> w)
      : d_(d), k_(k), w_(std::move(w)) {}

  static std::shared_ptr<LogRegModel> fit(const ModelSpec& s, const Matrix& x,
                                          std::span<const std::size_t> y,
                                          std::size_t k) {
    const SparseRows rows(x);
    std::vector<double> w(k * (x.cols + 1), 0.0);
    std::vector<double> grad;
    for (std::size_t e = 0; e < s.epochs; ++e) {
      objective_sparse(rows, x.cols, y, k, w, s.l2, &grad);
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= s.learning_rate * grad[j];
    }
    return std::make_shared<LogRegModel>(x.cols, k, std::move(w));
  }

  std::vector<double> scores(std::span<const double> row) const override {
    std::vector<double> z(k_);
    for (std::size_t c = 0; c < k_; ++c) {
      double s = w_[c * (d_ + 1)];
      for (std::size_t j = 0; j < d_; ++j) s += w_[c * (d_ + 1) + 1 + j] * row[j];
      z[c] = s;
    }
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (double& v : z) {
      v = std::exp(v - m);
      sum += v;
    }
    for (double& v : z) v /= sum;
    return z;
  }

  nlohmann::json to_json() const override { return {{"weights", w_}}; }

 private:
  std::size_t d_;
  std::size_t k_;
  std::vector<double> w_;
};

// ---------------------------------------------------------------- trees

class ForestModel : public ModelImpl {
 public:
  ForestModel(std::vector<DecisionTree> trees, std::size_t k)
      : trees_(std::move(trees)), k_(k) {}

  std::vector<double> scores(std::span<const double> row) const override {
    std::vector<double> s(k_, 0.0);
    for (const auto& t : trees_) {
      const auto& v = t.predict(row);
      for (std::size_t c = 0; c < k_; ++c) s[c] += v[c];
    }
    for (double& v : s) v /= static_cast<double>(trees_.size());
    return s;
  }

  nlohmann::json to_json() const override {
    return {{"trees", trees_json(trees_)}};
  }

 private:
  std::vector<DecisionTree> trees_;
  std::size_t k_;
};

std::shared_ptr<ForestModel> fit_forest(const ModelSpec& s, const Matrix& x,
                                        std::span<const std::size_t> y,
                                        std::size_t k, bool single_tree) {
  const BinnedMatrix bins(x, s.max_bins);
  const std::vector<double> weights(x.rows, 1.0);
  std::size_t max_features = s.max_features;
  if (max_features == 0 && !single_tree) {
    max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(std::sqrt(x.cols))));
  }
  const TreeParams params = tree_params(s, max_features);
  const std::size_t n_trees = single_tree ? 1 : s.n_estimators;
  std::vector<DecisionTree> trees;
  for (std::size_t t = 0; t < n_trees; ++t) {
    CounterRng rng(s.seed, t + 1);
    std::vector<std::size_t> samples;
    if (!single_tree && s.bootstrap) {
      samples.resize(x.rows);
      for (auto& i : samples) i = static_cast<std::size_t>(rng.below(x.rows));
    } else {
      samples = all_rows(x.rows);
    }
    trees.push_back(DecisionTree::fit_classifier(bins, y, weights, k,
                                                 std::move(samples), params,
                                                 &rng));
  }
  return std::make_shared<ForestModel>(std::move(trees), k);
}

class AdaBoostModel : public ModelImpl {
 public:
  AdaBoostModel(std::vector<DecisionTree> stumps, std::vector<double> alphas,
                std::size_t k)
      : stumps_(std::move(stumps)), alphas_(std::move(alphas)), k_(k) {}

  // SAMME: each round fits a shallow weighted tree, weights it by
  // log((1-err)/err) + log(K-1), and up-weights its mistakes.
  static std::shared_ptr<AdaBoostModel> fit(const ModelSpec& s,
                                            const Matrix& x,
                                            std::span<const std::size_t> y,
                                            std::size_t k) {
    const BinnedMatrix bins(x, s.max_bins);
    const std::size_t n = x.rows;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    const TreeParams params = tree_params(s, 0);
    std::vector<DecisionTree> stumps;
    std::vector<double> alphas;
    const double chance = 1.0 - 1.0 / static_cast<double>(k);
    for (std::size_t m = 0; m < s.n_estimators; ++m) {
      DecisionTree t = DecisionTree::fit_classifier(bins, y, w, k, all_rows(n),
                                                    params);
      std::vector<char> wrong(n);
      double err = 0, total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        wrong[i] = argmax(t.predict(x.row(i))) != y[i];
        if (wrong[i]) err += w[i];
        total += w[i];
      }
      err /= total;
      if (err >= chance) {
        if (stumps.empty()) {
          stumps.push_back(std::move(t));
          alphas.push_back(1.0);
        }
        break;
      }
      if (err <= 1e-12) {
        stumps.push_back(std::move(t));
        alphas.push_back(stumps.size() == 1 ? 1.0 : 10.0);
        break;
      }
      const double alpha = s.learning_rate *
                           (std::log((1.0 - err) / err) +
                            std::log(static_cast<double>(k) - 1.0));
      double norm = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (wrong[i]) w[i] *= std::exp(alpha);
        norm += w[i];
      }
      for (double& v : w) v /= norm;
      stumps.push_back(std::move(t));
      alphas.push_back(alpha);
    }
    return std::make_shared<AdaBoostModel>(std::move(stumps),
                                           std::move(alphas), k);
  }

  std::vector<double> scores(std::span<const double> row) const override {
    std::vector<double> s(k_, 0.0);
    for (std::size_t m = 0; m < stumps_.size(); ++m) {
      s[argmax(stumps_[m].predict(row))] += alphas_[m];
    }
    return s;
  }

  nlohmann::json to_json() const override {
    return {{"trees", trees_json(stumps_)}, {"alphas", alphas_}};
  }

 private:
  std::vector<DecisionTree> stumps_;
  std::vector<double> alphas_;
  std::size_t k_;
};

class GbdtModel : public ModelImpl {
 public:
  GbdtModel(std::vector<double> base, std::vector<std::vector<DecisionTree>> trees,
            double lr)
      : base_(std::move(base)), trees_(std::move(trees)), lr_(lr) {}

  static std::shared_ptr<GbdtModel> fit(const ModelSpec& s, const Matrix& x,
                                        std::span<const std::size_t> y,
                                        std::size_t k) {
    const BinnedMatrix bins(x, s.max_bins);
    const std::size_t n = x.rows;
    const TreeParams params = tree_params(s, 0);
    std::vector<double> base(k);
    std::vector<std::vector<DecisionTree>> trees(k);
    std::vector<double> f(n), g(n), h(n);
    for (std::size_t c = 0; c < k; ++c) {
      double pos = 0;
      for (std::size_t i = 0; i < n; ++i) pos += y[i] == c;
      const double p = std::clamp(pos / static_cast<double>(n), 1e-6, 1 - 1e-6);
      base[c] = std::log(p / (1 - p));
      std::fill(f.begin(), f.end(), base[c]);
      for (std::size_t m = 0; m < s.n_estimators; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
          const double q = 1.0 / (1.0 + std::exp(-f[i]));
          g[i] = q - (y[i] == c ? 1.0 : 0.0);
          h[i] = std::max(q * (1 - q), 1e-12);
        }
        DecisionTree t =
            DecisionTree::fit_regressor(bins, g, h, all_rows(n), params);
        for (std::size_t i = 0; i < n; ++i) {
          f[i] += s.learning_rate * t.predict(x.row(i))[0];
        }
        trees[c].push_back(std::move(t));
      }
    }
    return std::make_shared<GbdtModel>(std::move(base), std::move(trees),
                                       s.learning_rate);
  }

  std::vector<double> scores(std::span<const double> row) const override {
    std::vector<double> s(base_.size());
    for (std::size_t c = 0; c < base_.size(); ++c) {
      double f = base_[c];
      for (const auto& t : trees_[c]) f += lr_ * t.predict(row)[0];
      s[c] = 1.0 / (1.0 + std::exp(-f));
    }
    return s;
  }

  nlohmann::json to_json() const override {
    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& ts : trees_) per_class.push_back(trees_json(ts));
    return {{"base", base_}, {"learning_rate", lr_}, {"trees", per_class}};
  }

 private:
  std::vector<double> base_;
  std::vector<std::vector<DecisionTree>> trees_;
  double lr_;
};

// ---------------------------------------------------------------- bayes

class NaiveBayesModel : public ModelImpl {
 public:
  NaiveBayesModel(std::vector<double> log_prior,
                  std::vector<std::vector<double>> thresholds,
                  std::vector<std::vector<double>> log_lik)
      : log_prior_(std::move(log_prior)),
        thresholds_(std::move(thresholds)),
        log_lik_(std::move(log_lik)) {}

  // Categorical naive Bayes over binned columns with Laplace smoothing.
  static std::shared_ptr<NaiveBayesModel> fit(const ModelSpec& s,
                                              const Matrix& x,
                                              std::span<const std::size_t> y,
                                              std::size_t k) {
    const BinnedMatrix bins(x, s.max_bins);
    const std::size_t n = x.rows;
    std::vector<double> class_n(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) class_n[y[i]] += 1;
    std::vector<double> log_prior(k);
    for (std::size_t c = 0; c < k; ++c) {
      log_prior[c] = std::log((class_n[c] + s.alpha) /
                              (static_cast<double>(n) + s.alpha * static_cast<double>(k)));
    }
    std::vector<std::vector<double>> thresholds(x.cols), log_lik(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
      const std::size_t b = bins.bin_count(f);
      thresholds[f] = bins.thresholds(f);
      std::vector<double> counts(b * k, 0.0);
      for (std::size_t i = 0; i < n; ++i) counts[bins.code(i, f) * k + y[i]] += 1;
      auto& ll = log_lik[f];
      ll.resize(b * k);
      for (std::size_t v = 0; v < b; ++v) {
        for (std::size_t c = 0; c < k; ++c) {
          ll[v * k + c] = std::log((counts[v * k + c] + s.alpha) /
                                   (class_n[c] + s.alpha * static_cast<double>(b)));
        }
      }
    }
    return std::make_shared<NaiveBayesModel>(
        std::move(log_prior), std::move(thresholds), std::move(log_lik));
  }

  std::vector<double> scores(std::span<const double> row) const override {
    const std::size_t k = log_prior_.size();
    std::vector<double> s = log_prior_;
    for (std::size_t f = 0; f < thresholds_.size(); ++f) {
      const auto& t = thresholds_[f];
      const std::size_t v = static_cast<std::size_t>(
          std::lower_bound(t.begin(), t.end(), row[f]) - t.begin());
      for (std::size_t c = 0; c < k; ++c) s[c] += log_lik_[f][v * k + c];
    }
    const double m = *std::max_element(s.begin(), s.end());
    double sum = 0;
    for (double& v : s) {
      v = std::exp(v - m);
      sum += v;
    }
    for (double& v : s) v /= sum;
    return s;
  }

  nlohmann::json to_json() const override {
    return {{"log_prior", log_prior_},
            {"thresholds", thresholds_},
            {"log_likelihood", log_lik_}};
  }

 private:
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> thresholds_;
  std::vector<std::vector<double>> log_lik_;
};

std::shared_ptr<const ModelImpl> impl_from_json(const ModelSpec& spec,
                                                std::size_t d, std::size_t k,
                                                bool degenerate,
                                                const nlohmann::json& j) {
  if (degenerate) {
    return std::make_shared<ConstantModel>(
        j.at("scores").get<std::vector<double>>());
  }
  switch (spec.kind) {
    case ModelKind::kLogReg: {
      auto w = j.at("weights").get<std::vector<double>>();
      if (w.size() != k * (d + 1)) {
        throw Error(ErrorCode::kParse, "bad model: weight count");
      }
      return std::make_shared<LogRegModel>(d, k, std::move(w));
    }
    case ModelKind::kTree:
    case ModelKind::kForest:
      return std::make_shared<ForestModel>(trees_from_json(j.at("trees")), k);
    case ModelKind::kAdaBoost:
      return std::make_shared<AdaBoostModel>(
          trees_from_json(j.at("trees")),
          j.at("alphas").get<std::vector<double>>(), k);
    case ModelKind::kGbdt: {
      std::vector<std::vector<DecisionTree>> trees;
      for (const auto& ts : j.at("trees")) trees.push_back(trees_from_json(ts));
      return std::make_shared<GbdtModel>(j.at("base").get<std::vector<double>>(),
                                         std::move(trees),
                                         j.at("learning_rate").get<double>());
    }
    case ModelKind::kNaiveBayes:
      return std::make_shared<NaiveBayesModel>(
          j.at("log_prior").get<std::vector<double>>(),
          j.at("thresholds").get<std::vector<std::vector<double>>>(),
          j.at("log_likelihood").get<std::vector<std::vector<double>>>());
  }
  throw Error(ErrorCode::kParse, "bad model: unknown kind");
}

}  // namespace

double logreg_objective(const Matrix& x, std::span<const std::size_t> y,
                        std::size_t n_classes, std::span<const double> w,
                        double l2, std::vector<double>* grad) {
  if (y.size() != x.rows) {
    throw Error(ErrorCode::kLengthMismatch, "labels do not match rows");
  }
  if (w.size() != n_classes * (x.cols + 1)) {
    throw Error(ErrorCode::kDimensionMismatch, "weight vector has wrong size");
  }
  if (x.rows == 0) throw Error(ErrorCode::kEmptyMatrix, "no rows");
  return objective_sparse(SparseRows(x), x.cols, y, n_classes, w, l2, grad);
}

Classifier Classifier::train(const ModelSpec& spec, const Matrix& x,
                             std::span<const std::size_t> y,
                             std::size_t n_classes) {
  spec.validate();
  if (x.rows == 0) {
    throw Error(ErrorCode::kEmptyMatrix, "training set has no rows");
  }
  if (y.size() != x.rows) {
    throw Error(ErrorCode::kLengthMismatch, "labels do not match rows");
  }
  if (n_classes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no classes");
  }
  for (std::size_t v : y) {
    if (v >= n_classes) {
      throw Error(ErrorCode::kUnknownLabel, "label outside class set");
    }
  }
  Classifier c;
  c.spec_ = spec;
  c.n_features_ = x.cols;
  c.n_classes_ = n_classes;
  const bool single_class =
      std::all_of(y.begin(), y.end(), [&](std::size_t v) { return v == y[0]; });
  if (single_class) {
    c.degenerate_ = true;
    c.impl_ = std::make_shared<ConstantModel>(n_classes, y[0]);
    return c;
  }
  switch (spec.kind) {
    case ModelKind::kLogReg:
      c.impl_ = LogRegModel::fit(spec, x, y, n_classes);
      break;
    case ModelKind::kTree:
      c.impl_ = fit_forest(spec, x, y, n_classes, true);
      break;
    case ModelKind::kForest:
      c.impl_ = fit_forest(spec, x, y, n_classes, false);
      break;
    case ModelKind::kAdaBoost:
      c.impl_ = AdaBoostModel::fit(spec, x, y, n_classes);
      break;
    case ModelKind::kNaiveBayes:
      c.impl_ = NaiveBayesModel::fit(spec, x, y, n_classes);
      break;
    case ModelKind::kGbdt:
      c.impl_ = GbdtModel::fit(spec, x, y, n_classes);
      break;
  }
  return c;
}

std::vector<double> Classifier::scores(std::span<const double> row) const {
  if (row.size() != n_features_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "row has " + std::to_string(row.size()) +
                    " features, model expects " + std::to_string(n_features_));
  }
  return impl_->scores(row);
}

std::size_t Classifier::predict_one(std::span<const double> row) const {
  return argmax(scores(row));
}

std::vector<std::size_t> Classifier::predict(const Matrix& x) const {
  if (x.cols != n_features_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix has " + std::to_string(x.cols) +
                    " features, model expects " + std::to_string(n_features_));
  }
  std::vector<std::size_t> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = argmax(impl_->scores(x.row(i)));
  return out;
}

nlohmann::json Classifier::to_json() const {
  return {{"spec", spec_.to_json()},
          {"n_features", n_features_},
          {"n_classes", n_classes_},
          {"degenerate", degenerate_},
          {"params", impl_->to_json()}};
}

Classifier Classifier::from_json(const nlohmann::json& j) {
  try {
    Classifier c;
    c.spec_ = ModelSpec::from_json(j.at("spec"));
    c.n_features_ = j.at("n_features").get<std::size_t>();
    c.n_classes_ = j.at("n_classes").get<std::size_t>();
    c.degenerate_ = j.at("degenerate").get<bool>();
    c.impl_ = impl_from_json(c.spec_, c.n_features_, c.n_classes_,
                             c.degenerate_, j.at("params"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad model: ") + e.what());
  }
}

}  // namespace crashkit

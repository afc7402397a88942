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

#include "crashkit/eval.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "crashkit/error.h"

namespace crashkit {

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width, bool right_align) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right_align ? fill + s : s + fill;
}

constexpr const char* kMetricNames[] = {"acc", "prec", "rec", "f1"};

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : class_names(std::move(classes)),
      counts(class_names.size(), std::vector<long long>(class_names.size(), 0)) {}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.class_names != class_names) {
    throw Error(ErrorCode::kDimensionMismatch,
                "confusion matrices cover different classes");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts.size(); ++j) {
      counts[i][j] += other.counts[i][j];
    }
  }
}

nlohmann::json ConfusionMatrix::to_json() const {
  return {{"classes", class_names}, {"counts", counts}, {"total", total()}};
}

ConfusionMatrix confusion(std::span<const std::size_t> truth,
                          std::span<const std::size_t> pred,
                          const std::vector<std::string>& classes) {
  if (truth.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "truth has " + std::to_string(truth.size()) +
                    " labels, predictions " + std::to_string(pred.size()));
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= classes.size() || pred[i] >= classes.size()) {
      throw Error(ErrorCode::kUnknownLabel,
                  "label index outside the class set at position " +
                      std::to_string(i));
    }
    ++cm.counts[truth[i]][pred[i]];
  }
  return cm;
}

ConfusionMatrix confusion(const std::vector<std::string>& truth,
                          const std::vector<std::string>& pred,
                          const std::vector<std::string>& classes) {
  if (truth.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "truth has " + std::to_string(truth.size()) +
                    " labels, predictions " + std::to_string(pred.size()));
  }
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t c = 0; c < classes.size(); ++c) index[classes[c]] = c;
  auto lookup = [&](const std::string& s) {
    auto it = index.find(s);
    if (it == index.end()) {
      throw Error(ErrorCode::kUnknownLabel, "unknown label '" + s + "'");
    }
    return it->second;
  };
  std::vector<std::size_t> t, p;
  for (const auto& s : truth) t.push_back(lookup(s));
  for (const auto& s : pred) p.push_back(lookup(s));
  return confusion(t, p, classes);
}

Metrics metrics(const ConfusionMatrix& cm) {
  const long long total = cm.total();
  if (total <= 0) {
    throw Error(ErrorCode::kEmptyMatrix, "confusion matrix has no cases");
  }
  const std::size_t k = cm.counts.size();
  const double n = static_cast<double>(total);
  Metrics m;
  long long trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    trace += cm.counts[c][c];
    long long support = 0, predicted = 0;
    for (std::size_t j = 0; j < k; ++j) {
      support += cm.counts[c][j];
      predicted += cm.counts[j][c];
    }
    const double tp = static_cast<double>(cm.counts[c][c]);
    const double p = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
    const double r = support > 0 ? tp / static_cast<double>(support) : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    const double w = static_cast<double>(support) / n;
    m.precision += w * p;
    m.recall += w * r;
    m.f1 += w * f;
  }
  m.accuracy = static_cast<double>(trace) / n;
  return m;
}

std::vector<std::string> rank_column_names() {
  std::vector<std::string> names;
  for (const char* metric : kMetricNames) {
    for (Task t : kAllTasks) {
      names.push_back(std::string(metric) + "_" + std::string(task_name(t)));
    }
  }
  return names;
}

void MetricRow::set(Task task, const Metrics& m) {
  const std::size_t t = static_cast<std::size_t>(task);
  cells[0 * 3 + t] = m.accuracy;
  cells[1 * 3 + t] = m.precision;
  cells[2 * 3 + t] = m.recall;
  cells[3 * 3 + t] = m.f1;
}

nlohmann::json MetricRow::to_json() const {
  nlohmann::json j{{"model", model_name}};
  const auto names = rank_column_names();
  for (std::size_t c = 0; c < kRankColumns; ++c) {
    j[names[c]] = cells[c] ? nlohmann::json(*cells[c]) : nlohmann::json();
  }
  return j;
}

MetricRow MetricRow::from_json(const nlohmann::json& j) {
  MetricRow r;
  try {
    r.model_name = j.at("model").get<std::string>();
    const auto names = rank_column_names();
    for (std::size_t c = 0; c < kRankColumns; ++c) {
      auto it = j.find(names[c]);
      if (it != j.end() && it->is_number()) r.cells[c] = it->get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad metric row: ") + e.what());
  }
  return r;
}

std::vector<RankedRow> rank_table(const std::vector<MetricRow>& rows) {
  if (rows.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "ranking needs at least two models");
  }
  const auto names = rank_column_names();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < kRankColumns; ++c) {
      if (!r.cells[c]) {
        throw Error(ErrorCode::kMissingCell,
                    r.model_name + " has no value for " + names[c]);
      }
    }
  }
  std::vector<RankedRow> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i].row = rows[i];
  for (std::size_t c = 0; c < kRankColumns; ++c) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      // rank = 1 + #strictly better + (#tied others) / 2
      const double v = *rows[i].cells[c];
      std::size_t better = 0, tied = 0;
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j == i) continue;
        const double u = *rows[j].cells[c];
        if (u > v) ++better;
        else if (u == v) ++tied;
      }
      out[i].ranks[c] = 1.0 + static_cast<double>(better) +
                        static_cast<double>(tied) / 2.0;
    }
  }
  for (auto& r : out) {
    double sum = 0;
    for (double v : r.ranks) sum += v;
    r.score = sum / static_cast<double>(kRankColumns);
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedRow& a, const RankedRow& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.row.model_name < b.row.model_name;
  });
  return out;
}

std::string format_confusion(const ConfusionMatrix& cm) {
  std::size_t width = 6;
  for (const auto& c : cm.class_names) width = std::max(width, c.size() + 1);
  std::string out = pad("truth\\pred", width + 4, false);
  for (const auto& c : cm.class_names) out += pad(c, width, true);
  out += "\n";
  for (std::size_t i = 0; i < cm.counts.size(); ++i) {
    out += pad(cm.class_names[i], width + 4, false);
    for (long long v : cm.counts[i]) out += pad(std::to_string(v), width, true);
    out += "\n";
  }
  return out;
}

std::string format_rank_table(const std::vector<RankedRow>& ranked) {
  std::size_t name_w = 6;
  for (const auto& r : ranked) name_w = std::max(name_w, r.row.model_name.size() + 2);
  const auto names = rank_column_names();
  std::string out = pad("model", name_w, false);
  for (const auto& n : names) out += pad(n, n.size() + 2, true);
  out += pad("avg_rank", 10, true) + "\n";
  for (const auto& r : ranked) {
    out += pad(r.row.model_name, name_w, false);
    for (std::size_t c = 0; c < kRankColumns; ++c) {
      out += pad(fixed3(*r.row.cells[c]), names[c].size() + 2, true);
    }
    out += pad(fixed3(r.score), 10, true) + "\n";
  }
  return out;
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1}};
}

nlohmann::json rank_table_json(const std::vector<RankedRow>& ranked) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& r : ranked) {
    nlohmann::json j = r.row.to_json();
    j["ranks"] = r.ranks;
    j["average_rank"] = r.score;
    a.push_back(std::move(j));
  }
  return a;
}

}  // namespace crashkit

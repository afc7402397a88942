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

// Acceptance checks: one PASS/FAIL line per headline criterion. Exits
// non-zero when any criterion fails so the test runner reports it red.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crashkit/cli.h"
#include "crashkit/error.h"
#include "crashkit/eval.h"
#include "crashkit/geo.h"
#include "crashkit/hashing.h"
#include "crashkit/ingest.h"
#include "crashkit/labels.h"
#include "crashkit/whatif.h"
#include "json.hpp"
#include "test_support.h"

namespace crashkit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// ------------------------------------------------------------ metrics

std::string metrics_algebra() {
  // 1000 cases, 353 in the majority class; always predict the majority.
  std::vector<std::size_t> truth, pred(1000, 0);
  const std::size_t counts[] = {353, 300, 200, 147};
  for (std::size_t c = 0; c < 4; ++c) truth.insert(truth.end(), counts[c], c);
  const Metrics m = metrics(confusion(truth, pred, class_names(Task::kInjury)));
  require(std::abs(m.accuracy - 0.353) <= 0.001, "accuracy " + fmt(m.accuracy));
  require(m.precision >= 0.124 - 1e-9 && m.precision <= 0.125 + 0.001,
          "precision " + fmt(m.precision));
  require(std::abs(m.recall - 0.353) <= 0.001, "recall " + fmt(m.recall));
  require(std::abs(m.f1 - 0.184) <= 0.001, "f1 " + fmt(m.f1));
  return "acc " + fmt(m.accuracy, 3) + ", prec " + fmt(m.precision, 3) +
         ", rec " + fmt(m.recall, 3) + ", f1 " + fmt(m.f1, 3);
}

// ------------------------------------------------------------ ranks

MetricRow row(const std::string& name, std::array<double, 12> v) {
  MetricRow r;
  r.model_name = name;
  for (std::size_t i = 0; i < 12; ++i) r.cells[i] = v[i];
  return r;
}

std::string rank_aggregation() {
  // Columns: acc(inj, sev, type), prec(...), rec(...), f1(...).
  const std::vector<MetricRow> rows = {
      row("RF", {.353, .339, .384, .124, .115, .543, .353, .339, .384, .184, .171, .395}),
      row("AdaBoost", {.353, .339, .579, .124, .115, .383, .353, .339, .579, .184, .171, .447}),
      row("CatBoost", {.353, .339, .702, .124, .115, .664, .353, .339, .702, .184, .171, .667}),
      row("BN", {.394, .341, .653, .485, .306, .563, .394, .341, .653, .287, .181, .578}),
      row("DT", {.353, .347, .677, .124, .207, .631, .353, .347, .677, .184, .190, .640}),
      row("LR", {.353, .339, .566, .124, .115, .471, .353, .339, .566, .184, .171, .457}),
      row("LLaMA2-7B", {.399, .382, .740, .404, .411, .771, .399, .382, .740, .401, .379, .744}),
      row("LLaMA2-13B", {.439, .393, .748, .431, .375, .767, .439, .393, .748, .427, .353, .755}),
      row("LLaMA2-70B", {.447, .436, .747, .451, .446, .775, .447, .436, .747, .445, .411, .757}),
  };
  std::map<std::string, double> score;
  for (const auto& r : rank_table(rows)) score[r.row.model_name] = r.score;
  const std::pair<const char*, double> expected[] = {
      {"LLaMA2-70B", 1.25}, {"LLaMA2-13B", 2.08}, {"LLaMA2-7B", 2.92}};
  std::string detail, wrong;
  for (const auto& [name, want] : expected) {
    const double got = score.at(name);
    detail += std::string(detail.empty() ? "" : ", ") + name + " " + fmt(got, 3);
    if (std::abs(std::round(got * 100) / 100 - want) > 1e-9) {
      wrong += std::string(wrong.empty() ? "" : "; ") + name + " " +
               fmt(got, 3) + " != " + fmt(want, 2);
    }
  }
  if (!wrong.empty()) {
    throw Failure(wrong + " (mid-rank average over the reference cells)");
  }
  return detail;
}

// ------------------------------------------------------------ what-if

std::string whatif_cardinalities() {
  auto rs = testing::corpus(842);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto& f = rs[i].event.contributing_factors;
    f.erase(std::remove(f.begin(), f.end(), "alcohol_impairment"), f.end());
    rs[i].event.alcohol_involved = i % 13 == 0 && i / 13 < 63;
  }
  const struct {
    Rate rate;
    std::size_t selected, total;
  } cases[] = {{Rate::times(1), 63, 126},
               {Rate::times(2), 126, 189},
               {Rate::everything(), 779, 842}};
  std::string detail;
  for (const auto& c : cases) {
    const PerturbationPlan p = plan(rs, Factor::kAlcohol, c.rate, kDefaultSeed);
    require(p.base_count == 63 && p.complement_count == 779,
            "base/complement " + std::to_string(p.base_count) + "/" +
                std::to_string(p.complement_count));
    require(p.selected_case_ids.size() == c.selected,
            c.rate.label() + " selected " +
                std::to_string(p.selected_case_ids.size()));
    const auto out = apply_records(rs, p, testing::dict());
    require(out.size() == 842, "test size changed");
    const auto adverse = static_cast<std::size_t>(
        std::count_if(out.begin(), out.end(), [](const CrashRecord& r) {
          return base_predicate(r, Factor::kAlcohol);
        }));
    require(adverse == c.total && p.adverse_after() == c.total,
            c.rate.label() + " adverse " + std::to_string(adverse));
    detail += std::string(detail.empty() ? "" : ", ") + c.rate.label() + " " +
              std::to_string(c.selected) + "->" + std::to_string(c.total);
  }
  return detail + " of 842";
}

// ------------------------------------------------------------ geodesy

std::string geodesy() {
  using namespace geo;
  const GeoPoint o = lcc_inverse(500000.0, 0.0);
  require(std::abs(o.lat - (45.0 + 20.0 / 60.0)) < 1e-9 &&
              std::abs(o.lon + (120.0 + 30.0 / 60.0)) < 1e-9,
          "origin " + fmt(o.lat, 12) + "," + fmt(o.lon, 12));
  CounterRng rng(kDefaultSeed, 101);
  double worst = 0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const Projected p =
        lcc_forward({45.3 + 1.8 * rng.uniform(), -124.8 + 8.0 * rng.uniform()});
    const GeoPoint g = lcc_inverse(p.easting, p.northing);
    const Projected q = lcc_forward(g);
    worst = std::max(worst, std::hypot(q.easting - p.easting,
                                       q.northing - p.northing));
  }
  require(worst < 1e-6, "round trip " + std::to_string(worst) + " m");
  // Projected length of a short meridian step over its ellipsoidal length.
  const double a = 6378137.0, f = 1.0 / 298.257222101, e2 = 2 * f - f * f;
  double scale_err = 0;
  for (double lat : {45.0 + 50.0 / 60.0, 47.0 + 20.0 / 60.0}) {
    const double h = 1e-5;
    const Projected p0 = lcc_forward({lat - h, -120.5});
    const Projected p1 = lcc_forward({lat + h, -120.5});
    const double phi = lat * std::numbers::pi / 180.0;
    const double m =
        a * (1 - e2) / std::pow(1 - e2 * std::sin(phi) * std::sin(phi), 1.5);
    const double ground = m * (2 * h) * std::numbers::pi / 180.0;
    const double k =
        std::hypot(p1.easting - p0.easting, p1.northing - p0.northing) / ground;
    scale_err = std::max(scale_err, std::abs(k - 1.0));
  }
  require(scale_err <= 1e-9, "scale error " + std::to_string(scale_err));
  std::ostringstream s;
  s << "round trip max " << worst << " m, scale error " << scale_err;
  return s.str();
}

// ------------------------------------------------------------ pipeline

class Silence {
 public:
  Silence() : out_(std::cout.rdbuf(sink_.rdbuf())), err_(std::cerr.rdbuf(sink_.rdbuf())) {}
  ~Silence() {
    std::cout.rdbuf(out_);
    std::cerr.rdbuf(err_);
  }
  std::string text() const { return sink_.str(); }

 private:
  std::ostringstream sink_;
  std::streambuf* out_;
  std::streambuf* err_;
};

void run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "crashkit");
  int rc = 0;
  std::string log;
  {
    Silence quiet;
    rc = cli::run(args);
    log = quiet.text();
  }
  require(rc == 0, args[1] + " exited " + std::to_string(rc) + ": " + log);
}

void pipeline(const fs::path& root) {
  const std::string r = root.string();
  run_cli({"synth", "--n", "20000", "--out", r + "/synth"});
  run_cli({"textualize", "--records", r + "/synth/records.jsonl", "--out",
           r + "/text"});
  run_cli({"split", "--records", r + "/synth/records.jsonl", "--test-months",
           "1,6,12", "--out", r + "/split"});
  run_cli({"train-baseline", "--records", r + "/synth/records.jsonl", "--split",
           r + "/split/split.json", "--models", "all", "--out", r + "/models"});
  run_cli({"eval", "--records", r + "/synth/records.jsonl", "--predictions",
           r + "/models", "--out", r + "/eval"});
  run_cli({"whatif", "--records", r + "/synth/records.jsonl", "--split",
           r + "/split/split.json", "--model",
           r + "/models/model_tree_accident_type.json", "--rates", "1,2,all",
           "--out", r + "/whatif"});
}

std::string pipeline_determinism() {
  const fs::path dir = testing::scratch_dir("acceptance_pipeline");
  pipeline(dir / "a");
  pipeline(dir / "b");
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir / "a");
    require(fs::exists(dir / "b" / rel), rel.string() + " missing in rerun");
    require(read_file(e.path()) == read_file(dir / "b" / rel),
            rel.string() + " differs between runs");
    ++compared;
  }
  require(fs::exists(dir / "a" / "whatif" / "shift_icy_road_all.json"),
          "no icy_road all-rate shift");
  const json shift =
      json::parse(read_file(dir / "a" / "whatif" / "shift_icy_road_all.json"));
  long long ot = 0;
  bool found = false;
  for (const auto& c : shift) {
    if (c["class"] == "OT") {
      ot = c["delta"].get<long long>();
      found = true;
    }
  }
  fs::remove_all(dir);
  require(found, "no OT class in shift report");
  require(ot > 0, "OT shift " + std::to_string(ot) + " is not positive");
  return std::to_string(compared) + " files identical, icy/all OT delta +" +
         std::to_string(ot);
}

// ------------------------------------------------------------ properties

std::string property_suites() {
  const std::size_t n = testing::kPropertyCases;
  const auto pool = testing::corpus(300);
  CounterRng rng(kDefaultSeed, 102);

  for (std::size_t i = 0; i < n; ++i) {  // codec round trips
    const Severity s = severity_from_ordinal(1 + static_cast<int>(rng.below(5)));
    const AccidentType t =
        accident_type_from_id(1 + static_cast<int>(rng.below(14)));
    require(severity_from_code(code(s)) == s, "severity codec");
    require(accident_type_from_abbr(abbr(t)) == t, "accident type codec");
    const Labels l{static_cast<std::uint32_t>(rng.below(10)), s, t};
    for (Task task : kAllTasks) {
      const std::size_t c = class_index(l, task);
      require(parse_token(task, class_tokens(task)[c]) == c, "token codec");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {  // bucket monotonicity
    const auto a = static_cast<std::uint32_t>(rng.below(1000));
    const auto b = static_cast<std::uint32_t>(rng.below(1000));
    require(static_cast<int>(bucket_injuries(std::min(a, b))) <=
                static_cast<int>(bucket_injuries(std::max(a, b))),
            "bucket monotonicity");
  }
  for (std::size_t i = 0; i < n; ++i) {  // recall == accuracy, constant p^2
    const std::size_t k = 2 + rng.below(13), len = 1 + rng.below(200);
    std::vector<std::string> classes;
    for (std::size_t c = 0; c < k; ++c) classes.push_back("c" + std::to_string(c));
    std::vector<std::size_t> truth(len), pred(len);
    for (std::size_t j = 0; j < len; ++j) {
      truth[j] = rng.below(k);
      pred[j] = rng.below(k);
    }
    const Metrics m = metrics(confusion(truth, pred, classes));
    require(std::abs(m.recall - m.accuracy) < 1e-12, "recall != accuracy");
    const std::size_t maj = truth[0];
    const std::vector<std::size_t> constant(len, maj);
    const Metrics c = metrics(confusion(truth, constant, classes));
    const double p = c.accuracy;
    require(std::abs(c.precision - p * p) < 1e-12, "constant precision != p^2");
    require(std::abs(c.f1 - 2 * p * p / (1 + p)) < 1e-12, "constant f1");
  }
  {  // clean_features idempotence
    const char* kNoise[] = {" Ice", "DAY", "frozen", "moonlight", "ped", "F"};
    std::vector<CrashRecord> batch;
    for (std::size_t i = 0; i < n; ++i) {
      CrashRecord r = testing::random_record(rng, pool);
      if (rng.bernoulli(0.5)) r.infrastructure.road_surface = kNoise[rng.below(6)];
      if (rng.bernoulli(0.5)) r.infrastructure.lighting = kNoise[rng.below(6)];
      batch.push_back(std::move(r));
    }
    const CleanResult once = clean_features(batch, testing::dict());
    const CleanResult twice = clean_features(once.records, testing::dict());
    require(once.records == twice.records, "clean_features not idempotent");
  }
  for (std::size_t i = 0; i < n; ++i) {  // no label leakage in prose
    const CrashRecord r = testing::random_record(rng, pool);
    const std::string text = join_user_text(
        render_paragraphs(r, testing::templates(), testing::dict()));
    require(scan_leakage(text).empty(), "label leaks into " + r.case_id);
  }
  for (std::size_t i = 0; i < n; ++i) {  // rewrite idempotence
    const CrashRecord r = testing::random_record(rng, pool);
    for (Factor f : kAllFactors) {
      const CrashRecord once = rewrite(r, f, testing::dict());
      require(base_predicate(once, f), "rewrite misses predicate");
      require(rewrite(once, f, testing::dict()) == once, "rewrite not idempotent");
      require(once.labels == r.labels, "rewrite changed labels");
    }
  }
  std::vector<CrashRecord> test;
  for (std::size_t i = 0; i < n; ++i) test.push_back(testing::random_record(rng, pool));
  for (Factor f : kAllFactors) {  // apply conservation
    const PerturbationPlan p = plan(test, f, Rate::times(1), kDefaultSeed);
    const std::set<std::string> chosen(p.selected_case_ids.begin(),
                                       p.selected_case_ids.end());
    const auto out = apply_records(test, p, testing::dict());
    require(out.size() == test.size(), "apply changed test size");
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (!chosen.count(test[i].case_id)) {
        require(out[i] == test[i], "apply touched an unselected record");
      }
    }
  }
  return "7 suites x " + std::to_string(n) + " cases";
}

}  // namespace
}  // namespace crashkit

int main() {
  using crashkit::Failure;
  const std::pair<const char*, std::function<std::string()>> criteria[] = {
      {"metrics-algebra", crashkit::metrics_algebra},
      {"rank-aggregation", crashkit::rank_aggregation},
      {"whatif-cardinalities", crashkit::whatif_cardinalities},
      {"geodesy", crashkit::geodesy},
      {"pipeline-determinism", crashkit::pipeline_determinism},
      {"property-suites", crashkit::property_suites},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string verdict, detail;
    try {
      detail = check();
      verdict = "PASS";
    } catch (const Failure& f) {
      verdict = "FAIL";
      detail = f.what();
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = std::string("unexpected error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    failed += verdict == "FAIL";
    std::cout << verdict << " " << name << ": " << detail << " ["
              << crashkit::fmt(secs, 2) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

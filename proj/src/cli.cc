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

#include "crashkit/cli.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "CLI11.hpp"
#include "crashkit/encoder.h"
#include "crashkit/error.h"
#include "crashkit/eval.h"
#include "crashkit/geo.h"
#include "crashkit/hashing.h"
#include "crashkit/ingest.h"
#include "crashkit/llm_client.h"
#include "crashkit/models.h"
#include "crashkit/sampler.h"
#include "crashkit/synthetic.h"
#include "crashkit/textualize.h"
#include "crashkit/whatif.h"

namespace crashkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kModelFormat = "crashkit-baseline";
constexpr std::string_view kPredictionFormat = "crashkit-predictions";
constexpr int kFormatVersion = 1;

// ------------------------------------------------------------ shared state

struct GlobalOptions {
  std::uint64_t seed = kDefaultSeed;
  std::string dictionary;
  std::string templates;
  std::size_t jobs = 1;
};

FeatureDictionary load_dictionary(const GlobalOptions& g) {
  return g.dictionary.empty() ? FeatureDictionary::builtin()
                              : FeatureDictionary::load(g.dictionary);
}

TemplateSet load_templates(const GlobalOptions& g,
                           const FeatureDictionary& dict) {
  return g.templates.empty() ? TemplateSet::builtin(dict)
                             : TemplateSet::load(g.templates, dict);
}

// Provenance written next to every output: tool version, seed, dictionary
// and template hashes, and content hashes of inputs and outputs. Inputs are
// keyed by role rather than path so that reruns elsewhere stay identical.
class Manifest {
 public:
  Manifest(std::string command, const GlobalOptions& g,
           const FeatureDictionary& dict) {
    j_["tool"] = std::string(kToolName);
    j_["version"] = std::string(kToolVersion);
    j_["command"] = std::move(command);
    j_["seed"] = g.seed;
    j_["dictionary"] = {{"version", dict.version()}, {"hash", dict.hash()}};
    j_["inputs"] = json::object();
    j_["outputs"] = json::object();
  }

  void templates(const TemplateSet& t) { j_["template_hash"] = t.hash(); }
  void input(const std::string& role, const fs::path& path) {
    j_["inputs"][role] = hash_file(path);
  }
  void param(const std::string& key, json value) {
    j_["params"][key] = std::move(value);
  }
  void output(const fs::path& dir, const std::string& name,
              std::string_view bytes) {
    write_file(dir / name, bytes);
    j_["outputs"][name] = hash_text(bytes);
  }
  void write(const fs::path& dir, const std::string& name = "manifest.json") {
    write_file(dir / name, j_.dump(2) + "\n");
  }

 private:
  json j_;
};

std::vector<CrashRecord> load_records(const fs::path& path) {
  return records_from_jsonl(read_file(path));
}

json load_json(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kParse, path.string() + " is not valid JSON");
  }
  return j;
}

std::vector<CrashRecord> partition(const std::vector<CrashRecord>& records,
                                   const SplitManifest& manifest,
                                   const std::string& name) {
  if (name == "train") return select_ids(records, manifest.train);
  if (name == "test") return select_ids(records, manifest.test);
  if (name == "test_uniform") return select_ids(records, manifest.test_uniform);
  if (name == "all") return records;
  throw Error(ErrorCode::kUsage, "unknown partition '" + name + "'");
}

std::vector<Task> parse_tasks(const std::string& text) {
  if (text == "all") return {std::begin(kAllTasks), std::end(kAllTasks)};
  std::vector<Task> tasks;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    tasks.push_back(task_from_name(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return tasks;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    if (end > pos) out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown
// after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first) std::rethrow_exception(first);
}

std::string rate_stem(const Rate& rate) {
  if (rate.all) return "all";
  return std::to_string(static_cast<long long>(std::llround(rate.multiple * 100)));
}

// -------------------------------------------------------- prediction files

struct PredictionSet {
  std::string model;
  Task task = Task::kInjury;
  std::string partition;
  std::vector<std::string> case_ids;
  std::vector<std::optional<std::string>> tokens;

  json to_json() const {
    json preds = json::array();
    for (std::size_t i = 0; i < case_ids.size(); ++i) {
      preds.push_back({{"case_id", case_ids[i]},
                       {"label", tokens[i] ? json(*tokens[i]) : json()}});
    }
    return {{"format", std::string(kPredictionFormat)},
            {"version", kFormatVersion},
            {"model", model},
            {"task", std::string(task_name(task))},
            {"partition", partition},
            {"predictions", preds}};
  }

  static PredictionSet from_json(const json& j, const std::string& origin) {
    if (j.value("format", "") != kPredictionFormat) {
      throw Error(ErrorCode::kParse, origin + " is not a predictions file");
    }
    try {
      PredictionSet p;
      p.model = j.at("model").get<std::string>();
      p.task = task_from_name(j.at("task").get<std::string>());
      p.partition = j.at("partition").get<std::string>();
      for (const auto& e : j.at("predictions")) {
        p.case_ids.push_back(e.at("case_id").get<std::string>());
        if (e.at("label").is_string()) {
          p.tokens.emplace_back(e["label"].get<std::string>());
        } else {
          p.tokens.emplace_back();
        }
      }
      return p;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, origin + ": " + e.what());
    }
  }
};

std::string prediction_file_name(const std::string& model, Task task,
                                 const std::string& partition) {
  std::string stem = model;
  for (char& c : stem) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '_';
  }
  return "predictions_" + stem + "_" + std::string(task_name(task)) + "_" +
         partition + ".json";
}

// A trained baseline together with everything needed to score records.
struct BaselineModel {
  std::string name;
  ModelKind kind = ModelKind::kTree;
  Task task = Task::kInjury;
  Encoder encoder;
  Classifier classifier;

  json to_json() const {
    return {{"format", std::string(kModelFormat)},
            {"version", kFormatVersion},
            {"model", name},
            {"kind", std::string(model_kind_name(kind))},
            {"task", std::string(task_name(task))},
            {"classes", class_tokens(task)},
            {"encoder", encoder.to_json()},
            {"classifier", classifier.to_json()}};
  }

  static BaselineModel from_json(const json& j, const FeatureDictionary& dict) {
    if (j.value("format", "") != kModelFormat) {
      throw Error(ErrorCode::kParse, "not a baseline model file");
    }
    try {
      BaselineModel m;
      m.name = j.at("model").get<std::string>();
      m.kind = model_kind_from_name(j.at("kind").get<std::string>());
      m.task = task_from_name(j.at("task").get<std::string>());
      m.encoder = Encoder::from_json(j.at("encoder"), dict);
      m.classifier = Classifier::from_json(j.at("classifier"));
      if (m.classifier.n_features() != m.encoder.width()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "model and encoder disagree on feature count");
      }
      return m;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("bad model file: ") + e.what());
    }
  }

  std::vector<std::size_t> predict(const std::vector<CrashRecord>& records) const {
    return classifier.predict(encoder.transform(records));
  }
};

PredictionSet make_predictions(const std::string& model, Task task,
                               const std::string& partition,
                               const std::vector<CrashRecord>& records,
                               const std::vector<std::size_t>& labels) {
  PredictionSet p{model, task, partition, {}, {}};
  const auto tokens = class_tokens(task);
  for (std::size_t i = 0; i < records.size(); ++i) {
    p.case_ids.push_back(records[i].case_id);
    p.tokens.emplace_back(tokens[labels[i]]);
  }
  return p;
}

// ------------------------------------------------------------- subcommands

struct IngestArgs {
  std::string crash, road, unit, person, out;
  double min_completeness = kDefaultMinCompleteness;
  bool strict = false;
  std::string delimiter = ",";
};

void cmd_ingest(const IngestArgs& a, const GlobalOptions& g) {
  if (a.delimiter.size() != 1) {
    throw Error(ErrorCode::kUsage, "--delimiter must be one character");
  }
  const auto dict = load_dictionary(g);
  SourceBundle bundle{a.crash, a.road, a.unit, std::nullopt};
  if (!a.person.empty()) bundle.person_table = a.person;
  TableOptions opts{a.delimiter[0], a.strict};
  const SourceTables tables = load_sources(bundle, dict, opts);
  IngestReport report;
  const auto records = ingest(tables, dict, a.min_completeness, report);
  Manifest m("ingest", g, dict);
  m.input("crash", a.crash);
  m.input("road", a.road);
  m.input("unit", a.unit);
  if (!a.person.empty()) m.input("person", a.person);
  m.param("min_completeness", a.min_completeness);
  m.output(a.out, "records.jsonl", to_jsonl(records));
  m.output(a.out, "ingest_report.json", report.to_json().dump(2) + "\n");
  m.write(a.out);
  std::cout << "ingested " << records.size() << " records ("
            << report.records_dropped << " dropped)\n";
}

struct SynthArgs {
  std::size_t n = 20000;
  std::string out;
  bool tables = false;
};

void cmd_synth(const SynthArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  SyntheticSpec spec;
  spec.n_records = a.n;
  spec.seed = g.seed;
  spec.validate();
  const SyntheticCorpus corpus = generate_synthetic(spec);
  Manifest m("synth", g, dict);
  m.param("n_records", a.n);
  m.output(a.out, "records.jsonl", to_jsonl(corpus.records));
  if (a.tables) {
    write_source_tables(corpus, fs::path(a.out) / "tables");
    for (const char* t : {"crash.csv", "road.csv", "unit.csv", "person.csv"}) {
      m.param(std::string("tables/") + t,
              hash_file(fs::path(a.out) / "tables" / t));
    }
  }
  m.write(a.out);
  std::cout << "generated " << corpus.records.size() << " records\n";
}

struct TextualizeArgs {
  std::string records, out, tasks = "all";
};

void cmd_textualize(const TextualizeArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  const auto templates = load_templates(g, dict);
  const auto records = load_records(a.records);
  const auto tasks = parse_tasks(a.tasks);
  Manifest m("textualize", g, dict);
  m.templates(templates);
  m.input("records", a.records);
  json report{{"records", records.size()},
              {"budget_warnings", json::array()},
              {"leakage", json::array()}};
  for (const auto& r : records) {
    const Paragraphs paras = render_paragraphs(r, templates, dict);
    for (const auto& w : word_budget_warnings(paras)) {
      report["budget_warnings"].push_back(r.case_id + ": " + w);
    }
    for (const auto& hit : scan_leakage(join_user_text(paras))) {
      report["leakage"].push_back(r.case_id + ": " + hit);
    }
  }
  for (Task task : tasks) {
    std::string lines;
    for (const auto& r : records) {
      lines += bundle_json(build_prompt(r, task, templates, dict),
                           templates.hash())
                   .dump() +
               "\n";
    }
    m.output(a.out, "prompts_" + std::string(task_name(task)) + ".jsonl",
             lines);
  }
  m.output(a.out, "textualize_report.json", report.dump(2) + "\n");
  m.write(a.out);
  if (!report["leakage"].empty()) {
    throw Error(ErrorCode::kTemplate,
                "label text leaked into " +
                    std::to_string(report["leakage"].size()) +
                    " prompt(s); see textualize_report.json");
  }
  std::cout << "rendered " << records.size() << " records for "
            << tasks.size() << " task(s)\n";
}

struct SplitArgs {
  std::string records, out, months = "1,6,12";
  bool no_resample = false;
};

void cmd_split(const SplitArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  SplitSpec spec;
  spec.seed = g.seed;
  spec.test_months.clear();
  for (const auto& s : split_list(a.months)) {
    try {
      spec.test_months.insert(std::stoi(s));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kUsage, "bad month '" + s + "'");
    }
  }
  spec.resample_target =
      a.no_resample ? ResampleTarget::kNone : ResampleTarget::kUniformInjury;
  spec.validate();
  const auto records = load_records(a.records);
  const Split parts = split(records, spec);
  SplitManifest sm;
  sm.seed = g.seed;
  sm.test_months = spec.test_months;
  for (const auto& r : parts.train) sm.train.push_back(r.case_id);
  for (const auto& r : parts.test) sm.test.push_back(r.case_id);
  for (const auto& r : parts.unassigned) sm.unassigned.push_back(r.case_id);
  if (!a.no_resample) {
    for (const auto& r : resample_uniform_injury(parts.test, g.seed)) {
      sm.test_uniform.push_back(r.case_id);
    }
  }
  Manifest m("split", g, dict);
  m.input("records", a.records);
  m.output(a.out, "split.json", sm.to_json().dump(2) + "\n");
  m.write(a.out);
  std::cout << "train " << sm.train.size() << ", test " << sm.test.size()
            << ", test_uniform " << sm.test_uniform.size() << ", unassigned "
            << sm.unassigned.size() << "\n";
}

struct TrainArgs {
  std::string records, split, out, models = "all", tasks = "all";
  std::optional<std::size_t> n_estimators, epochs;
  std::optional<int> max_depth;
  std::optional<double> learning_rate;
};

void cmd_train(const TrainArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  const auto records = load_records(a.records);
  const SplitManifest sm = SplitManifest::from_json(load_json(a.split));
  const auto train = select_ids(records, sm.train);
  std::vector<std::pair<std::string, std::vector<CrashRecord>>> evals;
  evals.emplace_back("test", select_ids(records, sm.test));
  if (!sm.test_uniform.empty()) {
    evals.emplace_back("test_uniform", select_ids(records, sm.test_uniform));
  }
  std::vector<ModelKind> kinds;
  if (a.models == "all") {
    kinds.assign(std::begin(kAllModelKinds), std::end(kAllModelKinds));
  } else {
    for (const auto& s : split_list(a.models)) kinds.push_back(model_kind_from_name(s));
  }
  const auto tasks = parse_tasks(a.tasks);
  const Encoder encoder = Encoder::fit(train, dict);
  std::vector<Matrix> eval_x;
  for (const auto& e : evals) eval_x.push_back(encoder.transform(e.second));

  struct Job {
    ModelKind kind;
    Task task;
  };
  std::vector<Job> jobs;
  for (Task t : tasks) {
    for (ModelKind k : kinds) jobs.push_back({k, t});
  }
  std::vector<std::string> model_text(jobs.size());
  std::vector<std::vector<std::string>> pred_text(jobs.size());
  const Matrix train_x = encoder.transform(train);
  parallel_for(jobs.size(), g.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    ModelSpec spec = ModelSpec::defaults(job.kind);
    spec.seed = g.seed;
    if (a.n_estimators) spec.n_estimators = *a.n_estimators;
    if (a.epochs) spec.epochs = *a.epochs;
    if (a.max_depth) spec.max_depth = *a.max_depth;
    if (a.learning_rate) spec.learning_rate = *a.learning_rate;
    std::vector<std::size_t> y;
    for (const auto& r : train) y.push_back(class_index(r.labels, job.task));
    BaselineModel model;
    model.name = std::string(model_display_name(job.kind));
    model.kind = job.kind;
    model.task = job.task;
    model.encoder = encoder;
    model.classifier =
        Classifier::train(spec, train_x, y, class_count(job.task));
    model_text[i] = model.to_json().dump() + "\n";
    for (std::size_t e = 0; e < evals.size(); ++e) {
      const auto labels = model.classifier.predict(eval_x[e]);
      pred_text[i].push_back(make_predictions(model.name, job.task,
                                              evals[e].first, evals[e].second,
                                              labels)
                                 .to_json()
                                 .dump(1) +
                             "\n");
    }
  });
  Manifest m("train-baseline", g, dict);
  m.input("records", a.records);
  m.input("split", a.split);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string stem = std::string(model_kind_name(jobs[i].kind)) + "_" +
                             std::string(task_name(jobs[i].task));
    m.output(a.out, "model_" + stem + ".json", model_text[i]);
    for (std::size_t e = 0; e < evals.size(); ++e) {
      m.output(a.out,
               prediction_file_name(std::string(model_display_name(jobs[i].kind)),
                                    jobs[i].task, evals[e].first),
               pred_text[i][e]);
    }
  }
  m.write(a.out);
  std::cout << "trained " << jobs.size() << " model(s) on " << train.size()
            << " records\n";
}

struct PredictArgs {
  std::string records, split, partition = "test", tasks = "all", out;
  std::string endpoint, transcript, name = "LLM";
  long long timeout_ms = 30000;
  int retries = 3;
  std::size_t max_in_flight = 0;
  bool substring_fallback = false;
};

std::unique_ptr<Predictor> make_predictor(const std::string& endpoint,
                                          const std::string& transcript,
                                          long long timeout_ms) {
  if (endpoint.empty() == transcript.empty()) {
    throw Error(ErrorCode::kUsage,
                "give exactly one of --endpoint and --mock-transcript");
  }
  if (!transcript.empty()) {
    return std::make_unique<MockPredictor>(MockPredictor::read_transcript(transcript));
  }
  const char* key = std::getenv(kApiKeyEnv);
  return std::make_unique<HttpPredictor>(endpoint,
                                         std::chrono::milliseconds(timeout_ms),
                                         key ? key : "");
}

void cmd_predict(const PredictArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  const auto templates = load_templates(g, dict);
  auto predictor = make_predictor(a.endpoint, a.transcript, a.timeout_ms);
  const auto records = load_records(a.records);
  const SplitManifest sm = SplitManifest::from_json(load_json(a.split));
  const auto subset = partition(records, sm, a.partition);
  RetryPolicy policy;
  policy.retries = a.retries;
  ParseOptions opts{a.substring_fallback};
  const std::size_t in_flight = a.max_in_flight ? a.max_in_flight : g.jobs;
  Manifest m("predict-llm", g, dict);
  m.templates(templates);
  m.input("records", a.records);
  m.input("split", a.split);
  if (!a.transcript.empty()) m.input("transcript", a.transcript);
  m.param("partition", a.partition);
  json errors = json::object();
  std::size_t failed = 0;
  for (Task task : parse_tasks(a.tasks)) {
    std::vector<PredictRequest> requests;
    for (const auto& r : subset) {
      requests.push_back(
          PredictRequest::from_bundle(build_prompt(r, task, templates, dict)));
    }
    const BatchResult result =
        predict_batch(*predictor, requests, in_flight, policy, opts);
    PredictionSet p{a.name, task, a.partition, {}, {}};
    const auto tokens = class_tokens(task);
    for (std::size_t i = 0; i < subset.size(); ++i) {
      p.case_ids.push_back(subset[i].case_id);
      if (result.labels[i]) {
        p.tokens.emplace_back(tokens[*result.labels[i]]);
      } else {
        p.tokens.emplace_back();
      }
    }
    failed += result.errors.size();
    errors[std::string(task_name(task))] = result.to_json(task)["errors"];
    m.output(a.out, prediction_file_name(a.name, task, a.partition),
             p.to_json().dump(1) + "\n");
  }
  m.output(a.out, "predict_errors.json", errors.dump(2) + "\n");
  m.write(a.out);
  std::cout << "predicted " << subset.size() << " case(s); " << failed
            << " failure(s)\n";
}

struct EvalArgs {
  std::string records, out;
  std::vector<std::string> predictions;
};

void cmd_eval(const EvalArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  const auto records = load_records(a.records);
  std::map<std::string, const CrashRecord*> by_id;
  for (const auto& r : records) by_id[r.case_id] = &r;

  std::vector<fs::path> files;
  for (const auto& p : a.predictions) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (name.rfind("predictions_", 0) == 0 && e.path().extension() == ".json") {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(p);
    }
  }
  if (files.empty()) throw Error(ErrorCode::kUsage, "no prediction files given");

  Manifest m("eval", g, dict);
  m.input("records", a.records);
  // partition -> model -> task -> metrics
  std::map<std::string, std::map<std::string, std::map<Task, Metrics>>> table;
  json report{{"partitions", json::object()}};
  std::string text;
  for (const auto& f : files) {
    const PredictionSet p = PredictionSet::from_json(load_json(f), f.string());
    m.input(f.filename().string(), f);
    std::vector<std::size_t> truth, pred;
    std::size_t unanswered = 0;
    for (std::size_t i = 0; i < p.case_ids.size(); ++i) {
      auto it = by_id.find(p.case_ids[i]);
      if (it == by_id.end()) {
        throw Error(ErrorCode::kUnknownLabel,
                    f.string() + ": case " + p.case_ids[i] + " not in records");
      }
      if (!p.tokens[i]) {
        ++unanswered;
        continue;
      }
      const auto label = parse_token(p.task, *p.tokens[i]);
      if (!label) {
        throw Error(ErrorCode::kUnknownLabel,
                    f.string() + ": '" + *p.tokens[i] + "' is not a " +
                        std::string(task_name(p.task)) + " label");
      }
      truth.push_back(class_index(it->second->labels, p.task));
      pred.push_back(*label);
    }
    const ConfusionMatrix cm = confusion(truth, pred, class_names(p.task));
    const Metrics mt = metrics(cm);
    table[p.partition][p.model][p.task] = mt;
    report["partitions"][p.partition]["models"][p.model]
          [std::string(task_name(p.task))] = {{"metrics", metrics_json(mt)},
                                              {"confusion", cm.to_json()},
                                              {"unanswered", unanswered}};
    char line[200];
    std::snprintf(line, sizeof line,
                  "[%s] %s / %s  n=%lld  acc=%.3f  prec=%.3f  rec=%.3f  f1=%.3f",
                  p.partition.c_str(), p.model.c_str(),
                  std::string(task_name(p.task)).c_str(), cm.total(), mt.accuracy,
                  mt.precision, mt.recall, mt.f1);
    text += line;
    if (unanswered) text += "  unanswered=" + std::to_string(unanswered);
    text += "\n" + format_confusion(cm) + "\n";
  }
  for (const auto& [part, models] : table) {
    std::vector<MetricRow> rows;
    for (const auto& [name, tasks] : models) {
      if (tasks.size() != std::size(kAllTasks)) continue;
      MetricRow row;
      row.model_name = name;
      for (const auto& [task, mt] : tasks) row.set(task, mt);
      rows.push_back(row);
    }
    if (rows.size() >= 2) {
      const auto ranked = rank_table(rows);
      report["partitions"][part]["rank_table"] = rank_table_json(ranked);
      text += "[" + part + "] average column-wise rank\n" +
              format_rank_table(ranked) + "\n";
    }
  }
  m.output(a.out, "eval_report.json", report.dump(2) + "\n");
  m.output(a.out, "eval_report.txt", text);
  m.write(a.out);
  std::cout << "evaluated " << files.size() << " prediction file(s)\n";
}

struct WhatIfArgs {
  std::string records, split, partition = "test", out;
  std::string model;  // baseline model file
  std::string endpoint, transcript, name = "LLM", task = "severity";
  std::string factors = "alcohol,icy_road,work_zone";
  std::string rates = "1,2,all";
  long long timeout_ms = 30000;
  int retries = 3;
  bool substring_fallback = false;
};

void cmd_whatif(const WhatIfArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  const auto templates = load_templates(g, dict);
  const bool baseline = !a.model.empty();
  if (baseline == (!a.endpoint.empty() || !a.transcript.empty())) {
    throw Error(ErrorCode::kUsage,
                "give either --model or one of --endpoint/--mock-transcript");
  }
  std::vector<Factor> factors;
  for (const auto& s : split_list(a.factors)) factors.push_back(factor_from_name(s));
  std::vector<Rate> rates;
  for (const auto& s : split_list(a.rates)) rates.push_back(Rate::parse(s));

  const auto records = load_records(a.records);
  const SplitManifest sm = SplitManifest::from_json(load_json(a.split));
  const auto test = partition(records, sm, a.partition);

  Manifest m("whatif", g, dict);
  m.templates(templates);
  m.input("records", a.records);
  m.input("split", a.split);
  m.param("partition", a.partition);

  std::optional<BaselineModel> model;
  std::unique_ptr<Predictor> predictor;
  Task task;
  std::string model_name;
  if (baseline) {
    m.input("model", a.model);
    model = BaselineModel::from_json(load_json(a.model), dict);
    task = model->task;
    model_name = model->name;
  } else {
    predictor = make_predictor(a.endpoint, a.transcript, a.timeout_ms);
    task = task_from_name(a.task);
    model_name = a.name;
  }
  RetryPolicy policy;
  policy.retries = a.retries;
  const ParseOptions opts{a.substring_fallback};
  const std::size_t fallback = 0;  // unanswered LLM cases count as class 0
  auto llm_predict = [&](const std::vector<std::string>& users) {
    std::vector<PredictRequest> reqs;
    for (std::size_t i = 0; i < test.size(); ++i) {
      reqs.push_back({task, templates.system_prompt(task), users[i],
                      test[i].case_id});
    }
    const BatchResult r = predict_batch(*predictor, reqs, g.jobs, policy, opts);
    std::vector<std::size_t> out;
    for (const auto& l : r.labels) out.push_back(l.value_or(fallback));
    return out;
  };

  std::vector<std::size_t> before;
  if (baseline) {
    before = model->predict(test);
  } else {
    std::vector<std::string> users;
    for (const auto& r : test) {
      users.push_back(join_user_text(render_paragraphs(r, templates, dict)));
    }
    before = llm_predict(users);
  }
  const auto classes = class_names(task);
  json summary{{"model", model_name},
               {"task", std::string(task_name(task))},
               {"partition", a.partition},
               {"cases", test.size()},
               {"runs", json::array()}};
  for (Factor factor : factors) {
    for (const Rate& rate : rates) {
      const std::string stem =
          std::string(factor_name(factor)) + "_" + rate_stem(rate);
      json run{{"factor", std::string(factor_name(factor))},
               {"rate", rate.label()}};
      try {
        const PerturbationPlan p = plan(test, factor, rate, g.seed);
        std::vector<std::size_t> after;
        if (baseline) {
          after = model->predict(apply_records(test, p, dict));
        } else {
          std::vector<std::string> users;
          for (auto& c : apply(test, p, templates, dict)) {
            users.push_back(std::move(c.user_text));
          }
          after = llm_predict(users);
        }
        const ShiftReport shift = shift_report(before, after, classes);
        m.output(a.out, "plan_" + stem + ".json", p.to_json().dump(1) + "\n");
        m.output(a.out, "shift_" + stem + ".json", shift.to_json().dump(2) + "\n");
        m.output(a.out, "plot_" + stem + ".csv", shift.plot_csv());
        run["base_count"] = p.base_count;
        run["selected"] = p.selected_case_ids.size();
        run["adverse_after"] = p.adverse_after();
        run["shift"] = shift.to_json();
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyComplement) throw;
        run["skipped"] = std::string(code_name(e.code()));
      }
      summary["runs"].push_back(std::move(run));
    }
  }
  m.output(a.out, "whatif_summary.json", summary.dump(2) + "\n");
  m.write(a.out);
  std::cout << "what-if: " << summary["runs"].size() << " run(s) over "
            << test.size() << " case(s)\n";
}

struct GeoArgs {
  std::optional<double> easting, northing;
  std::string records, out;
  bool tile = false;
  int zoom = 19;
  int size = 512;
  std::string maptype = "satellite";
};

void cmd_geo(const GeoArgs& a, const GlobalOptions& g) {
  const char* env_key = std::getenv(kMapsKeyEnv);
  const std::string key = env_key ? env_key : "";
  const geo::TileRequest req{a.size, a.zoom, a.maptype};
  auto fmt = [&](const std::string& id, const geo::GeoPoint& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.9f,%.9f", p.lat, p.lon);
    std::string line = id.empty() ? std::string(buf) : id + "," + buf;
    if (a.tile) line += "," + geo::tile_url(p, key, req);
    return line + "\n";
  };
  if (!a.records.empty()) {
    if (a.out.empty()) throw Error(ErrorCode::kUsage, "--records needs --out");
    const auto dict = load_dictionary(g);
    std::string csv = a.tile ? "case_id,lat,lon,tile_url\n" : "case_id,lat,lon\n";
    for (const auto& r : load_records(a.records)) {
      const auto& e = r.general.state_plane_easting;
      const auto& n = r.general.state_plane_northing;
      if (!e || !n) continue;
      csv += fmt(r.case_id, geo::lcc_inverse(*e, *n));
    }
    Manifest m("geo", g, dict);
    m.input("records", a.records);
    const fs::path out(a.out);
    m.output(out.parent_path().empty() ? "." : out.parent_path(),
             out.filename().string(), csv);
    m.write(out.parent_path().empty() ? "." : out.parent_path(),
            out.filename().string() + ".manifest.json");
    return;
  }
  if (!a.easting || !a.northing) {
    throw Error(ErrorCode::kUsage, "give --easting and --northing, or --records");
  }
  std::cout << fmt("", geo::lcc_inverse(*a.easting, *a.northing));
}

struct SftArgs {
  std::string records, split, partition = "train", task, out;
};

void cmd_export_sft(const SftArgs& a, const GlobalOptions& g) {
  const auto dict = load_dictionary(g);
  const auto templates = load_templates(g, dict);
  auto records = load_records(a.records);
  Manifest m("export-sft", g, dict);
  m.templates(templates);
  m.input("records", a.records);
  if (!a.split.empty()) {
    m.input("split", a.split);
    records = partition(records, SplitManifest::from_json(load_json(a.split)),
                        a.partition);
    m.param("partition", a.partition);
  }
  const Task task = task_from_name(a.task);
  const fs::path out(a.out);
  const fs::path dir = out.parent_path().empty() ? "." : out.parent_path();
  m.output(dir, out.filename().string(),
           render_sft(records, task, templates, dict));
  m.write(dir, out.filename().string() + ".manifest.json");
  std::cout << "exported " << records.size() << " SFT example(s)\n";
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"crashkit: crash-record textualization, baselines, evaluation "
               "and what-if analysis"};
  app.name(std::string(kToolName));
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed echoed into every manifest")
      ->capture_default_str();
  app.add_option("--dictionary", g.dictionary,
                 "Feature dictionary file (default: the bundled one)")
      ->check(CLI::ExistingFile);
  app.add_option("--templates", g.templates,
                 "Paragraph template file (default: the bundled one)")
      ->check(CLI::ExistingFile);
  app.add_option("--jobs", g.jobs, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::function<void()> action;

  IngestArgs ia;
  auto* ingest_cmd = app.add_subcommand("ingest", "Join and clean raw tables");
  ingest_cmd->add_option("--crash", ia.crash)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--road", ia.road)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--unit", ia.unit)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--person", ia.person)->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ia.out, "Output directory")->required();
  ingest_cmd->add_option("--min-completeness", ia.min_completeness)
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  ingest_cmd->add_option("--delimiter", ia.delimiter)->capture_default_str();
  ingest_cmd->add_flag("--strict", ia.strict, "Fail on the first malformed line");
  ingest_cmd->callback([&] { action = [&] { cmd_ingest(ia, g); }; });

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
  synth_cmd->add_option("--n", sa.n, "Number of records")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", sa.out, "Output directory")->required();
  synth_cmd->add_flag("--tables", sa.tables, "Also write raw source tables");
  synth_cmd->callback([&] { action = [&] { cmd_synth(sa, g); }; });

  TextualizeArgs ta;
  auto* text_cmd = app.add_subcommand("textualize", "Render prompt bundles");
  text_cmd->add_option("--records", ta.records)->required()->check(CLI::ExistingFile);
  text_cmd->add_option("--tasks", ta.tasks, "Comma list or 'all'")->capture_default_str();
  text_cmd->add_option("--out", ta.out, "Output directory")->required();
  text_cmd->callback([&] { action = [&] { cmd_textualize(ta, g); }; });

  SplitArgs spa;
  auto* split_cmd = app.add_subcommand("split", "Month-based train/test split");
  split_cmd->add_option("--records", spa.records)->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--test-months", spa.months)->capture_default_str();
  split_cmd->add_flag("--no-resample", spa.no_resample,
                      "Skip the injury-uniform evaluation subset");
  split_cmd->add_option("--out", spa.out, "Output directory")->required();
  split_cmd->callback([&] { action = [&] { cmd_split(spa, g); }; });

  TrainArgs tra;
  auto* train_cmd = app.add_subcommand("train-baseline", "Train classical baselines");
  train_cmd->add_option("--records", tra.records)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--split", tra.split)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--models", tra.models,
                        "Comma list of logreg,tree,forest,adaboost,naive_bayes,gbdt or 'all'")
      ->capture_default_str();
  train_cmd->add_option("--tasks", tra.tasks)->capture_default_str();
  train_cmd->add_option("--n-estimators", tra.n_estimators);
  train_cmd->add_option("--epochs", tra.epochs);
  train_cmd->add_option("--max-depth", tra.max_depth);
  train_cmd->add_option("--learning-rate", tra.learning_rate);
  train_cmd->add_option("--out", tra.out, "Output directory")->required();
  train_cmd->callback([&] { action = [&] { cmd_train(tra, g); }; });

  PredictArgs pa;
  auto* pred_cmd = app.add_subcommand("predict-llm", "Query a /predict endpoint");
  pred_cmd->add_option("--records", pa.records)->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--split", pa.split)->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("--partition", pa.partition)->capture_default_str();
  pred_cmd->add_option("--tasks", pa.tasks)->capture_default_str();
  pred_cmd->add_option("--endpoint", pa.endpoint, "http://host:port[/prefix]");
  pred_cmd->add_option("--mock-transcript", pa.transcript,
                       "Offline case_id -> label transcript (JSON lines)")
      ->check(CLI::ExistingFile);
  pred_cmd->add_option("--name", pa.name, "Model name in reports")->capture_default_str();
  pred_cmd->add_option("--timeout-ms", pa.timeout_ms)->capture_default_str();
  pred_cmd->add_option("--retries", pa.retries)->capture_default_str();
  pred_cmd->add_option("--max-in-flight", pa.max_in_flight,
                       "Concurrent requests (default: --jobs)");
  pred_cmd->add_flag("--substring-fallback", pa.substring_fallback,
                     "Accept a label token embedded in prose");
  pred_cmd->add_option("--out", pa.out, "Output directory")->required();
  pred_cmd->callback([&] { action = [&] { cmd_predict(pa, g); }; });

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Score prediction files");
  eval_cmd->add_option("--records", ea.records)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--predictions", ea.predictions,
                       "Prediction files or directories")
      ->required()
      ->check(CLI::ExistingPath);
  eval_cmd->add_option("--out", ea.out, "Output directory")->required();
  eval_cmd->callback([&] { action = [&] { cmd_eval(ea, g); }; });

  WhatIfArgs wa;
  auto* whatif_cmd = app.add_subcommand("whatif", "Counterfactual perturbation analysis");
  whatif_cmd->add_option("--records", wa.records)->required()->check(CLI::ExistingFile);
  whatif_cmd->add_option("--split", wa.split)->required()->check(CLI::ExistingFile);
  whatif_cmd->add_option("--partition", wa.partition)->capture_default_str();
  whatif_cmd->add_option("--model", wa.model, "Baseline model file")
      ->check(CLI::ExistingFile);
  whatif_cmd->add_option("--endpoint", wa.endpoint);
  whatif_cmd->add_option("--mock-transcript", wa.transcript)->check(CLI::ExistingFile);
  whatif_cmd->add_option("--name", wa.name)->capture_default_str();
  whatif_cmd->add_option("--task", wa.task, "Task for endpoint predictors")
      ->capture_default_str();
  whatif_cmd->add_option("--factors", wa.factors)->capture_default_str();
  whatif_cmd->add_option("--rates", wa.rates)->capture_default_str();
  whatif_cmd->add_option("--timeout-ms", wa.timeout_ms)->capture_default_str();
  whatif_cmd->add_option("--retries", wa.retries)->capture_default_str();
  whatif_cmd->add_flag("--substring-fallback", wa.substring_fallback);
  whatif_cmd->add_option("--out", wa.out, "Output directory")->required();
  whatif_cmd->callback([&] { action = [&] { cmd_whatif(wa, g); }; });

  GeoArgs ga;
  auto* geo_cmd = app.add_subcommand("geo", "State Plane to WGS84 and tile URLs");
  geo_cmd->add_option("--easting", ga.easting);
  geo_cmd->add_option("--northing", ga.northing);
  geo_cmd->add_option("--records", ga.records)->check(CLI::ExistingFile);
  geo_cmd->add_option("--out", ga.out, "CSV output file (with --records)");
  geo_cmd->add_flag("--tile", ga.tile, "Append a static-map URL");
  geo_cmd->add_option("--zoom", ga.zoom)->capture_default_str();
  geo_cmd->add_option("--size", ga.size)->capture_default_str();
  geo_cmd->add_option("--maptype", ga.maptype)->capture_default_str();
  geo_cmd->callback([&] { action = [&] { cmd_geo(ga, g); }; });

  SftArgs xa;
  auto* sft_cmd = app.add_subcommand("export-sft", "Write fine-tuning JSON lines");
  sft_cmd->add_option("--records", xa.records)->required()->check(CLI::ExistingFile);
  sft_cmd->add_option("--split", xa.split)->check(CLI::ExistingFile);
  sft_cmd->add_option("--partition", xa.partition)->capture_default_str();
  sft_cmd->add_option("--task", xa.task)->required();
  sft_cmd->add_option("--out", xa.out, "Output file")->required();
  sft_cmd->callback([&] { action = [&] { cmd_export_sft(xa, g); }; });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << code_name(ErrorCode::kUsage) << ": " << e.what()
              << "\n";
    return kExitUsage;
  }
  try {
    if (action) action();
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::kUsage ? kExitUsage : kExitDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << code_name(ErrorCode::kIo) << ": " << e.what()
              << "\n";
    return kExitDomainError;
  }
}

}  // namespace crashkit::cli

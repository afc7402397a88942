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

#ifndef CRASHKIT_LLM_CLIENT_H_
#define CRASHKIT_LLM_CLIENT_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "crashkit/error.h"
#include "crashkit/labels.h"
#include "crashkit/textualize.h"
#include "json.hpp"

namespace crashkit {

// Wire format of POST /predict:
//   request  {"task": "injury", "system": "...", "user": "...", "case_id": "..."}
//   response {"label": "<TWO>", "raw": <any provider payload>}
struct PredictRequest {
  Task task = Task::kInjury;
  std::string system;
  std::string user;
  std::string case_id;

  static PredictRequest from_bundle(const PromptBundle& bundle);
  void validate() const;  // throws kInvalidArgument on empty texts
  nlohmann::json to_json() const;
  std::string body() const;  // the exact bytes sent
  static PredictRequest from_json(const nlohmann::json& j);
};

struct PredictResponse {
  std::string label;
  nlohmann::json raw;

  static PredictResponse from_json(const nlohmann::json& j);  // throws kTransport
  nlohmann::json to_json() const;
};

// One round trip to a predictor. Implementations throw Error with
// kTransport or kTimeout for failures worth retrying; any other code is
// final. Must be safe to call from several threads at once.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictResponse call(const PredictRequest& request) = 0;
};

// Plain-HTTP client for "http://host:port[/prefix]"; requests go to
// <prefix>/predict unless the URL already ends in /predict. 5xx replies and
// connection failures are retryable; 4xx replies are not.
class HttpPredictor : public Predictor {
 public:
  HttpPredictor(std::string endpoint, std::chrono::milliseconds timeout,
                std::string bearer_token = {});
  PredictResponse call(const PredictRequest& request) override;

 private:
  std::string host_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::string token_;
};

// Offline predictor answering from a case_id -> label transcript. Each
// transcript line is {"case_id": ..., "label": ...}. Scripted failures make
// the first n calls for a case throw the given code.
class MockPredictor : public Predictor {
 public:
  MockPredictor() = default;
  explicit MockPredictor(std::map<std::string, std::string> labels);
  // Reads a transcript file; throws kIo, kParse.
  static std::map<std::string, std::string> read_transcript(
      const std::filesystem::path& path);

  void set_label(const std::string& case_id, const std::string& label);
  void fail_first(const std::string& case_id, int times,
                  ErrorCode code = ErrorCode::kTransport);
  int calls(const std::string& case_id) const;

  PredictResponse call(const PredictRequest& request) override;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> labels_;
  std::map<std::string, std::pair<int, ErrorCode>> failures_;
  std::map<std::string, int> calls_;
};

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{2000};
  // Upper bound on the summed waits of one request.
  std::chrono::milliseconds total_ceiling{10000};
  // Replaceable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;

  // Wait before retry `attempt` (0-based), already clipped by max_backoff.
  std::chrono::milliseconds backoff(int attempt) const;
};

struct ParseOptions {
  // Accept a token found anywhere in the label text (hosted models may wrap
  // it in prose). Off by default: labels must match a token exactly.
  bool substring_fallback = false;
};

struct PredictOutcome {
  std::size_t label = 0;
  std::string token;
  int retries = 0;
  std::chrono::milliseconds waited{0};
};

// Throws kInvalidLabel (never retried), kTransport / kTimeout once retries
// are exhausted, or any non-retryable error from the predictor.
PredictOutcome predict_one(Predictor& predictor, const PredictRequest& request,
                           const RetryPolicy& policy = {},
                           const ParseOptions& options = {});

struct CaseError {
  std::string case_id;
  ErrorCode code = ErrorCode::kTransport;
  std::string message;
};

struct BatchResult {
  std::vector<std::optional<std::size_t>> labels;  // input order
  std::vector<CaseError> errors;                    // input order
  int total_retries = 0;

  nlohmann::json to_json(Task task) const;
};

// Runs up to max_in_flight requests concurrently. Failures are recorded per
// case and never abort the batch. Throws kInvalidArgument for
// max_in_flight == 0.
BatchResult predict_batch(Predictor& predictor,
                          const std::vector<PredictRequest>& requests,
                          std::size_t max_in_flight,
                          const RetryPolicy& policy = {},
                          const ParseOptions& options = {});

}  // namespace crashkit

#endif  // CRASHKIT_LLM_CLIENT_H_

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

#include "crashkit/llm_client.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "crashkit/hashing.h"
#include "httplib.h"

namespace crashkit {

PredictRequest PredictRequest::from_bundle(const PromptBundle& bundle) {
  return {bundle.task, bundle.system_text, bundle.user_text, bundle.case_id};
}

void PredictRequest::validate() const {
  if (system.empty() || user.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "request for " + case_id + " has empty prompt text");
  }
}

nlohmann::json PredictRequest::to_json() const {
  return {{"task", std::string(task_name(task))},
          {"system", system},
          {"user", user},
          {"case_id", case_id}};
}

std::string PredictRequest::body() const { return to_json().dump(); }

PredictRequest PredictRequest::from_json(const nlohmann::json& j) {
  try {
    PredictRequest r;
    r.task = task_from_name(j.at("task").get<std::string>());
    r.system = j.at("system").get<std::string>();
    r.user = j.at("user").get<std::string>();
    r.case_id = j.value("case_id", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad request: ") + e.what());
  }
}

PredictResponse PredictResponse::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("label") || !j["label"].is_string()) {
    throw Error(ErrorCode::kTransport, "response has no string 'label'");
  }
  return {j["label"].get<std::string>(), j.value("raw", nlohmann::json())};
}

nlohmann::json PredictResponse::to_json() const {
  return {{"label", label}, {"raw", raw}};
}

// ------------------------------------------------------------------- http

HttpPredictor::HttpPredictor(std::string endpoint,
                             std::chrono::milliseconds timeout,
                             std::string bearer_token)
    : timeout_(timeout), token_(std::move(bearer_token)) {
  constexpr std::string_view kScheme = "http://";
  if (endpoint.rfind(kScheme, 0) != 0) {
    throw Error(ErrorCode::kUsage,
                "endpoint must start with http:// (got '" + endpoint + "')");
  }
  const std::size_t slash = endpoint.find('/', kScheme.size());
  host_ = endpoint.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : endpoint.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  constexpr std::string_view kPredict = "/predict";
  if (prefix.size() >= kPredict.size() &&
      prefix.compare(prefix.size() - kPredict.size(), kPredict.size(),
                     kPredict) == 0) {
    path_ = prefix;
  } else {
    path_ = prefix + std::string(kPredict);
  }
  if (host_.size() <= kScheme.size()) {
    throw Error(ErrorCode::kUsage, "endpoint has no host");
  }
}

PredictResponse HttpPredictor::call(const PredictRequest& request) {
  httplib::Client client(host_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, request.body(), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= timeout_);
    throw Error(timed_out ? ErrorCode::kTimeout : ErrorCode::kTransport,
                "POST " + host_ + path_ + ": " + httplib::to_string(err));
  }
  if (res->status >= 500) {
    throw Error(ErrorCode::kTransport,
                "POST " + path_ + " returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kInvalidArgument,
                "POST " + path_ + " rejected with HTTP " +
                    std::to_string(res->status) + ": " + res->body);
  }
  nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kTransport, "response body is not JSON");
  }
  return PredictResponse::from_json(j);
}

// ------------------------------------------------------------------- mock

MockPredictor::MockPredictor(std::map<std::string, std::string> labels)
    : labels_(std::move(labels)) {}

std::map<std::string, std::string> MockPredictor::read_transcript(
    const std::filesystem::path& path) {
  std::map<std::string, std::string> labels;
  const std::string text = read_file(path);
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("case_id") || !j.contains("label")) {
      throw ParseError(line_no, path.string() + ": bad transcript line");
    }
    labels[j["case_id"].get<std::string>()] = j["label"].get<std::string>();
  }
  return labels;
}

void MockPredictor::set_label(const std::string& case_id,
                              const std::string& label) {
  std::lock_guard lock(mu_);
  labels_[case_id] = label;
}

void MockPredictor::fail_first(const std::string& case_id, int times,
                               ErrorCode code) {
  std::lock_guard lock(mu_);
  failures_[case_id] = {times, code};
}

int MockPredictor::calls(const std::string& case_id) const {
  std::lock_guard lock(mu_);
  auto it = calls_.find(case_id);
  return it == calls_.end() ? 0 : it->second;
}

PredictResponse MockPredictor::call(const PredictRequest& request) {
  std::lock_guard lock(mu_);
  ++calls_[request.case_id];
  auto f = failures_.find(request.case_id);
  if (f != failures_.end() && f->second.first > 0) {
    --f->second.first;
    throw Error(f->second.second, "scripted failure for " + request.case_id);
  }
  auto it = labels_.find(request.case_id);
  if (it == labels_.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no transcript entry for " + request.case_id);
  }
  return {it->second, {{"source", "mock"}}};
}

// ---------------------------------------------------------------- retries

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  const double ms = static_cast<double>(initial_backoff.count()) *
                    std::pow(multiplier, attempt);
  const double capped = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(capped));
}

namespace {

bool retryable(ErrorCode code) {
  return code == ErrorCode::kTransport || code == ErrorCode::kTimeout;
}

}  // namespace

namespace {

// Fills `out` as it goes, so callers still see the retry count when the
// request finally fails.
void run_with_retries(Predictor& predictor, const PredictRequest& request,
                      const RetryPolicy& policy, const ParseOptions& options,
                      PredictOutcome& out) {
  request.validate();
  for (int attempt = 0;; ++attempt) {
    try {
      const PredictResponse resp = predictor.call(request);
      std::optional<std::size_t> label = parse_token(request.task, resp.label);
      if (!label && options.substring_fallback) {
        label = scan_token(request.task, resp.label);
      }
      if (!label) {
        throw Error(ErrorCode::kInvalidLabel,
                    "'" + resp.label + "' is not a " +
                        std::string(task_name(request.task)) + " token");
      }
      out.label = *label;
      out.token = class_tokens(request.task)[*label];
      return;
    } catch (const Error& e) {
      if (!retryable(e.code()) || attempt >= policy.retries ||
          out.waited >= policy.total_ceiling) {
        throw;
      }
      auto wait = policy.backoff(attempt);
      wait = std::min(wait, policy.total_ceiling - out.waited);
      if (wait.count() < 0) wait = std::chrono::milliseconds(0);
      if (policy.sleep) {
        policy.sleep(wait);
      } else {
        std::this_thread::sleep_for(wait);
      }
      out.waited += wait;
      ++out.retries;
    }
  }
}

}  // namespace

PredictOutcome predict_one(Predictor& predictor, const PredictRequest& request,
                           const RetryPolicy& policy,
                           const ParseOptions& options) {
  PredictOutcome out;
  run_with_retries(predictor, request, policy, options, out);
  return out;
}

nlohmann::json BatchResult::to_json(Task task) const {
  const auto tokens = class_tokens(task);
  nlohmann::json labs = nlohmann::json::array();
  for (const auto& l : labels) {
    labs.push_back(l ? nlohmann::json(tokens[*l]) : nlohmann::json());
  }
  nlohmann::json errs = nlohmann::json::array();
  for (const auto& e : errors) {
    errs.push_back({{"case_id", e.case_id},
                    {"code", std::string(code_name(e.code))},
                    {"message", e.message}});
  }
  return {{"labels", labs}, {"errors", errs}, {"total_retries", total_retries}};
}

BatchResult predict_batch(Predictor& predictor,
                          const std::vector<PredictRequest>& requests,
                          std::size_t max_in_flight, const RetryPolicy& policy,
                          const ParseOptions& options) {
  if (max_in_flight == 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  }
  const std::size_t n = requests.size();
  std::vector<std::optional<std::size_t>> labels(n);
  std::vector<std::optional<CaseError>> errors(n);
  std::vector<int> retries(n, 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      PredictOutcome o;
      try {
        run_with_retries(predictor, requests[i], policy, options, o);
        labels[i] = o.label;
      } catch (const Error& e) {
        errors[i] = CaseError{requests[i].case_id, e.code(), e.what()};
      } catch (const std::exception& e) {
        errors[i] = CaseError{requests[i].case_id, ErrorCode::kTransport, e.what()};
      }
      retries[i] = o.retries;
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(max_in_flight, std::max<std::size_t>(n, 1));
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  BatchResult result;
  result.labels = std::move(labels);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) result.errors.push_back(std::move(*errors[i]));
    result.total_retries += retries[i];
  }
  return result;
}

}  // namespace crashkit

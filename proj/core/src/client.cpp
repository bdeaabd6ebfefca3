// Copyright 2026 The Abacus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "abacus/client.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>
#include <utility>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "abacus/digest.hpp"

namespace abacus {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json record_to_json(const GenerationRecord& record) {
  ordered_json j;
  j["request_key"] = record.request_key;
  j["generations"] = record.generations;
  j["model"] = record.model;
  j["timestamp"] = record.timestamp;
  j["source"] = record.source;
  return j;
}

// Lenient by design: a torn or foreign line yields nullopt and is skipped.
std::optional<GenerationRecord> record_from_line(const std::string& line) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (!j.contains("request_key") || !j["request_key"].is_string()) return std::nullopt;
  if (!j.contains("generations") || !j["generations"].is_array()) return std::nullopt;
  GenerationRecord record;
  record.request_key = j["request_key"].get<std::string>();
  for (const auto& g : j["generations"]) {
    if (!g.is_string()) return std::nullopt;
    record.generations.push_back(g.get<std::string>());
  }
  record.model = j.value("model", std::string{});
  record.timestamp = j.value("timestamp", std::string{});
  record.source = j.value("source", std::string{});
  return record;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ParsedUrl {
  std::string origin;  // scheme://host[:port], what the transport wants
  std::string prefix;  // path prefix with no trailing slash, may be empty
};

ParsedUrl parse_base_url(const std::string& base_url) {
  auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("base URL must start with http:// or https://: " + base_url);
  std::string scheme = base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("unsupported URL scheme: " + scheme);
  auto host_begin = scheme_end + 3;
  if (host_begin >= base_url.size())
    throw ConfigError("base URL has no host: " + base_url);
  auto path_begin = base_url.find('/', host_begin);
  ParsedUrl out;
  if (path_begin == std::string::npos) {
    out.origin = base_url;
  } else {
    out.origin = base_url.substr(0, path_begin);
    out.prefix = base_url.substr(path_begin);
  }
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

double jittered_delay(double base, double factor, int attempt, bool jitter) {
  double delay = base;
  for (int i = 0; i < attempt; ++i) delay *= factor;
  if (jitter) {
    thread_local std::mt19937_64 rng(std::random_device{}());
    std::uniform_real_distribution<double> half(0.5, 1.0);
    delay *= half(rng);
  }
  return delay;
}

bool retryable_status(int status) { return status == 429 || status == 503; }

}  // namespace

std::string InferenceRequest::request_key() const {
  params.validate();
  bool greedy = params.mode == DecodeParams::Mode::greedy;
  ordered_json j;
  j["model"] = model;
  j["prompt"] = prompt;
  j["mode"] = std::string(mode_name(params.mode));
  j["temperature"] = greedy ? 0.0 : params.temperature;
  j["top_p"] = greedy ? 1.0 : params.top_p;
  j["n"] = params.samples_per_question();
  j["max_new_tokens"] = params.max_new_tokens;
  j["trial"] = trial;
  return sha256_hex(j.dump());
}

GenerationCache::GenerationCache(std::string path) : path_(std::move(path)) {
  std::error_code ec;
  if (!std::filesystem::exists(path_, ec)) return;
  std::ifstream in(path_);
  if (!in) throw IoError("cannot open cache file: " + path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (auto record = record_from_line(line)) index_[record->request_key] = std::move(*record);
  }
}

std::optional<GenerationRecord> GenerationCache::lookup(const std::string& request_key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = index_.find(request_key);
  if (it == index_.end()) return std::nullopt;
  GenerationRecord record = it->second;
  record.source = "cache";
  return record;
}

void GenerationCache::store(const GenerationRecord& record) {
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to cache file: " + path_);
  out << record_to_json(record).dump() << '\n';
  out.flush();
  if (!out) throw IoError("failed writing cache file: " + path_);
  index_[record.request_key] = record;
}

std::size_t GenerationCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return index_.size();
}

std::size_t GenerationCache::compact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cache file: " + path);
  std::vector<std::string> order;
  std::unordered_map<std::string, GenerationRecord> newest;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto record = record_from_line(line);
    if (!record) continue;
    if (newest.find(record->request_key) == newest.end()) order.push_back(record->request_key);
    newest[record->request_key] = std::move(*record);
  }
  in.close();
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write temporary file: " + tmp);
    for (const auto& key : order) out << record_to_json(newest[key]).dump() << '\n';
    out.flush();
    if (!out) throw IoError("failed writing temporary file: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace cache file: " + ec.message());
  return order.size();
}

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig config;
  const char* base = std::getenv("INFER_BASE_URL");
  if (base == nullptr || *base == '\0')
    throw ConfigError("INFER_BASE_URL is not set; export it to point at the endpoint");
  config.base_url = base;
  if (const char* key = std::getenv("INFER_API_KEY")) config.api_key = key;
  return config;
}

InferenceClient::InferenceClient(EndpointConfig config, GenerationCache* cache)
    : config_(std::move(config)), cache_(cache) {
  parse_base_url(config_.base_url);  // fail fast on a malformed URL
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

GenerationRecord InferenceClient::complete(const InferenceRequest& request) {
  std::string key = request.request_key();
  if (cache_ != nullptr) {
    if (auto hit = cache_->lookup(key)) return *hit;
  }
  GenerationRecord record = fetch(request);
  if (cache_ != nullptr) cache_->store(record);
  return record;
}

GenerationRecord InferenceClient::fetch(const InferenceRequest& request) {
  ParsedUrl url = parse_base_url(config_.base_url);
  bool greedy = request.params.mode == DecodeParams::Mode::greedy;
  int n = request.params.samples_per_question();

  ordered_json body;
  body["model"] = request.model;
  body["prompt"] = request.prompt;
  body["max_tokens"] = request.params.max_new_tokens;
  body["temperature"] = greedy ? 0.0 : request.params.temperature;
  body["top_p"] = greedy ? 1.0 : request.params.top_p;
  body["n"] = n;
  std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_failure = "no attempt made";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      double delay = jittered_delay(config_.backoff_base_seconds, config_.backoff_factor,
                                    attempt - 1, config_.backoff_jitter);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Client http(url.origin);
    http.set_connection_timeout(std::chrono::duration<double>(config_.connect_timeout_seconds));
    http.set_read_timeout(std::chrono::duration<double>(config_.read_timeout_seconds));
    auto res = http.Post(url.prefix + "/completions", headers, payload, "application/json");
    if (!res) {
      last_failure = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (retryable_status(res->status)) {
      last_failure = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw AuthError("endpoint rejected credentials (status " + std::to_string(res->status) + ")");
    if (res->status >= 400 && res->status < 500)
      throw ProtocolError("endpoint rejected request (status " + std::to_string(res->status) +
                          "): " + res->body.substr(0, 200));
    if (res->status != 200)
      throw EndpointUnreachableError("endpoint failed (status " + std::to_string(res->status) +
                                     ")");

    ordered_json reply = ordered_json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object())
      throw ProtocolError("response body is not a JSON object");
    if (!reply.contains("choices") || !reply["choices"].is_array())
      throw ProtocolError("response is missing the choices array");
    const auto& choices = reply["choices"];
    if (static_cast<int>(choices.size()) != n)
      throw ProtocolError("expected " + std::to_string(n) + " choices, got " +
                          std::to_string(choices.size()));

    GenerationRecord record;
    record.request_key = request.request_key();
    record.generations.assign(static_cast<std::size_t>(n), std::string{});
    std::vector<bool> filled(static_cast<std::size_t>(n), false);
    for (std::size_t pos = 0; pos < choices.size(); ++pos) {
      const auto& choice = choices[pos];
      if (!choice.is_object() || !choice.contains("text") || !choice["text"].is_string())
        throw ProtocolError("choice " + std::to_string(pos) + " has no text field");
      std::size_t slot = pos;
      if (choice.contains("index") && choice["index"].is_number_integer()) {
        auto idx = choice["index"].get<long long>();
        if (idx < 0 || idx >= n)
          throw ProtocolError("choice index " + std::to_string(idx) + " out of range");
        slot = static_cast<std::size_t>(idx);
      }
      if (filled[slot]) throw ProtocolError("duplicate choice index " + std::to_string(slot));
      filled[slot] = true;
      record.generations[slot] = choice["text"].get<std::string>();
    }
    record.model = reply.value("model", request.model);
    record.timestamp = utc_timestamp();
    record.source = "network";
    return record;
  }
  throw EndpointUnreachableError("retries exhausted after " +
                                 std::to_string(config_.max_retries + 1) +
                                 " attempts; last failure: " + last_failure);
}

std::vector<GenerationRecord> InferenceClient::run_batch(
    const std::vector<InferenceRequest>& requests, int parallelism) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  std::vector<BatchOutcome> outcomes(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        outcomes[i].record = complete(requests[i]);
        outcomes[i].ok = true;
      } catch (const Error& e) {
        outcomes[i].error = e.what();
      }
    }
  };
  std::size_t num_workers =
      std::min(static_cast<std::size_t>(parallelism), std::max<std::size_t>(requests.size(), 1));
  if (num_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(num_workers);
    for (std::size_t i = 0; i < num_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::size_t failures = 0;
  for (const auto& outcome : outcomes)
    if (!outcome.ok) ++failures;
  if (failures > 0)
    throw BatchFailureError(std::to_string(failures) + " of " + std::to_string(requests.size()) +
                                " requests failed",
                            std::move(outcomes));
  std::vector<GenerationRecord> records;
  records.reserve(outcomes.size());
  for (auto& outcome : outcomes) records.push_back(std::move(outcome.record));
  return records;
}

}  // namespace abacus

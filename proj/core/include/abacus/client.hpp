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

#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "abacus/decode.hpp"
#include "abacus/errors.hpp"

namespace abacus {

/// One completion call. Identical effective wire parameters (greedy
/// normalizes temperature/top_p/n) produce identical keys; the trial index
/// keeps repeated evaluation rounds from colliding in the cache.
struct InferenceRequest {
  std::string model;
  std::string prompt;
  DecodeParams params;
  int trial = 0;

  /// sha256 over the canonical serialization of (model, prompt, effective
  /// decode parameters, trial). Pure function of its inputs.
  std::string request_key() const;
};

struct GenerationRecord {
  std::string request_key;
  std::vector<std::string> generations;  // length = effective n
  std::string model;      // as reported by the endpoint (or requested)
  std::string timestamp;  // UTC, RFC 3339
  std::string source;     // "network" or "cache"
};

/// Append-only line-delimited store keyed by request_key. Loading replays
/// the file last-write-wins; appends are atomic under an internal mutex, so
/// concurrent workers never interleave partial lines. A torn final line
/// (crash mid-append) is skipped on load.
class GenerationCache {
 public:
  /// Opens or creates the store at `path`. Throws IoError on unreadable data.
  explicit GenerationCache(std::string path);

  std::optional<GenerationRecord> lookup(const std::string& request_key) const;

  /// Appends and indexes the record. Thread-safe.
  void store(const GenerationRecord& record);

  std::size_t size() const;
  const std::string& path() const { return path_; }

  /// Rewrites the file keeping one line per key (the newest), preserving
  /// first-appearance order. Returns the number of records kept.
  static std::size_t compact(const std::string& path);

 private:
  mutable std::mutex mu_;
  std::string path_;
  std::unordered_map<std::string, GenerationRecord> index_;
};

struct EndpointConfig {
  std::string base_url;  // e.g. "http://localhost:8000/v1"
  std::string api_key;   // sent as a Bearer token when non-empty
  int max_retries = 3;
  double backoff_base_seconds = 1.0;
  double backoff_factor = 2.0;
  bool backoff_jitter = true;
  double connect_timeout_seconds = 10.0;
  double read_timeout_seconds = 300.0;

  /// Reads INFER_BASE_URL (required) and INFER_API_KEY (optional).
  /// Throws ConfigError when the base URL is missing.
  static EndpointConfig from_env();
};

/// Per-request outcome of a batch; `record` is meaningful when ok.
struct BatchOutcome {
  bool ok = false;
  std::string error;
  GenerationRecord record;
};

/// run_batch failure carrying every request's outcome, successes included.
class BatchFailureError : public Error {
 public:
  BatchFailureError(const std::string& what, std::vector<BatchOutcome> outcomes)
      : Error(FailClass::endpoint, "BatchFailureError: " + what),
        outcomes_(std::move(outcomes)) {}

  const std::vector<BatchOutcome>& outcomes() const { return outcomes_; }

 private:
  std::vector<BatchOutcome> outcomes_;
};

/// OpenAI-compatible completions driver with caching and bounded-parallel
/// batches. Transport failures and throttling responses (429/503) are
/// retried with exponential backoff; other failures surface immediately.
class InferenceClient {
 public:
  /// `cache` may be null to disable caching; otherwise it must outlive the
  /// client.
  InferenceClient(EndpointConfig config, GenerationCache* cache);

  /// Cache hit returns the stored generations with source = "cache" and no
  /// network traffic. Otherwise posts {prefix}/completions, validates the
  /// response shape, persists, and returns source = "network".
  /// Throws EndpointUnreachableError, ProtocolError, AuthError.
  GenerationRecord complete(const InferenceRequest& request);

  /// Completes all requests on up to `parallelism` workers. Output order is
  /// input order regardless of scheduling. If any request fails, throws
  /// BatchFailureError carrying per-request outcomes.
  std::vector<GenerationRecord> run_batch(const std::vector<InferenceRequest>& requests,
                                          int parallelism);

 private:
  GenerationRecord fetch(const InferenceRequest& request);

  EndpointConfig config_;
  GenerationCache* cache_;
};

}  // namespace abacus

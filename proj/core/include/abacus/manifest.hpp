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

#include <string>
#include <vector>

namespace abacus {

struct FileDigest {
  std::string path;
  std::string sha256;
};

/// Provenance sidecar written next to every command's outputs. Re-running
/// the recorded command with the recorded config reproduces the recorded
/// output digests for deterministic commands.
struct RunManifest {
  std::string command;      // argv, joined with single spaces
  std::string tool_version;
  std::string timestamp;    // UTC, RFC 3339
  double duration_seconds = 0.0;
  std::string config_json;  // effective config as a JSON object, text form
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

/// Computes sha256 over the file at `path` and appends it. Throws IoError.
void add_file_digest(std::vector<FileDigest>& digests, const std::string& path);

/// Conventional sidecar name: "<output>.manifest.json".
std::string manifest_path_for(const std::string& output_path);

/// Serializes as pretty-printed JSON. config_json must parse as an object
/// (empty string means an empty config). Throws ConfigError or IoError.
void write_run_manifest(const std::string& path, const RunManifest& manifest);

RunManifest read_run_manifest(const std::string& path);

/// RFC 3339 UTC "now", the form manifests carry.
std::string manifest_timestamp();

}  // namespace abacus

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

#include "abacus/manifest.hpp"

#include <ctime>
#include <fstream>

#include <json.hpp>

#include "abacus/digest.hpp"
#include "abacus/errors.hpp"
#include "abacus/version.hpp"

namespace abacus {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json digest_array(const std::vector<FileDigest>& digests) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : digests) {
    ordered_json j;
    j["path"] = d.path;
    j["sha256"] = d.sha256;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<FileDigest> digests_from(const ordered_json& arr, const std::string& path) {
  if (!arr.is_array()) throw DataFormatError(path + ": digest list is not an array");
  std::vector<FileDigest> out;
  for (const auto& j : arr) {
    if (!j.is_object() || !j.contains("path") || !j.contains("sha256"))
      throw DataFormatError(path + ": malformed digest entry");
    out.push_back({j["path"].get<std::string>(), j["sha256"].get<std::string>()});
  }
  return out;
}

}  // namespace

void add_file_digest(std::vector<FileDigest>& digests, const std::string& path) {
  digests.push_back({path, sha256_file_hex(path)});
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

std::string manifest_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_run_manifest(const std::string& path, const RunManifest& manifest) {
  ordered_json config = ordered_json::object();
  if (!manifest.config_json.empty()) {
    config = ordered_json::parse(manifest.config_json, nullptr, false);
    if (config.is_discarded() || !config.is_object())
      throw ConfigError("manifest config snapshot is not a JSON object");
  }
  ordered_json j;
  j["command"] = manifest.command;
  j["tool_version"] = manifest.tool_version.empty() ? std::string(kVersion)
                                                    : manifest.tool_version;
  j["timestamp"] = manifest.timestamp;
  j["duration_seconds"] = manifest.duration_seconds;
  j["config"] = std::move(config);
  j["inputs"] = digest_array(manifest.inputs);
  j["outputs"] = digest_array(manifest.outputs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

RunManifest read_run_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataFormatError(path + ": not a JSON object");
  RunManifest manifest;
  manifest.command = j.value("command", std::string{});
  manifest.tool_version = j.value("tool_version", std::string{});
  manifest.timestamp = j.value("timestamp", std::string{});
  manifest.duration_seconds = j.value("duration_seconds", 0.0);
  if (j.contains("config")) manifest.config_json = j["config"].dump();
  if (j.contains("inputs")) manifest.inputs = digests_from(j["inputs"], path);
  if (j.contains("outputs")) manifest.outputs = digests_from(j["outputs"], path);
  return manifest;
}

}  // namespace abacus

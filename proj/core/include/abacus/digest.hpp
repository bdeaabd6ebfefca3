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
#include <string>
#include <string_view>

namespace abacus {

/// Streaming SHA-256, lowercase hex output. Backs dataset digests,
/// reproducibility manifests and response-cache request keys.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t len);
  void update(std::string_view s) { update(s.data(), s.size()); }

  /// Finalizes and returns the 64-char hex digest. The object must not be
  /// updated afterwards.
  std::string hex_digest();

 private:
  void* ctx_;  // EVP_MD_CTX; opaque so OpenSSL headers stay out of the API
};

std::string sha256_hex(std::string_view data);

/// Digest of a file's raw bytes. Throws IoError when unreadable.
std::string sha256_file_hex(const std::string& path);

}  // namespace abacus

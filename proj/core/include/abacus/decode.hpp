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

#include <string_view>

#include "abacus/errors.hpp"

namespace abacus {

/// Sampling configuration shared by the scorer (shape checks) and the
/// inference client (request parameters). Defaults are the evaluation
/// protocol: T=0.6, p=0.9, 8 samples, 256 new tokens, 3 repeated trials.
struct DecodeParams {
  enum class Mode { greedy, sample };

  Mode mode = Mode::sample;
  double temperature = 0.6;
  double top_p = 0.9;
  int num_samples = 8;
  int max_new_tokens = 256;
  int trials = 3;

  int samples_per_question() const { return mode == Mode::greedy ? 1 : num_samples; }

  void validate() const {
    if (mode == Mode::greedy && num_samples != 1) {
      throw ConfigError("greedy decoding implies num_samples = 1");
    }
    if (temperature < 0) throw ConfigError("temperature must be non-negative");
    if (top_p <= 0 || top_p > 1) throw ConfigError("top_p must lie in (0, 1]");
    if (num_samples < 1) throw ConfigError("num_samples must be >= 1");
    if (max_new_tokens < 1) throw ConfigError("max_new_tokens must be >= 1");
    if (trials < 1) throw ConfigError("trials must be >= 1");
  }
};

inline std::string_view mode_name(DecodeParams::Mode m) {
  return m == DecodeParams::Mode::greedy ? "greedy" : "sc";
}

}  // namespace abacus

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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abacus/exact_value.hpp"
#include "abacus/gsm_record.hpp"

namespace abacus {

/// Prompt template prepended to every probe; "{q}" is replaced by the
/// question text.
inline constexpr std::string_view kDefaultProbeHeader =
    "Question: {q}\nLet's think step by step\n";

/// Arithmetic-in-context probe: the solution text up to one calculation's
/// "=", with every prior step left intact and correct. The model only has to
/// finish the arithmetic, so accuracy here isolates calculation from
/// reasoning.
struct ArithProbe {
  std::string source_id;
  std::size_t annotation_index = 0;
  std::string prompt;    // ends with '='; never contains "<<"
  ExactValue expected;
  int max_new_tokens = 5;
};

struct ProbeResult {
  ArithProbe probe;
  std::string generation;
  std::optional<ExactValue> extracted;
  bool correct = false;
};

/// One probe per annotation, in order. The prompt is header(question) plus
/// the annotation-stripped solution prefix that ends immediately after the
/// "=" preceding annotation i. Annotations not directly preceded by "=" do
/// not follow the calculator convention and are skipped; callers can detect
/// that as a count shorter than record.annotations.size().
std::vector<ArithProbe> build_probes(const GsmRecord& record,
                                     std::string_view header = kDefaultProbeHeader);

/// Extraction: the leading numeral of the generation after optional
/// whitespace; anything else fails extraction. Correct iff the extracted
/// value matches `expected` within `tolerance` (default: exactly).
ProbeResult score_probe(const ArithProbe& probe, std::string generation,
                        const ExactValue& tolerance = ExactValue(0));

/// count(correct) / count(all). Throws EmptyInputError on an empty list.
double arithmetic_accuracy(const std::vector<ProbeResult>& results);

}  // namespace abacus

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

#include "abacus/probes.hpp"

#include <utility>

#include "abacus/errors.hpp"

namespace abacus {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string fill_header(std::string_view header, const std::string& question) {
  std::string out;
  out.reserve(header.size() + question.size());
  std::size_t from = 0;
  for (;;) {
    std::size_t slot = header.find("{q}", from);
    if (slot == std::string_view::npos) break;
    out.append(header.substr(from, slot - from));
    out.append(question);
    from = slot + 3;
  }
  out.append(header.substr(from));
  return out;
}

// Position of the '=' that the annotation completes: the first non-space
// character scanning left from the token. Returns npos when the record does
// not follow the "a + b = <<a+b=r>>" convention at this annotation.
std::size_t preceding_equals(const std::string& solution, std::size_t token_begin) {
  std::size_t i = token_begin;
  while (i > 0 && is_space(solution[i - 1])) --i;
  if (i == 0 || solution[i - 1] != '=') return std::string::npos;
  return i - 1;
}

}  // namespace

std::vector<ArithProbe> build_probes(const GsmRecord& record, std::string_view header) {
  std::vector<ArithProbe> probes;
  probes.reserve(record.annotations.size());
  std::string head = fill_header(header, record.question);
  std::string stripped = strip_annotations(record.solution, record.annotations);

  for (std::size_t i = 0; i < record.annotations.size(); ++i) {
    const Annotation& a = record.annotations[i];
    std::size_t eq = preceding_equals(record.solution, a.token_span.begin);
    if (eq == std::string::npos) continue;
    std::size_t cut = stripped_offset(record.annotations, eq + 1);

    ArithProbe probe;
    probe.source_id = record.id;
    probe.annotation_index = i;
    probe.prompt = head + stripped.substr(0, cut);
    probe.expected = a.result;
    probes.push_back(std::move(probe));
  }
  return probes;
}

ProbeResult score_probe(const ArithProbe& probe, std::string generation,
                        const ExactValue& tolerance) {
  ProbeResult r;
  r.probe = probe;
  r.generation = std::move(generation);

  NumeralOptions opts;
  opts.allow_sign = true;
  opts.allow_fraction = true;
  opts.allow_percent = true;
  opts.allow_currency = true;
  try {
    if (auto m = match_leading_numeral(r.generation, opts)) {
      r.extracted = std::move(m->value);
      r.correct = (*r.extracted - probe.expected).abs() <= tolerance;
    }
  } catch (const Error&) {
    // e.g. a "3/0" prefix: extraction simply fails, the probe scores wrong.
  }
  return r;
}

double arithmetic_accuracy(const std::vector<ProbeResult>& results) {
  if (results.empty()) throw EmptyInputError("no probe results to aggregate");
  std::size_t correct = 0;
  for (const ProbeResult& r : results) {
    if (r.correct) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(results.size());
}

}  // namespace abacus

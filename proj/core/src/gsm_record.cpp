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

#include "abacus/gsm_record.hpp"

#include <utility>

#include "abacus/errors.hpp"
#include "abacus/expr.hpp"

namespace abacus {

namespace {

constexpr std::string_view kOpen = "<<";
constexpr std::string_view kClose = ">>";
constexpr std::string_view kFinalMarker = "####";

NumeralOptions answer_options() {
  NumeralOptions o;
  o.allow_sign = true;
  o.allow_fraction = true;
  o.allow_percent = true;
  o.allow_currency = true;
  return o;
}

}  // namespace

GsmRecord parse_record(std::string id, std::string question, std::string answer) {
  GsmRecord rec;
  rec.id = std::move(id);
  rec.question = std::move(question);
  rec.solution = std::move(answer);
  const std::string& sol = rec.solution;

  std::size_t from = 0;
  while (true) {
    std::size_t open = sol.find(kOpen, from);
    if (open == std::string::npos) break;
    std::size_t close = sol.find(kClose, open + kOpen.size());
    if (close == std::string::npos) {
      throw MalformedAnnotationError("unterminated annotation in record '" + rec.id + "'");
    }
    std::string_view content(sol.data() + open + kOpen.size(),
                             close - open - kOpen.size());
    if (content.find(kOpen) != std::string_view::npos) {
      throw MalformedAnnotationError("nested '<<' in annotation of record '" + rec.id + "'");
    }
    std::size_t eq = content.find('=');
    if (eq == std::string_view::npos) {
      throw MalformedAnnotationError("annotation without '=' in record '" + rec.id + "'");
    }

    Annotation a;
    a.token_span = Span{open, close + kClose.size()};
    a.expr_span = Span{open + kOpen.size(), open + kOpen.size() + eq};
    a.result_span = Span{a.expr_span.end + 1, close};
    a.expr_text.assign(content.substr(0, eq));
    a.result_text.assign(content.substr(eq + 1));
    auto m = match_leading_numeral(a.result_text, answer_options());
    if (!m) {
      throw MalformedAnnotationError("unparsable result '" + a.result_text +
                                     "' in record '" + rec.id + "'");
    }
    a.result = std::move(m->value);
    rec.annotations.push_back(std::move(a));
    from = close + kClose.size();
  }

  std::size_t marker = sol.rfind(kFinalMarker);
  if (marker == std::string::npos) {
    throw MissingFinalAnswerError("record '" + rec.id + "' has no final-answer marker");
  }
  std::size_t tail_begin = marker + kFinalMarker.size();
  std::string_view tail(sol.data() + tail_begin, sol.size() - tail_begin);
  auto m = match_leading_numeral(tail, answer_options());
  if (!m) {
    throw UnparsableFinalError("record '" + rec.id + "' final answer is not a numeral: '" +
                               std::string(tail.substr(0, 32)) + "'");
  }
  rec.final_answer = std::move(m->value);
  rec.final_answer_span = Span{tail_begin + m->span.begin, tail_begin + m->span.end};
  return rec;
}

std::string strip_annotations(const std::string& solution,
                              const std::vector<Annotation>& annotations) {
  std::string out;
  out.reserve(solution.size());
  std::size_t from = 0;
  for (const Annotation& a : annotations) {
    out.append(solution, from, a.token_span.begin - from);
    from = a.token_span.end;
  }
  out.append(solution, from, solution.size() - from);
  return out;
}

std::size_t stripped_offset(const std::vector<Annotation>& annotations,
                            std::size_t original_offset) {
  std::size_t removed = 0;
  for (const Annotation& a : annotations) {
    if (a.token_span.end <= original_offset) {
      removed += a.token_span.length();
    } else if (a.token_span.begin < original_offset) {
      throw InternalError("offset points inside an annotation token");
    }
  }
  return original_offset - removed;
}

std::vector<ValidationIssue> validate_annotations(const GsmRecord& record,
                                                  const ExactValue& tolerance) {
  std::vector<ValidationIssue> issues;
  for (std::size_t i = 0; i < record.annotations.size(); ++i) {
    const Annotation& a = record.annotations[i];
    try {
      ExactValue got = eval_expr(*parse_expr(a.expr_text));
      ExactValue diff = (got - a.result).abs();
      if (diff > tolerance) {
        issues.push_back({i, "evaluates to " + canonical_string(got) + ", annotated " +
                                 canonical_string(a.result)});
      }
    } catch (const Error& e) {
      issues.push_back({i, e.what()});
    }
  }
  return issues;
}

}  // namespace abacus

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

#include "abacus/exact_value.hpp"

namespace abacus {

/// One calculator annotation "<<expr=result>>" inside a solution.
/// The expression stays as text: parsing it is the validator's and the
/// perturber's job, so a broken expression never blocks record ingestion.
struct Annotation {
  Span token_span;          // "<<...>>" including both delimiters
  Span expr_span;           // expression text inside the token
  Span result_span;         // result text inside the token
  std::string expr_text;
  std::string result_text;
  ExactValue result;        // parsed from result_text
};

/// A word problem with an annotated step-by-step solution. `solution` is the
/// raw answer text, final "#### N" line included; every span is an offset
/// into it.
struct GsmRecord {
  std::string id;
  std::string question;
  std::string solution;
  std::vector<Annotation> annotations;
  ExactValue final_answer;
  Span final_answer_span;   // the numeral after the last "####"
};

/// Parses annotations (left to right, non-nesting) and the final answer
/// (numeral after the last "####" marker).
/// Throws MalformedAnnotationError, MissingFinalAnswerError,
/// UnparsableFinalError.
GsmRecord parse_record(std::string id, std::string question, std::string answer);

/// `solution` with every annotation token deleted and nothing else touched.
/// Re-inserting the tokens at their recorded offsets (ascending) rebuilds the
/// original text byte for byte.
std::string strip_annotations(const std::string& solution,
                              const std::vector<Annotation>& annotations);

/// Offset into strip_annotations(...) output for an offset into `solution`
/// that does not point inside an annotation token.
std::size_t stripped_offset(const std::vector<Annotation>& annotations,
                            std::size_t original_offset);

struct ValidationIssue {
  std::size_t annotation_index = 0;
  std::string reason;
};

/// Re-evaluates every annotation. Expressions that fail to parse or divide
/// by zero become issues, never exceptions. `tolerance` admits |diff| <= tol
/// as a match; the default demands exact equality.
std::vector<ValidationIssue> validate_annotations(
    const GsmRecord& record, const ExactValue& tolerance = ExactValue(0));

}  // namespace abacus

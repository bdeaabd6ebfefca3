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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abacus/decode.hpp"
#include "abacus/exact_value.hpp"

namespace abacus {

/// How a worked solution announces its final answer.
enum class AnswerStyle { sentence, hash, choice };

/// Numeric value for sentence/hash styles, option letter 'a'..'e' for choice.
using FinalAnswer = std::variant<ExactValue, char>;

bool answers_equal(const FinalAnswer& a, const FinalAnswer& b,
                   const ExactValue& tolerance = ExactValue(0));

struct ExtractOptions {
  AnswerStyle style = AnswerStyle::sentence;
  /// Rescue extraction for generations that never produce the answer
  /// sentence: last numeral in the text (choice: last parenthesized option).
  bool fallback = true;
  /// Generations are cut at the first occurrence before any extraction, so
  /// a runaway completion cannot leak a fabricated later answer. Empty
  /// disables truncation.
  std::string truncate_at = "\n\nQuestion:";
};

/// sentence: numeral after the last "The answer is". hash: numeral after the
/// last "####". choice: first standalone a-e letter after the last
/// "The answer is". Returns nullopt when nothing is found.
std::optional<FinalAnswer> extract_final_answer(std::string_view generation,
                                                const ExtractOptions& options = {});

/// Most frequent present answer; ties break to the earliest sample index.
std::optional<FinalAnswer> majority_vote(
    const std::vector<std::optional<FinalAnswer>>& answers);

struct PromptExemplar {
  std::string question;  // choice-style exemplars embed their option list
  std::string solution;  // worked solution ending "The answer is X."
};

struct PromptSpec {
  std::vector<PromptExemplar> exemplars;
  std::size_t num_exemplars = 4;
  AnswerStyle answer_style = AnswerStyle::sentence;
};

/// "Question: {q}\nAnswer: {solution}\n\n" per exemplar, then the target
/// block "Question: {question}\nAnswer:". num_exemplars = 0 gives the
/// zero-shot prompt. Throws TooFewExemplarsError.
std::string build_fewshot_prompt(const PromptSpec& spec, std::string_view question);

struct EvalReport {
  std::string dataset;
  std::string mode;  // "greedy" or "sc"
  int num_questions = 0;
  std::vector<double> per_trial_accuracy;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation over trials; 0 for 1 trial
  std::optional<double> baseline;
  std::optional<double> delta_pct;
  bool extraction_fallback = true;  // recorded for auditability
};

struct ScoreOptions {
  std::string dataset_name = "dataset";
  ExtractOptions extract;
  ExactValue tolerance = ExactValue(0);       // gold comparison
  std::optional<double> baseline;             // fills delta_pct when present
};

/// generations[trial][question][sample]. Per trial the answer is the greedy
/// extraction (one sample) or the majority vote over num_samples; accuracy
/// is the fraction matching gold. Throws ShapeMismatchError when the nesting
/// does not conform to `params` and `golds`.
EvalReport score_dataset(
    const std::vector<std::vector<std::vector<std::string>>>& generations,
    const std::vector<FinalAnswer>& golds, const DecodeParams& params,
    const ScoreOptions& options = {});

/// (accuracy - baseline) / baseline * 100. Requires baseline > 0.
double delta_pct(double accuracy, double baseline);

/// Correct-answer filter for distillation: keep candidates whose extracted
/// answer equals gold, then drop whitespace-normalized duplicates, keeping
/// first occurrences. Idempotent.
std::vector<std::string> filter_distilled(const FinalAnswer& gold,
                                          const std::vector<std::string>& candidates,
                                          const ExtractOptions& options = {});

struct BaselineStats {
  std::vector<double> per_trial;
  double mean = 0.0;
  double sd = 0.0;
};

/// Simulated uniform random guessing over num_options, per question and
/// trial. Requires num_options >= 2.
BaselineStats random_choice_baseline(int num_options, int num_questions, int trials,
                                     std::uint64_t seed);

/// Mean and sample standard deviation (n-1); sd = 0 for fewer than 2 values.
void mean_and_sd(const std::vector<double>& values, double& mean, double& sd);

}  // namespace abacus

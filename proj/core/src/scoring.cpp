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

#include "abacus/scoring.hpp"

#include <cmath>
#include <unordered_set>
#include <utility>

#include "abacus/rng.hpp"

namespace abacus {

namespace {

constexpr std::string_view kAnswerSentence = "The answer is";
constexpr std::string_view kHashMarker = "####";

bool ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char to_lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

NumeralOptions extraction_numeral_options() {
  NumeralOptions o;
  o.allow_sign = true;
  o.allow_fraction = true;
  o.allow_currency = true;
  // '%' stays prose: a generation saying "60%" against the gold 60 counts.
  o.allow_percent = false;
  return o;
}

std::optional<FinalAnswer> numeral_after(std::string_view text, std::string_view marker) {
  std::size_t pos = text.rfind(marker);
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view tail = text.substr(pos + marker.size());
  try {
    if (auto m = match_leading_numeral(tail, extraction_numeral_options())) {
      return FinalAnswer(std::move(m->value));
    }
  } catch (const Error&) {
    // a degenerate token like "3/0"; treat as no answer
  }
  return std::nullopt;
}

bool standalone_at(std::string_view text, std::size_t i) {
  if (i > 0 && ascii_alnum(text[i - 1])) return false;
  if (i + 1 < text.size() && ascii_alnum(text[i + 1])) return false;
  return true;
}

std::optional<FinalAnswer> option_after(std::string_view text, std::string_view marker) {
  std::size_t pos = text.rfind(marker);
  if (pos == std::string_view::npos) return std::nullopt;
  for (std::size_t i = pos + marker.size(); i < text.size(); ++i) {
    char c = to_lower(text[i]);
    if (c >= 'a' && c <= 'e' && standalone_at(text, i)) return FinalAnswer(c);
  }
  return std::nullopt;
}

std::optional<FinalAnswer> last_numeral(std::string_view text) {
  std::vector<NumeralMatch> all = find_numerals(text);
  if (all.empty()) return std::nullopt;
  return FinalAnswer(std::move(all.back().value));
}

// Last parenthesized option "(x)"; generations that skip the answer
// sentence still usually name their pick this way.
std::optional<FinalAnswer> last_option(std::string_view text) {
  std::optional<FinalAnswer> found;
  for (std::size_t i = 0; i + 2 < text.size(); ++i) {
    char c = to_lower(text[i + 1]);
    if (text[i] == '(' && text[i + 2] == ')' && c >= 'a' && c <= 'e') {
      found = FinalAnswer(c);
    }
  }
  return found;
}

std::string normalize_whitespace(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // leading whitespace is dropped
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

bool answers_equal(const FinalAnswer& a, const FinalAnswer& b, const ExactValue& tolerance) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<char>(a)) {
    return std::get<char>(a) == std::get<char>(b);
  }
  return (std::get<ExactValue>(a) - std::get<ExactValue>(b)).abs() <= tolerance;
}

std::optional<FinalAnswer> extract_final_answer(std::string_view generation,
                                                const ExtractOptions& options) {
  if (!options.truncate_at.empty()) {
    std::size_t cut = generation.find(options.truncate_at);
    if (cut != std::string_view::npos) generation = generation.substr(0, cut);
  }
  std::optional<FinalAnswer> primary;
  switch (options.style) {
    case AnswerStyle::sentence:
      primary = numeral_after(generation, kAnswerSentence);
      break;
    case AnswerStyle::hash:
      primary = numeral_after(generation, kHashMarker);
      break;
    case AnswerStyle::choice:
      primary = option_after(generation, kAnswerSentence);
      break;
  }
  if (primary || !options.fallback) return primary;
  return options.style == AnswerStyle::choice ? last_option(generation)
                                              : last_numeral(generation);
}

std::optional<FinalAnswer> majority_vote(
    const std::vector<std::optional<FinalAnswer>>& answers) {
  struct Bucket {
    const FinalAnswer* value;
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::vector<Bucket> buckets;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (!answers[i]) continue;
    bool merged = false;
    for (Bucket& b : buckets) {
      if (answers_equal(*b.value, *answers[i])) {
        ++b.count;
        merged = true;
        break;
      }
    }
    if (!merged) buckets.push_back({&*answers[i], 1, i});
  }
  const Bucket* best = nullptr;
  for (const Bucket& b : buckets) {
    if (best == nullptr || b.count > best->count ||
        (b.count == best->count && b.first < best->first)) {
      best = &b;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best->value;
}

std::string build_fewshot_prompt(const PromptSpec& spec, std::string_view question) {
  if (spec.num_exemplars > spec.exemplars.size()) {
    throw TooFewExemplarsError("need " + std::to_string(spec.num_exemplars) + ", have " +
                               std::to_string(spec.exemplars.size()));
  }
  std::string out;
  for (std::size_t i = 0; i < spec.num_exemplars; ++i) {
    out += "Question: ";
    out += spec.exemplars[i].question;
    out += "\nAnswer: ";
    out += spec.exemplars[i].solution;
    out += "\n\n";
  }
  out += "Question: ";
  out += question;
  out += "\nAnswer:";
  return out;
}

EvalReport score_dataset(
    const std::vector<std::vector<std::vector<std::string>>>& generations,
    const std::vector<FinalAnswer>& golds, const DecodeParams& params,
    const ScoreOptions& options) {
  params.validate();
  if (golds.empty()) throw EmptyInputError("no questions to score");
  if (generations.size() != static_cast<std::size_t>(params.trials)) {
    throw ShapeMismatchError("got " + std::to_string(generations.size()) +
                             " trials, params say " + std::to_string(params.trials));
  }
  const std::size_t per_question = static_cast<std::size_t>(params.samples_per_question());

  EvalReport report;
  report.dataset = options.dataset_name;
  report.mode = std::string(mode_name(params.mode));
  report.num_questions = static_cast<int>(golds.size());
  report.extraction_fallback = options.extract.fallback;

  for (std::size_t t = 0; t < generations.size(); ++t) {
    const auto& trial = generations[t];
    if (trial.size() != golds.size()) {
      throw ShapeMismatchError("trial " + std::to_string(t) + " has " +
                               std::to_string(trial.size()) + " questions, golds have " +
                               std::to_string(golds.size()));
    }
    std::size_t correct = 0;
    for (std::size_t q = 0; q < trial.size(); ++q) {
      if (trial[q].size() != per_question) {
        throw ShapeMismatchError("trial " + std::to_string(t) + " question " +
                                 std::to_string(q) + " has " +
                                 std::to_string(trial[q].size()) + " samples, expected " +
                                 std::to_string(per_question));
      }
      std::optional<FinalAnswer> answer;
      if (params.mode == DecodeParams::Mode::greedy) {
        answer = extract_final_answer(trial[q][0], options.extract);
      } else {
        std::vector<std::optional<FinalAnswer>> votes;
        votes.reserve(trial[q].size());
        for (const std::string& g : trial[q]) {
          votes.push_back(extract_final_answer(g, options.extract));
        }
        answer = majority_vote(votes);
      }
      if (answer && answers_equal(*answer, golds[q], options.tolerance)) ++correct;
    }
    report.per_trial_accuracy.push_back(static_cast<double>(correct) /
                                        static_cast<double>(golds.size()));
  }

  mean_and_sd(report.per_trial_accuracy, report.mean, report.sd);
  if (options.baseline) {
    report.baseline = options.baseline;
    report.delta_pct = delta_pct(report.mean, *options.baseline);
  }
  return report;
}

double delta_pct(double accuracy, double baseline) {
  if (baseline <= 0) throw ConfigError("drop computation needs a positive baseline");
  return (accuracy - baseline) / baseline * 100.0;
}

std::vector<std::string> filter_distilled(const FinalAnswer& gold,
                                          const std::vector<std::string>& candidates,
                                          const ExtractOptions& options) {
  std::vector<std::string> kept;
  std::unordered_set<std::string> seen;
  for (const std::string& candidate : candidates) {
    std::optional<FinalAnswer> answer = extract_final_answer(candidate, options);
    if (!answer || !answers_equal(*answer, gold)) continue;
    if (seen.insert(normalize_whitespace(candidate)).second) kept.push_back(candidate);
  }
  return kept;
}

BaselineStats random_choice_baseline(int num_options, int num_questions, int trials,
                                     std::uint64_t seed) {
  if (num_options < 2) throw ConfigError("num_options must be >= 2");
  if (num_questions < 1) throw ConfigError("num_questions must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  Rng rng = derive_stream(seed, {"choice-baseline"});
  BaselineStats stats;
  stats.per_trial.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    int correct = 0;
    for (int q = 0; q < num_questions; ++q) {
      if (rng.uniform_below(static_cast<std::uint64_t>(num_options)) == 0) ++correct;
    }
    stats.per_trial.push_back(static_cast<double>(correct) /
                              static_cast<double>(num_questions));
  }
  mean_and_sd(stats.per_trial, stats.mean, stats.sd);
  return stats;
}

void mean_and_sd(const std::vector<double>& values, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (values.empty()) return;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace abacus

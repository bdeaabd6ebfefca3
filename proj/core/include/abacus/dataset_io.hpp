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
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "abacus/arith_gen.hpp"
#include "abacus/gsm_record.hpp"
#include "abacus/probes.hpp"
#include "abacus/scoring.hpp"

// Line-delimited UTF-8 file formats, LF endings throughout. Digests are
// taken over raw file bytes, so writers emit exactly the bytes a reader
// round-trips.

namespace abacus {

/// Reads a file into lines (trailing LF stripped, final unterminated line
/// kept). Throws IoError when the file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

/// Writes one LF-terminated line per entry, truncating any existing file.
void write_lines(const std::string& path, const std::vector<std::string>& lines);

/// Streams generated examples to a file as they are accepted. The bytes
/// written match the generator's digest stream, so the file's sha256 equals
/// the dataset manifest digest.
class JsonlFileSink : public ExampleSink {
 public:
  explicit JsonlFileSink(const std::string& path);
  void accept(const ArithmeticExample& ex) override;
  /// Flushes and fails loudly; the destructor cannot.
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

/// Solution-annotated records: objects with "question" and "answer" fields
/// plus an optional "id". Records without one are assigned their zero-based
/// line index, zero-padded to six digits.
std::vector<GsmRecord> read_gsm_records(const std::string& path);

/// Emits {"id", "question", "answer"} per record.
void write_gsm_records(const std::string& path, const std::vector<GsmRecord>& records);

/// Probe files: {"source_id", "annotation_index", "prompt", "expected",
/// "max_new_tokens"} with expected in canonical form.
void write_probes(const std::string& path, const std::vector<ArithProbe>& probes);
std::vector<ArithProbe> read_probes(const std::string& path);

enum class EvalFormat { gsm8k, qa, aqua };

/// Accepts "gsm8k", "qa", "aqua". Throws ConfigError otherwise.
EvalFormat eval_format_from_name(const std::string& name);

/// One question ready for prompting. For multiple-choice inputs the answer
/// options are already embedded in the question text.
struct EvalItem {
  std::string id;
  std::string question;
  FinalAnswer gold;
};

/// gsm8k: annotated records, gold from the "#### N" line.
/// qa: {"question", "answer"} with a bare final answer (numeral or choice
///     letter a-e).
/// aqua: {"question", "options", "correct"}; options are appended to the
///     question as "Answer Choices: (a) … (b) …" and gold is the lowercased
///     letter.
std::vector<EvalItem> load_eval_items(const std::string& path, EvalFormat format);

/// Candidate pools for distillation filtering:
/// {"id", "question", "gold", "candidates": [solution, …]}.
struct DistillItem {
  std::string id;
  std::string question;
  std::string gold_text;  // as read; written back verbatim
  ExactValue gold;
  std::vector<std::string> candidates;
};

std::vector<DistillItem> read_distill_items(const std::string& path);
void write_distill_items(const std::string& path, const std::vector<DistillItem>& items);

/// Few-shot exemplar files: "Question: …\nAnswer: …" blocks separated by
/// blank lines, the same layout the prompt assembly emits.
std::vector<PromptExemplar> load_exemplars(const std::string& path);

/// Evaluation reports as pretty-printed JSON objects.
void write_eval_report(const std::string& path, const EvalReport& report);
EvalReport read_eval_report(const std::string& path);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
};

/// Uniform sample of `n` lines (without replacement) to the validation
/// file; the rest to the train file. Both outputs preserve input order, so
/// train ∪ validation = input and the split is byte-reproducible from the
/// seed. Throws NTooLargeError when n exceeds the input size.
SplitCounts split_lines(const std::string& input_path, const std::string& train_path,
                        const std::string& validation_path, std::size_t n, std::uint64_t seed);

}  // namespace abacus

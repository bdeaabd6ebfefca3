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

#include "abacus/dataset_io.hpp"

#include <cctype>
#include <cstdio>
#include <utility>

#include <json.hpp>

#include "abacus/errors.hpp"
#include "abacus/rng.hpp"

namespace abacus {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string index_id(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

ordered_json parse_object_line(const std::string& line, const std::string& path,
                               std::size_t line_no) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataFormatError(path + ":" + std::to_string(line_no) + ": not a JSON object");
  return j;
}

std::string require_string(const ordered_json& j, const char* field, const std::string& path,
                           std::size_t line_no) {
  if (!j.contains(field) || !j[field].is_string())
    throw DataFormatError(path + ":" + std::to_string(line_no) + ": missing string field \"" +
                          field + "\"");
  return j[field].get<std::string>();
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& line : lines) out << line << '\n';
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

JsonlFileSink::JsonlFileSink(const std::string& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot write " + path_);
}

void JsonlFileSink::accept(const ArithmeticExample& ex) {
  out_ << corpus_line(ex);
  if (!out_) throw SinkFailureError("write failed on " + path_);
}

void JsonlFileSink::close() {
  out_.flush();
  if (!out_) throw SinkFailureError("flush failed on " + path_);
  out_.close();
}

std::vector<GsmRecord> read_gsm_records(const std::string& path) {
  auto lines = read_lines(path);
  std::vector<GsmRecord> records;
  records.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    ordered_json j = parse_object_line(lines[i], path, i + 1);
    std::string id =
        (j.contains("id") && j["id"].is_string()) ? j["id"].get<std::string>() : index_id(i);
    records.push_back(parse_record(id, require_string(j, "question", path, i + 1),
                                   require_string(j, "answer", path, i + 1)));
  }
  return records;
}

void write_gsm_records(const std::string& path, const std::vector<GsmRecord>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& record : records) {
    ordered_json j;
    j["id"] = record.id;
    j["question"] = record.question;
    j["answer"] = record.solution;
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

void write_probes(const std::string& path, const std::vector<ArithProbe>& probes) {
  std::vector<std::string> lines;
  lines.reserve(probes.size());
  for (const auto& probe : probes) {
    ordered_json j;
    j["source_id"] = probe.source_id;
    j["annotation_index"] = probe.annotation_index;
    j["prompt"] = probe.prompt;
    j["expected"] = canonical_string(probe.expected);
    j["max_new_tokens"] = probe.max_new_tokens;
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

std::vector<ArithProbe> read_probes(const std::string& path) {
  auto lines = read_lines(path);
  std::vector<ArithProbe> probes;
  probes.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    ordered_json j = parse_object_line(lines[i], path, i + 1);
    ArithProbe probe;
    probe.source_id = require_string(j, "source_id", path, i + 1);
    if (!j.contains("annotation_index") || !j["annotation_index"].is_number_unsigned())
      throw DataFormatError(path + ":" + std::to_string(i + 1) + ": bad annotation_index");
    probe.annotation_index = j["annotation_index"].get<std::size_t>();
    probe.prompt = require_string(j, "prompt", path, i + 1);
    probe.expected = parse_numeral(require_string(j, "expected", path, i + 1));
    probe.max_new_tokens = j.value("max_new_tokens", 5);
    probes.push_back(std::move(probe));
  }
  return probes;
}

EvalFormat eval_format_from_name(const std::string& name) {
  if (name == "gsm8k") return EvalFormat::gsm8k;
  if (name == "qa") return EvalFormat::qa;
  if (name == "aqua") return EvalFormat::aqua;
  throw ConfigError("unknown eval format: " + name + " (expected gsm8k, qa, or aqua)");
}

namespace {

FinalAnswer parse_gold(const std::string& text, const std::string& path, std::size_t line_no) {
  std::string t = trimmed(text);
  if (t.size() == 1) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(t[0])));
    if (c >= 'a' && c <= 'e') return FinalAnswer(c);
  }
  try {
    return FinalAnswer(parse_numeral(t));
  } catch (const Error& e) {
    throw DataFormatError(path + ":" + std::to_string(line_no) + ": unusable answer \"" + text +
                          "\": " + e.what());
  }
}

// "A)21" / "b) 21" → "21"; anything else is kept whole.
std::string option_body(const std::string& option) {
  if (option.size() >= 2 && std::isalpha(static_cast<unsigned char>(option[0])) &&
      option[1] == ')') {
    std::size_t b = 2;
    while (b < option.size() && option[b] == ' ') ++b;
    return option.substr(b);
  }
  return option;
}

}  // namespace

std::vector<EvalItem> load_eval_items(const std::string& path, EvalFormat format) {
  std::vector<EvalItem> items;
  if (format == EvalFormat::gsm8k) {
    for (auto& record : read_gsm_records(path))
      items.push_back({record.id, record.question, FinalAnswer(record.final_answer)});
    return items;
  }
  auto lines = read_lines(path);
  items.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    ordered_json j = parse_object_line(lines[i], path, i + 1);
    EvalItem item;
    item.id =
        (j.contains("id") && j["id"].is_string()) ? j["id"].get<std::string>() : index_id(i);
    item.question = require_string(j, "question", path, i + 1);
    if (format == EvalFormat::qa) {
      item.gold = parse_gold(require_string(j, "answer", path, i + 1), path, i + 1);
    } else {
      if (!j.contains("options") || !j["options"].is_array() || j["options"].empty())
        throw DataFormatError(path + ":" + std::to_string(i + 1) + ": missing options array");
      std::string choices = "\nAnswer Choices:";
      char letter = 'a';
      for (const auto& opt : j["options"]) {
        if (!opt.is_string())
          throw DataFormatError(path + ":" + std::to_string(i + 1) + ": non-string option");
        choices += " (";
        choices += letter;
        choices += ") ";
        choices += option_body(opt.get<std::string>());
        ++letter;
      }
      item.question += choices;
      std::string correct = trimmed(require_string(j, "correct", path, i + 1));
      if (correct.size() != 1)
        throw DataFormatError(path + ":" + std::to_string(i + 1) + ": bad correct letter");
      char gold = static_cast<char>(std::tolower(static_cast<unsigned char>(correct[0])));
      if (gold < 'a' || gold >= letter)
        throw DataFormatError(path + ":" + std::to_string(i + 1) + ": correct letter \"" +
                              correct + "\" outside the option range");
      item.gold = FinalAnswer(gold);
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<DistillItem> read_distill_items(const std::string& path) {
  auto lines = read_lines(path);
  std::vector<DistillItem> items;
  items.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    ordered_json j = parse_object_line(lines[i], path, i + 1);
    DistillItem item;
    item.id =
        (j.contains("id") && j["id"].is_string()) ? j["id"].get<std::string>() : index_id(i);
    item.question = require_string(j, "question", path, i + 1);
    item.gold_text = require_string(j, "gold", path, i + 1);
    try {
      item.gold = parse_numeral(item.gold_text);
    } catch (const Error& e) {
      throw DataFormatError(path + ":" + std::to_string(i + 1) + ": unusable gold \"" +
                            item.gold_text + "\": " + e.what());
    }
    if (!j.contains("candidates") || !j["candidates"].is_array())
      throw DataFormatError(path + ":" + std::to_string(i + 1) + ": missing candidates array");
    for (const auto& c : j["candidates"]) {
      if (!c.is_string())
        throw DataFormatError(path + ":" + std::to_string(i + 1) + ": non-string candidate");
      item.candidates.push_back(c.get<std::string>());
    }
    items.push_back(std::move(item));
  }
  return items;
}

void write_distill_items(const std::string& path, const std::vector<DistillItem>& items) {
  std::vector<std::string> lines;
  lines.reserve(items.size());
  for (const auto& item : items) {
    ordered_json j;
    j["id"] = item.id;
    j["question"] = item.question;
    j["gold"] = item.gold_text;
    j["candidates"] = item.candidates;
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

std::vector<PromptExemplar> load_exemplars(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  const std::string q_tag = "Question:";
  const std::string a_tag = "\nAnswer:";
  if (text.compare(0, q_tag.size(), q_tag) != 0)
    throw DataFormatError(path + ": exemplar file must start with \"Question:\"");
  std::vector<PromptExemplar> exemplars;
  std::size_t pos = 0;
  while (pos != std::string::npos && pos < text.size()) {
    std::size_t next = text.find("\n\n" + q_tag, pos);
    std::string block =
        next == std::string::npos ? text.substr(pos) : text.substr(pos, next - pos);
    std::size_t answer_at = block.find(a_tag);
    if (answer_at == std::string::npos)
      throw DataFormatError(path + ": exemplar block has no \"Answer:\" line");
    std::string question = block.substr(q_tag.size(), answer_at - q_tag.size());
    std::string solution = block.substr(answer_at + a_tag.size());
    if (!question.empty() && question.front() == ' ') question.erase(0, 1);
    if (!solution.empty() && solution.front() == ' ') solution.erase(0, 1);
    exemplars.push_back({std::move(question), std::move(solution)});
    pos = next == std::string::npos ? std::string::npos : next + 2;
  }
  if (exemplars.empty()) throw DataFormatError(path + ": no exemplars found");
  return exemplars;
}

void write_eval_report(const std::string& path, const EvalReport& report) {
  ordered_json j;
  j["dataset"] = report.dataset;
  j["mode"] = report.mode;
  j["num_questions"] = report.num_questions;
  j["per_trial_accuracy"] = report.per_trial_accuracy;
  j["mean"] = report.mean;
  j["sd"] = report.sd;
  if (report.baseline)
    j["baseline"] = *report.baseline;
  else
    j["baseline"] = nullptr;
  if (report.delta_pct)
    j["delta_pct"] = *report.delta_pct;
  else
    j["delta_pct"] = nullptr;
  j["extraction_fallback"] = report.extraction_fallback;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

EvalReport read_eval_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataFormatError(path + ": not a JSON object");
  EvalReport report;
  report.dataset = j.value("dataset", std::string{});
  report.mode = j.value("mode", std::string{});
  report.num_questions = j.value("num_questions", 0);
  if (j.contains("per_trial_accuracy") && j["per_trial_accuracy"].is_array())
    for (const auto& v : j["per_trial_accuracy"]) report.per_trial_accuracy.push_back(v.get<double>());
  report.mean = j.value("mean", 0.0);
  report.sd = j.value("sd", 0.0);
  if (j.contains("baseline") && j["baseline"].is_number())
    report.baseline = j["baseline"].get<double>();
  if (j.contains("delta_pct") && j["delta_pct"].is_number())
    report.delta_pct = j["delta_pct"].get<double>();
  report.extraction_fallback = j.value("extraction_fallback", true);
  return report;
}

SplitCounts split_lines(const std::string& input_path, const std::string& train_path,
                        const std::string& validation_path, std::size_t n, std::uint64_t seed) {
  auto lines = read_lines(input_path);
  if (n > lines.size())
    throw NTooLargeError("requested " + std::to_string(n) + " validation records from " +
                         std::to_string(lines.size()));
  // Partial Fisher-Yates: the first n slots are the validation sample.
  std::vector<std::size_t> order(lines.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = derive_stream(seed, {"split"});
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(
                            rng.uniform_below(static_cast<std::uint64_t>(order.size() - i)));
    std::swap(order[i], order[j]);
  }
  std::vector<bool> in_validation(lines.size(), false);
  for (std::size_t i = 0; i < n; ++i) in_validation[order[i]] = true;
  std::vector<std::string> train, validation;
  train.reserve(lines.size() - n);
  validation.reserve(n);
  for (std::size_t i = 0; i < lines.size(); ++i)
    (in_validation[i] ? validation : train).push_back(lines[i]);
  write_lines(train_path, train);
  write_lines(validation_path, validation);
  return {train.size(), validation.size()};
}

}  // namespace abacus

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

// Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.
// Exits nonzero when any criterion fails. Some criteria drive the installed
// CLI binary (path injected as ABACUS_CLI_PATH); the mock endpoint serves
// the inference-dependent ones.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "abacus/arith_gen.hpp"
#include "abacus/client.hpp"
#include "abacus/dataset_io.hpp"
#include "abacus/digest.hpp"
#include "abacus/errors.hpp"
#include "abacus/expr.hpp"
#include "abacus/gsm_record.hpp"
#include "abacus/perturb.hpp"
#include "abacus/probes.hpp"
#include "abacus/rng.hpp"
#include "abacus/scoring.hpp"
#include "expr_gen.hpp"
#include "gmp_oracle.hpp"
#include "mock_server.hpp"
#include "synth_gsm.hpp"

using namespace abacus;

namespace {

#ifndef ABACUS_CLI_PATH
#error "ABACUS_CLI_PATH must point at the CLI binary"
#endif

struct Failure {
  std::string detail;
};

void require(bool cond, const std::string& detail) {
  if (!cond) throw Failure{detail};
}

std::filesystem::path work_dir() {
  static std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "abacus-acceptance";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string work_file(const std::string& name) {
  return (work_dir() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  static int log_index = 0;
  std::string log = work_file("cli-" + std::to_string(log_index++) + ".log");
  std::string cmd = std::string(ABACUS_CLI_PATH) + " " + args + " >" + log + " 2>&1";
  int status = std::system(cmd.c_str());
  if (output) *output = slurp(log);
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

const char kSausageQuestion[] =
    "Dylan needed chicken sausages and fish sausages to make sausage buns at "
    "a party. He bought 38 chicken sausages and 6 more fish sausages than "
    "chicken sausages. How many sausages did Dylan buy in all?";
const char kSausageSolution[] =
    "He bought 38 + 6 = <<38+6=44>>44 fish sausages. Dylan bought 38 + 44 = "
    "<<38+44=82>>82 sausages in all. #### 82";

// ---------------------------------------------------------------------------
// 1. Full default corpus: exact count, global uniqueness, oracle agreement on
//    a 100,000-example uniform sample, five-minute budget.
std::string criterion_corpus_scale() {
  std::string out = work_file("corpus.jsonl");
  auto started = std::chrono::steady_clock::now();
  int rc = run_cli("gen-arith --out " + out + " --seed 17");
  double gen_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  require(rc == 0, "gen-arith exited " + std::to_string(rc));
  require(gen_seconds <= 300.0,
          "generation took " + std::to_string(gen_seconds) + "s (budget 300s)");

  const std::uint64_t kExpected = 1'290'175;
  std::uint64_t sampled_checked = 0;

  // One pass: count lines, check input uniqueness, oracle-check the sampled
  // subset. Sample indices are drawn without replacement up front.
  std::vector<std::uint32_t> indices(kExpected);
  for (std::uint32_t i = 0; i < kExpected; ++i) indices[i] = i;
  Rng rng = derive_stream(2026, {"acceptance", "corpus-sample"});
  const std::size_t kSample = 100'000;
  for (std::size_t i = 0; i < kSample; ++i) {
    std::size_t j = i + rng.uniform_below(indices.size() - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(kSample);
  std::sort(indices.begin(), indices.end());

  std::ifstream in(out, std::ios::binary);
  require(in.good(), "cannot reopen " + out);
  std::unordered_set<std::string> inputs;
  inputs.reserve(kExpected * 2);
  std::string line;
  std::uint64_t line_no = 0;
  std::size_t next_sample = 0;
  while (std::getline(in, line)) {
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    require(!obj.is_discarded(), "line " + std::to_string(line_no) + " is not JSON");
    std::string input = obj.at("input").get<std::string>();
    require(inputs.insert(input).second,
            "duplicate input at line " + std::to_string(line_no) + ": " + input);
    if (next_sample < indices.size() && indices[next_sample] == line_no) {
      ++next_sample;
      auto check = oracle::check_corpus_example(obj.at("category").get<std::string>(),
                                                input, obj.at("target").get<std::string>());
      require(check.ok, "oracle mismatch at line " + std::to_string(line_no) + ": " +
                            check.detail + " [" + input + "]");
      ++sampled_checked;
    }
    ++line_no;
  }
  require(line_no == kExpected, "expected " + std::to_string(kExpected) +
                                    " examples, found " + std::to_string(line_no));
  require(sampled_checked == kSample,
          "sampled " + std::to_string(sampled_checked) + " of " + std::to_string(kSample));

  std::filesystem::remove(out);  // ~120 MB; no later criterion needs it
  std::ostringstream detail;
  detail << kExpected << " unique examples, " << kSample
         << "-example oracle sample clean, generated in " << std::fixed
         << std::setprecision(1) << gen_seconds << "s";
  return detail.str();
}

// ---------------------------------------------------------------------------
// 2. Operand magnitudes: digit-count bins 1..7 each hold 1/7 +- 0.015 of 10^6
//    draws.
std::string criterion_log_uniform() {
  Rng rng = derive_stream(2026, {"acceptance", "operands"});
  const int kDraws = 1'000'000;
  std::array<std::int64_t, 8> bins{};
  for (int i = 0; i < kDraws; ++i) {
    int d = digit_count(sample_operand(rng, 7));
    require(d >= 1 && d <= 7, "operand with " + std::to_string(d) + " digits");
    ++bins[d];
  }
  std::ostringstream detail;
  detail << "bin frequencies";
  for (int d = 1; d <= 7; ++d) {
    double freq = static_cast<double>(bins[d]) / kDraws;
    require(std::abs(freq - 1.0 / 7) <= 0.015,
            "digit bin " + std::to_string(d) + " frequency " + std::to_string(freq));
    detail << " " << std::fixed << std::setprecision(4) << freq;
  }
  return detail.str();
}

// ---------------------------------------------------------------------------
// 3. Probe protocol on the canonical two-step record, exact and tolerance 0.
std::string criterion_probe_protocol() {
  GsmRecord r = parse_record("sausages", kSausageQuestion, kSausageSolution);
  require(r.annotations.size() == 2, "expected 2 annotations");
  require(r.final_answer == ExactValue(82), "final answer != 82");

  auto probes = build_probes(r);
  require(probes.size() == 2, "expected 2 probes, got " + std::to_string(probes.size()));
  require(probes[0].expected == ExactValue(44), "probe 0 expected != 44");
  require(probes[1].expected == ExactValue(82), "probe 1 expected != 82");
  for (const ArithProbe& p : probes)
    require(p.prompt.find("<<") == std::string::npos, "prompt leaks an annotation");

  std::vector<ProbeResult> results;
  results.push_back(score_probe(probes[0], "44 fish sausages. Dylan"));
  results.push_back(score_probe(probes[1], "82"));
  require(arithmetic_accuracy(results) == 1.0, "scripted generations scored < 1.0");
  return "2 probes, expected 44/82, scripted accuracy 1.0";
}

// ---------------------------------------------------------------------------
// 4. Perturbation soundness over 100 annotated records within one minute.
std::string criterion_perturbation() {
  auto started = std::chrono::steady_clock::now();
  auto raws = synth::make_synthetic_records(100, 41);
  std::size_t variant_total = 0;
  for (const synth::RawGsm& raw : raws) {
    GsmRecord rec = parse_record(raw.id, raw.question, raw.answer);
    ComputationGraph graph = build_graph(rec);

    Assignment identity;
    for (const InputSlot& slot : graph.inputs) identity.push_back(slot.value);
    GsmRecord echo = substitute(graph, rec, identity);
    require(echo.question == rec.question && echo.solution == rec.solution,
            "identity substitution altered " + rec.id);

    PerturbPolicy policy;
    policy.seed = 2026;
    VariantSet set = gen_variants(rec, policy);
    require(set.records.size() == 50,
            rec.id + " produced " + std::to_string(set.records.size()) + "/50 variants");
    std::set<std::string> questions;
    for (const GsmRecord& v : set.records) {
      questions.insert(v.question);
      auto issues = validate_annotations(v);
      if (!issues.empty()) {
        throw Failure{v.id + " failed validation: " + issues[0].reason};
      }
    }
    require(questions.size() == 50, rec.id + " variants are not distinct");
    variant_total += set.records.size();
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  require(seconds <= 60.0, "took " + std::to_string(seconds) + "s (budget 60s)");
  std::ostringstream detail;
  detail << raws.size() << " records, " << variant_total << " validated variants in "
         << std::fixed << std::setprecision(1) << seconds << "s";
  return detail.str();
}

// ---------------------------------------------------------------------------
// 5. Self-consistency semantics against a scripted endpoint.
std::string criterion_self_consistency() {
  struct Scripted {
    std::string marker;
    FinalAnswer gold;
    std::vector<std::string> samples;  // exactly 8
  };
  std::vector<Scripted> questions = {
      // Clear majority, correct: 5 x 10 vs 3 x 99.
      {"ACCEPT-Q0", FinalAnswer(ExactValue(10)),
       {"The answer is 10.", "The answer is 99.", "The answer is 10.",
        "The answer is 10.", "The answer is 99.", "The answer is 10.",
        "The answer is 99.", "The answer is 10."}},
      // 4-4 tie; the earliest sample's answer (20) must win the vote.
      {"ACCEPT-Q1", FinalAnswer(ExactValue(20)),
       {"The answer is 20.", "The answer is 77.", "The answer is 77.",
        "The answer is 20.", "The answer is 77.", "The answer is 20.",
        "The answer is 77.", "The answer is 20."}},
      // Unanimous but wrong.
      {"ACCEPT-Q2", FinalAnswer(ExactValue(30)),
       {"The answer is 31.", "The answer is 31.", "The answer is 31.",
        "The answer is 31.", "The answer is 31.", "The answer is 31.",
        "The answer is 31.", "The answer is 31."}},
      // Extraction failures plus a 3-2 majority for the right answer.
      {"ACCEPT-Q3", FinalAnswer(ExactValue(40)),
       {"no idea", "hmm", "The answer is 40.", "The answer is 12.",
        "The answer is 40.", "I cannot say", "The answer is 40.",
        "The answer is 12."}},
  };
  // Hand computation: Q0 correct, Q1 correct (tie to earliest), Q2 wrong,
  // Q3 correct -> accuracy 3/4.
  const double kExpectedAccuracy = 0.75;

  // An unknown prompt or wrong n returns an empty choice list; the client
  // rejects that as a protocol error, which fails this criterion loudly.
  // (Throwing here would unwind the server thread instead.)
  mock::MockServer server([&questions](const std::string& prompt, int n) {
    for (const Scripted& q : questions)
      if (prompt.find(q.marker) != std::string::npos &&
          n == static_cast<int>(q.samples.size()))
        return q.samples;
    return std::vector<std::string>{};
  });

  EndpointConfig config;
  config.base_url = server.base_url();
  config.backoff_base_seconds = 0.01;
  InferenceClient client(config, nullptr);

  DecodeParams params;  // sampling defaults: T=0.6, p=0.9, n=8
  params.trials = 1;
  std::vector<InferenceRequest> requests;
  for (const Scripted& q : questions) {
    InferenceRequest req;
    req.model = "mock";
    req.prompt = "Question: " + q.marker + "\nAnswer:";
    req.params = params;
    requests.push_back(req);
  }
  auto records = client.run_batch(requests, 4);

  std::vector<std::vector<std::vector<std::string>>> generations(1);
  std::vector<FinalAnswer> golds;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    generations[0].push_back(records[i].generations);
    golds.push_back(questions[i].gold);
  }
  EvalReport report = score_dataset(generations, golds, params);
  require(report.per_trial_accuracy.size() == 1, "expected one trial");
  require(report.per_trial_accuracy[0] == kExpectedAccuracy,
          "SC accuracy " + std::to_string(report.per_trial_accuracy[0]) +
              " != hand-computed 0.75");

  // vote([82, 82, 44]) = 82.
  std::vector<std::optional<FinalAnswer>> votes = {
      FinalAnswer(ExactValue(82)), FinalAnswer(ExactValue(82)),
      FinalAnswer(ExactValue(44))};
  auto winner = majority_vote(votes);
  require(winner.has_value() && answers_equal(*winner, FinalAnswer(ExactValue(82))),
          "vote([82,82,44]) != 82");

  // n=1 sampling scores exactly like greedy on identical generations.
  std::vector<std::vector<std::vector<std::string>>> single = {
      {{"The answer is 7."}, {"The answer is 8."}}};
  std::vector<FinalAnswer> single_golds = {FinalAnswer(ExactValue(7)),
                                           FinalAnswer(ExactValue(9))};
  DecodeParams n1;
  n1.num_samples = 1;
  n1.trials = 1;
  DecodeParams greedy;
  greedy.mode = DecodeParams::Mode::greedy;
  greedy.num_samples = 1;
  greedy.trials = 1;
  EvalReport sc1 = score_dataset(single, single_golds, n1);
  EvalReport gr = score_dataset(single, single_golds, greedy);
  require(sc1.per_trial_accuracy == gr.per_trial_accuracy,
          "n=1 sampling and greedy disagree");

  return "SC accuracy 0.75 as hand-computed; tie vote and n=1/greedy equivalence hold";
}

// ---------------------------------------------------------------------------
// 6. Random five-option baseline lands near one fifth.
std::string criterion_random_baseline() {
  BaselineStats stats = random_choice_baseline(5, 254, 100, 2026);
  require(stats.mean >= 0.17 && stats.mean <= 0.23,
          "mean " + std::to_string(stats.mean) + " outside [0.17, 0.23]");
  require(stats.sd >= 0.015 && stats.sd <= 0.04,
          "sd " + std::to_string(stats.sd) + " outside [0.015, 0.04]");
  std::ostringstream detail;
  detail << "mean " << std::fixed << std::setprecision(4) << stats.mean << ", sd "
         << std::setprecision(4) << stats.sd;
  return detail.str();
}

// ---------------------------------------------------------------------------
// 7. Relative drop metric to one decimal place.
std::string criterion_drop_metric() {
  auto one_decimal = [](double v) { return std::round(v * 10.0) / 10.0; };
  double a = one_decimal(delta_pct(8.5, 15.3));
  require(a == -44.4, "delta(8.5, 15.3) rounded to " + std::to_string(a));
  double b = one_decimal(delta_pct(16.3, 22.0));
  require(b == -25.9, "delta(16.3, 22.0) rounded to " + std::to_string(b));
  return "delta(8.5,15.3) = -44.4%, delta(16.3,22.0) = -25.9%";
}

// ---------------------------------------------------------------------------
// 8. Distillation filter semantics plus the documented 7,473 -> 6,961/512
//    split.
std::string criterion_distill_and_split() {
  FinalAnswer gold{ExactValue(6)};
  std::vector<std::string> candidates = {
      "21 - 15 = 6. The answer is 6.",
      "The answer is 7.",
      "21 - 15 = 6. The answer is 6.",   // exact duplicate
      "15 + 6 = 21, so 6. The answer is 6.",
      "word salad with no final answer",
  };
  auto kept = filter_distilled(gold, candidates);
  require(kept.size() == 2, "kept " + std::to_string(kept.size()) + " of 2");
  require(kept[0] == candidates[0] && kept[1] == candidates[3],
          "wrong candidates survived");
  require(filter_distilled(gold, kept) == kept, "filter is not idempotent");

  std::vector<std::string> lines;
  lines.reserve(7473);
  for (int i = 0; i < 7473; ++i)
    lines.push_back(R"({"question": "q)" + std::to_string(i) + R"(", "answer": "#### 1"})");
  std::string in = work_file("split-in.jsonl");
  write_lines(in, lines);
  std::string train = work_file("split-train.jsonl");
  std::string validation = work_file("split-val.jsonl");
  int rc = run_cli("split --in " + in + " --train-out " + train + " --validation-out " +
                   validation + " --n 512 --seed 13");
  require(rc == 0, "split exited " + std::to_string(rc));

  auto train_lines = read_lines(train);
  auto val_lines = read_lines(validation);
  require(train_lines.size() == 6961,
          "train has " + std::to_string(train_lines.size()) + " records");
  require(val_lines.size() == 512,
          "validation has " + std::to_string(val_lines.size()) + " records");
  std::set<std::string> all(train_lines.begin(), train_lines.end());
  all.insert(val_lines.begin(), val_lines.end());
  require(all.size() == 7473, "split is not a disjoint partition");
  return "filter kept 2 unique correct solutions; split 7,473 -> 6,961 + 512";
}

// ---------------------------------------------------------------------------
// 9. Determinism: manifest-driven re-runs reproduce digests; batch output is
//    independent of parallelism.
std::string criterion_determinism() {
  // gen-arith re-run from its own manifest.
  std::string out1 = work_file("det-1.jsonl");
  int rc = run_cli("gen-arith --out " + out1 + " --count 20000 --seed 123");
  require(rc == 0, "gen-arith exited " + std::to_string(rc));
  nlohmann::json manifest = nlohmann::json::parse(slurp(out1 + ".manifest.json"));
  require(manifest.at("outputs").at(0).at("sha256").get<std::string>() ==
              sha256_file_hex(out1),
          "manifest digest does not match the file it describes");

  std::uint64_t seed = manifest.at("config").at("seed").get<std::uint64_t>();
  std::uint64_t count = manifest.at("config").at("count").get<std::uint64_t>();
  std::string out2 = work_file("det-2.jsonl");
  rc = run_cli("gen-arith --out " + out2 + " --count " + std::to_string(count) +
               " --seed " + std::to_string(seed));
  require(rc == 0, "gen-arith re-run exited " + std::to_string(rc));
  require(sha256_file_hex(out1) == sha256_file_hex(out2),
          "gen-arith re-run from manifest config changed the output digest");

  // split re-run.
  std::string train1 = work_file("det-train1.jsonl");
  std::string val1 = work_file("det-val1.jsonl");
  std::string train2 = work_file("det-train2.jsonl");
  std::string val2 = work_file("det-val2.jsonl");
  require(run_cli("split --in " + out1 + " --train-out " + train1 +
                  " --validation-out " + val1 + " --n 512 --seed 7") == 0,
          "split run 1 failed");
  require(run_cli("split --in " + out1 + " --train-out " + train2 +
                  " --validation-out " + val2 + " --n 512 --seed 7") == 0,
          "split run 2 failed");
  require(sha256_file_hex(train1) == sha256_file_hex(train2) &&
              sha256_file_hex(val1) == sha256_file_hex(val2),
          "split re-run changed digests");

  // perturb re-run.
  auto raws = synth::make_synthetic_records(20, 3);
  std::vector<GsmRecord> records;
  for (const auto& raw : raws)
    records.push_back(parse_record(raw.id, raw.question, raw.answer));
  std::string gsm_in = work_file("det-gsm.jsonl");
  write_gsm_records(gsm_in, records);
  std::string pert1 = work_file("det-pert1.jsonl");
  std::string pert2 = work_file("det-pert2.jsonl");
  require(run_cli("perturb --in " + gsm_in + " --out " + pert1 +
                  " --variants 10 --seed 9") == 0, "perturb run 1 failed");
  require(run_cli("perturb --in " + gsm_in + " --out " + pert2 +
                  " --variants 10 --seed 9") == 0, "perturb run 2 failed");
  require(sha256_file_hex(pert1) == sha256_file_hex(pert2),
          "perturb re-run changed digests");

  // probes re-run.
  std::string probes1 = work_file("det-probes1.jsonl");
  std::string probes2 = work_file("det-probes2.jsonl");
  require(run_cli("probes --in " + gsm_in + " --out " + probes1) == 0,
          "probes run 1 failed");
  require(run_cli("probes --in " + gsm_in + " --out " + probes2) == 0,
          "probes run 2 failed");
  require(sha256_file_hex(probes1) == sha256_file_hex(probes2),
          "probes re-run changed digests");

  // Library-level batch parallelism: jobs=1 vs jobs=8 byte-identical.
  mock::MockServer server([](const std::string& prompt, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i)
      out.push_back("The answer is " +
                    std::to_string((prompt.size() * 31 + i * 7) % 97) + ".");
    return out;
  });
  EndpointConfig config;
  config.base_url = server.base_url();
  config.backoff_base_seconds = 0.01;
  InferenceClient client(config, nullptr);
  std::vector<InferenceRequest> requests;
  for (int i = 0; i < 30; ++i) {
    InferenceRequest req;
    req.model = "mock";
    req.prompt = "determinism probe " + std::string(i, 'x');
    req.params.trials = 1;
    req.trial = 0;
    requests.push_back(req);
  }
  auto serial = client.run_batch(requests, 1);
  auto parallel = client.run_batch(requests, 8);
  Sha256 h1, h2;
  for (const auto& r : serial)
    for (const auto& g : r.generations) h1.update(g + "\x1f");
  for (const auto& r : parallel)
    for (const auto& g : r.generations) h2.update(g + "\x1f");
  require(h1.hex_digest() == h2.hex_digest(),
          "run_batch output depends on parallelism");

  // CLI eval against the mock endpoint: --jobs 1 vs --jobs 8 reports match.
  std::string qa = work_file("det-eval.jsonl");
  std::vector<std::string> qa_lines;
  for (int i = 0; i < 6; ++i)
    qa_lines.push_back(R"({"question": "EVALQ)" + std::to_string(i) +
                       R"( how many?", "answer": ")" + std::to_string(i) + R"("})");
  write_lines(qa, qa_lines);
  setenv("INFER_BASE_URL", server.base_url().c_str(), 1);
  std::string report1 = work_file("det-report1.json");
  std::string report2 = work_file("det-report2.json");
  std::string prompts = std::string(ABACUS_ASSETS_DIR) + "/prompts/mwp_4shot.txt";
  std::string common = "eval --in " + qa + " --format qa --prompt-file " + prompts +
                       " --trials 2 --dataset-name det ";
  require(run_cli(common + "--out " + report1 + " --jobs 1") == 0, "eval --jobs 1 failed");
  require(run_cli(common + "--out " + report2 + " --jobs 8") == 0, "eval --jobs 8 failed");
  unsetenv("INFER_BASE_URL");
  require(sha256_file_hex(report1) == sha256_file_hex(report2),
          "eval reports differ across --jobs");

  return "gen-arith/split/perturb/probes re-runs and jobs=1 vs jobs=8 all byte-identical";
}

// ---------------------------------------------------------------------------
// 10. Expression parser vs brute-force oracle; strip/re-insert byte round
//     trips.
std::string criterion_parser_oracle() {
  Rng rng = derive_stream(2026, {"acceptance", "expr"});
  int evaluated = 0;
  for (int i = 0; i < 10'000; ++i) {
    std::string text = exprgen::random_expr(rng);
    oracle::EvalOutcome expect = oracle::ExprOracle::eval(text);
    require(expect.parse_ok || expect.division_by_zero,
            "oracle rejected generated text: " + text);
    ExprPtr ast = parse_expr(text);
    if (expect.division_by_zero) {
      bool threw = false;
      try {
        eval_expr(*ast);
      } catch (const DivisionByZeroError&) {
        threw = true;
      }
      require(threw, "missed a zero division in: " + text);
      continue;
    }
    ExactValue got = eval_expr(*ast);
    auto got_rat = oracle::Rat::from_fraction(got.fraction_string());
    require(got_rat.has_value() && *got_rat == expect.value, "mismatch on: " + text);
    ++evaluated;
  }

  // Strip/re-insert round trip. The published GSM8k training file is used
  // when present; the synthetic corpus stands in otherwise.
  auto reinsert = [](const GsmRecord& rec) {
    std::string stripped = strip_annotations(rec.solution, rec.annotations);
    std::string out;
    std::size_t pos = 0;
    for (const Annotation& a : rec.annotations) {
      std::size_t keep = stripped_offset(rec.annotations, a.token_span.begin);
      out.append(stripped, pos, keep - pos);
      out += "<<" + a.expr_text + "=" + a.result_text + ">>";
      pos = keep;
    }
    out.append(stripped, pos, std::string::npos);
    return out;
  };

  std::string source;
  std::size_t round_tripped = 0;
  const char* env_path = std::getenv("GSM8K_TRAIN_PATH");
  std::vector<std::string> candidates;
  if (env_path) candidates.push_back(env_path);
  candidates.push_back("data/gsm8k/train.jsonl");
  candidates.push_back("data/gsm8k_train.jsonl");
  std::string found;
  for (const std::string& c : candidates)
    if (std::filesystem::exists(c)) {
      found = c;
      break;
    }
  if (!found.empty()) {
    auto records = read_gsm_records(found);
    for (const GsmRecord& rec : records) {
      require(reinsert(rec) == rec.solution, "round trip failed for " + rec.id);
      ++round_tripped;
    }
    source = found;
  } else {
    GsmRecord sausages = parse_record("sausages", kSausageQuestion, kSausageSolution);
    require(reinsert(sausages) == sausages.solution, "round trip failed for sausages");
    ++round_tripped;
    for (const synth::RawGsm& raw : synth::make_synthetic_records(300, 55)) {
      GsmRecord rec = parse_record(raw.id, raw.question, raw.answer);
      require(reinsert(rec) == rec.solution, "round trip failed for " + rec.id);
      ++round_tripped;
    }
    source = "synthetic corpus (no local GSM8k training file)";
  }

  std::ostringstream detail;
  detail << evaluated << " expressions matched the oracle; " << round_tripped
         << " solutions round-tripped from " << source;
  return detail.str();
}

struct Criterion {
  int id;
  std::string name;
  std::function<std::string()> run;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "corpus scale and oracle agreement", criterion_corpus_scale},
      {2, "log-uniform operand magnitudes", criterion_log_uniform},
      {3, "probe protocol", criterion_probe_protocol},
      {4, "perturbation soundness", criterion_perturbation},
      {5, "self-consistency semantics", criterion_self_consistency},
      {6, "random choice baseline", criterion_random_baseline},
      {7, "performance drop metric", criterion_drop_metric},
      {8, "distillation filter and split", criterion_distill_and_split},
      {9, "determinism", criterion_determinism},
      {10, "parser oracle and round trips", criterion_parser_oracle},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool pass = false;
    try {
      detail = c.run();
      pass = true;
    } catch (const Failure& f) {
      detail = f.detail;
    } catch (const std::exception& e) {
      detail = std::string("unexpected exception: ") + e.what();
    }
    std::cout << "criterion " << c.id << " [" << c.name << "]: "
              << (pass ? "PASS" : "FAIL") << " - " << detail << "\n"
              << std::flush;
    failures += pass ? 0 : 1;
  }

  if (failures > 0) {
    std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return 1;
  }
  std::cout << "all " << criteria.size() << " criteria passed\n";
  return 0;
}

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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "abacus/arith_gen.hpp"
#include "abacus/exact_value.hpp"
#include "abacus/expr.hpp"
#include "abacus/gsm_record.hpp"
#include "abacus/perturb.hpp"
#include "abacus/rng.hpp"
#include "abacus/scoring.hpp"

using namespace abacus;

namespace {

const char kQuestion[] =
    "Dylan needed chicken sausages and fish sausages to make sausage buns at "
    "a party. He bought 38 chicken sausages and 6 more fish sausages than "
    "chicken sausages. How many sausages did Dylan buy in all?";
const char kSolution[] =
    "He bought 38 + 6 = <<38+6=44>>44 fish sausages. Dylan bought 38 + 44 = "
    "<<38+44=82>>82 sausages in all. #### 82";

void BM_RationalArithmetic(benchmark::State& state) {
  ExactValue a(BigInt(123456789), BigInt(1024));
  ExactValue b(BigInt(-987654), BigInt(3125));
  for (auto _ : state) {
    ExactValue sum = a + b;
    ExactValue prod = a * b;
    ExactValue quot = a / b;
    benchmark::DoNotOptimize(sum);
    benchmark::DoNotOptimize(prod);
    benchmark::DoNotOptimize(quot);
  }
}
BENCHMARK(BM_RationalArithmetic);

void BM_ParseNumeral(benchmark::State& state) {
  for (auto _ : state) {
    ExactValue v = parse_numeral("$1,234,567.89 in total");
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_ParseNumeral);

void BM_RenderDecimal(benchmark::State& state) {
  ExactValue v(BigInt(1234567), BigInt(8));
  RenderMode mode = RenderMode::decimal(4, true);
  for (auto _ : state) {
    std::string s = render(v, mode);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_RenderDecimal);

void BM_ExprParseEval(benchmark::State& state) {
  for (auto _ : state) {
    ExactValue v = eval_expr(*parse_expr("(4305 + 97) * 12 - 1,200 / 16"));
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_ExprParseEval);

void BM_GenExample(benchmark::State& state) {
  GeneratorConfig cfg;
  ArithCategory cat = kCategories[static_cast<std::size_t>(state.range(0))];
  Rng rng(7);
  for (auto _ : state) {
    ArithmeticExample ex = gen_example(rng, cat, cfg);
    benchmark::DoNotOptimize(ex);
  }
}
BENCHMARK(BM_GenExample)->DenseRange(0, 5);

void BM_CorpusLine(benchmark::State& state) {
  GeneratorConfig cfg;
  Rng rng(7);
  ArithmeticExample ex = gen_example(rng, ArithCategory::percent, cfg);
  for (auto _ : state) {
    std::string line = corpus_line(ex);
    benchmark::DoNotOptimize(line);
  }
}
BENCHMARK(BM_CorpusLine);

void BM_ParseRecord(benchmark::State& state) {
  for (auto _ : state) {
    GsmRecord r = parse_record("sausages", kQuestion, kSolution);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ParseRecord);

void BM_BuildGraph(benchmark::State& state) {
  GsmRecord r = parse_record("sausages", kQuestion, kSolution);
  for (auto _ : state) {
    ComputationGraph g = build_graph(r);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_BuildGraph);

void BM_GenVariants(benchmark::State& state) {
  GsmRecord r = parse_record("sausages", kQuestion, kSolution);
  PerturbPolicy policy;
  policy.variants = static_cast<std::size_t>(state.range(0));
  policy.seed = 3;
  for (auto _ : state) {
    VariantSet set = gen_variants(r, policy);
    benchmark::DoNotOptimize(set);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenVariants)->Arg(10)->Arg(50);

void BM_ExtractFinalAnswer(benchmark::State& state) {
  std::string generation =
      "He bought 38 + 6 = 44 fish sausages. Dylan bought 38 + 44 = 82 "
      "sausages in all. The answer is 82.";
  for (auto _ : state) {
    auto a = extract_final_answer(generation);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_ExtractFinalAnswer);

void BM_MajorityVote(benchmark::State& state) {
  std::vector<std::optional<FinalAnswer>> answers;
  for (int i = 0; i < 8; ++i)
    answers.emplace_back(FinalAnswer(ExactValue(i % 3 == 0 ? 82 : 44)));
  for (auto _ : state) {
    auto winner = majority_vote(answers);
    benchmark::DoNotOptimize(winner);
  }
}
BENCHMARK(BM_MajorityVote);

}  // namespace

BENCHMARK_MAIN();

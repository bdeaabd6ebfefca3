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

#include "abacus/expr.hpp"

#include <doctest.h>

#include <string>

#include "abacus/errors.hpp"
#include "abacus/rng.hpp"
#include "expr_gen.hpp"
#include "gmp_oracle.hpp"

using namespace abacus;

TEST_CASE("hand-picked expressions evaluate exactly") {
  CHECK(eval_expr(*parse_expr("21 - 15")) == ExactValue(6));
  CHECK(eval_expr(*parse_expr("48/2")) == ExactValue(24));
  CHECK(eval_expr(*parse_expr("2 + 3 * 4")) == ExactValue(14));
  CHECK(eval_expr(*parse_expr("(2 + 3) * 4")) == ExactValue(20));
  CHECK(eval_expr(*parse_expr("10 - 3 - 2")) == ExactValue(5));
  CHECK(eval_expr(*parse_expr("24 / 4 / 2")) == ExactValue(3));
  CHECK(eval_expr(*parse_expr("-5 + 8")) == ExactValue(3));
  CHECK(eval_expr(*parse_expr("--4")) == ExactValue(4));
  CHECK(eval_expr(*parse_expr("0.1 + 0.2")) == ExactValue(BigInt(3), BigInt(10)));
  CHECK(eval_expr(*parse_expr("1,200 + 1")) == ExactValue(1201));
  CHECK(eval_expr(*parse_expr("7 / 2")) == ExactValue(BigInt(7), BigInt(2)));
}

TEST_CASE("division by zero surfaces as an error, not a crash") {
  CHECK_THROWS_AS(eval_expr(*parse_expr("1/0")), DivisionByZeroError);
  CHECK_THROWS_AS(eval_expr(*parse_expr("5 / (3 - 3)")), DivisionByZeroError);
}

TEST_CASE("malformed expressions are rejected") {
  CHECK_THROWS_AS(parse_expr(""), ExprParseError);
  CHECK_THROWS_AS(parse_expr("1 +"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("(1 + 2"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("1 + 2)"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("1 2"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("x + 1"), ExprParseError);
  CHECK_THROWS_AS(parse_expr("1..2"), ExprParseError);
}

TEST_CASE("literal nodes carry exact source spans in order") {
  std::string text = "12 + (3.5 * 1,200)";
  ExprPtr root = parse_expr(text);
  auto lits = literal_nodes(*root);
  REQUIRE(lits.size() == 3);
  auto piece = [&](const ExprNode* n) {
    return text.substr(n->span.begin, n->span.end - n->span.begin);
  };
  CHECK(piece(lits[0]) == "12");
  CHECK(piece(lits[1]) == "3.5");
  CHECK(piece(lits[2]) == "1,200");
  CHECK(lits[1]->literal == ExactValue(BigInt(7), BigInt(2)));
  CHECK(lits[2]->literal == ExactValue(1200));
}

TEST_CASE("random expressions agree with the GMP oracle") {
  Rng rng = derive_stream(314, {"expr-diff"});
  int evaluated = 0;
  int zero_divs = 0;
  for (int i = 0; i < 4000; ++i) {
    std::string text = exprgen::random_expr(rng);
    oracle::EvalOutcome expect = oracle::ExprOracle::eval(text);
    bool oracle_understood = expect.parse_ok || expect.division_by_zero;
    REQUIRE_MESSAGE(oracle_understood, "oracle rejected generated text: " << text);
    ExprPtr ast;
    REQUIRE_NOTHROW(ast = parse_expr(text));
    if (expect.division_by_zero) {
      CHECK_THROWS_AS(eval_expr(*ast), DivisionByZeroError);
      ++zero_divs;
      continue;
    }
    ExactValue got = eval_expr(*ast);
    auto got_rat = oracle::Rat::from_fraction(got.fraction_string());
    REQUIRE(got_rat.has_value());
    CHECK_MESSAGE(*got_rat == expect.value, "mismatch on: " << text);
    ++evaluated;
  }
  CHECK(evaluated > 3000);  // zero divisors should be rare
  CHECK(evaluated + zero_divs == 4000);
}

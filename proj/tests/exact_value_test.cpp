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

#include "abacus/exact_value.hpp"

#include <doctest.h>

#include <string>

#include "abacus/errors.hpp"
#include "abacus/rng.hpp"
#include "gmp_oracle.hpp"

using namespace abacus;

namespace {

oracle::Rat to_oracle(const ExactValue& v) {
  auto r = oracle::Rat::from_fraction(v.fraction_string());
  REQUIRE(r.has_value());
  return *r;
}

ExactValue random_rational(Rng& rng) {
  long long num = static_cast<long long>(rng.uniform_below(2'000'000'001)) - 1'000'000'000;
  long long den = static_cast<long long>(rng.uniform_in(1, 1'000'000));
  return ExactValue(BigInt(num), BigInt(den));
}

}  // namespace

TEST_CASE("rational arithmetic agrees with the GMP oracle") {
  Rng rng = derive_stream(2024, {"exact-ops"});
  for (int i = 0; i < 2000; ++i) {
    ExactValue a = random_rational(rng);
    ExactValue b = random_rational(rng);
    oracle::Rat oa = to_oracle(a);
    oracle::Rat ob = to_oracle(b);
    CHECK(to_oracle(a + b) == oa + ob);
    CHECK(to_oracle(a - b) == oa - ob);
    CHECK(to_oracle(a * b) == oa * ob);
    if (!b.is_zero()) CHECK(to_oracle(a / b) == oa / ob);
  }
}

TEST_CASE("construction canonicalizes and guards the denominator") {
  CHECK(ExactValue(BigInt(2), BigInt(4)) == ExactValue(BigInt(1), BigInt(2)));
  CHECK(ExactValue(BigInt(3), BigInt(-6)).fraction_string() == "-1/2");
  CHECK(ExactValue(BigInt(0), BigInt(-7)).fraction_string() == "0/1");
  CHECK(ExactValue(5).is_integer());
  CHECK_THROWS_AS(ExactValue(BigInt(1), BigInt(0)), ZeroDenominatorError);
  CHECK_THROWS_AS(ExactValue(7) / ExactValue(0), DivisionByZeroError);
}

TEST_CASE("comparisons follow rational order") {
  CHECK(ExactValue(BigInt(1), BigInt(3)) < ExactValue(BigInt(1), BigInt(2)));
  CHECK(ExactValue(BigInt(-1), BigInt(2)) < ExactValue(BigInt(-1), BigInt(3)));
  CHECK(ExactValue(2) <= ExactValue(BigInt(4), BigInt(2)));
  CHECK(ExactValue(BigInt(7), BigInt(2)).abs() == ExactValue(BigInt(-7), BigInt(2)).abs());
}

TEST_CASE("decimal rendering rounds half away from zero") {
  CHECK(render(ExactValue(BigInt(5), BigInt(2)), RenderMode::decimal(0)) == "3");
  CHECK(render(ExactValue(BigInt(-5), BigInt(2)), RenderMode::decimal(0)) == "-3");
  CHECK(render(ExactValue(BigInt(100), BigInt(3)), RenderMode::decimal(2)) == "33.33");
  CHECK(render(ExactValue(BigInt(1), BigInt(2)), RenderMode::decimal(4)) == "0.5");
  CHECK(render(ExactValue(1234567), RenderMode::decimal(2, true)) == "1,234,567");
  CHECK(render(ExactValue(BigInt(3), BigInt(8)), RenderMode::percent(4)) == "37.5%");
  CHECK(render(ExactValue(BigInt(3), BigInt(4)), RenderMode::fraction()) == "3/4");
  CHECK(render(ExactValue(6), RenderMode::fraction()) == "6");
  CHECK(render(ExactValue(42), RenderMode::integer(true)) == "42");
  CHECK(render(ExactValue(-1234567), RenderMode::integer(true)) == "-1,234,567");
}

TEST_CASE("rendering rejects misuse") {
  CHECK_THROWS_AS(render(ExactValue(BigInt(1), BigInt(2)), RenderMode::integer(false)),
                  NotAnIntegerError);
  CHECK_THROWS_AS(render(ExactValue(1), RenderMode::decimal(13)), ConfigError);
}

TEST_CASE("canonical strings re-parse to the same value") {
  CHECK(canonical_string(ExactValue(BigInt(1), BigInt(8))) == "0.125");
  CHECK(canonical_string(ExactValue(BigInt(1), BigInt(3))) == "1/3");
  CHECK(canonical_string(ExactValue(BigInt(-7), BigInt(50))) == "-0.14");
  CHECK(canonical_string(ExactValue(120)) == "120");
  Rng rng = derive_stream(77, {"exact-canon"});
  for (int i = 0; i < 2000; ++i) {
    ExactValue v = random_rational(rng);
    CHECK(parse_numeral(canonical_string(v)) == v);
  }
}

TEST_CASE("decimal renderings agree with the GMP expansion") {
  Rng rng = derive_stream(99, {"exact-decimal"});
  for (int i = 0; i < 500; ++i) {
    // Force a terminating value: n / (2^a * 5^b).
    long long n = static_cast<long long>(rng.uniform_below(1'000'000));
    long long den = 1;
    for (std::uint64_t a = rng.uniform_below(4); a > 0; --a) den *= 2;
    for (std::uint64_t b = rng.uniform_below(4); b > 0; --b) den *= 5;
    ExactValue v{BigInt(n), BigInt(den)};
    auto expect = to_oracle(v).decimal_str();
    REQUIRE(expect.has_value());
    CHECK(canonical_string(v) == *expect);
  }
}

TEST_CASE("leading numeral matching handles annotated forms") {
  NumeralOptions all;
  all.allow_sign = true;
  all.allow_fraction = true;
  all.allow_percent = true;
  all.allow_currency = true;

  auto m = match_leading_numeral("$12.50 per fish", all);
  REQUIRE(m.has_value());
  CHECK(m->value == ExactValue(BigInt(25), BigInt(2)));
  // Span covers the digits only; a rewrite must keep the currency sigil.
  CHECK(m->span.begin == 1);
  CHECK(m->span.end == 6);

  m = match_leading_numeral("72% of them", all);
  REQUIRE(m.has_value());
  CHECK(m->value == ExactValue(BigInt(18), BigInt(25)));

  m = match_leading_numeral("3/4 cup", all);
  REQUIRE(m.has_value());
  CHECK(m->value == ExactValue(BigInt(3), BigInt(4)));

  m = match_leading_numeral("-2.5 degrees", all);
  REQUIRE(m.has_value());
  CHECK(m->value == ExactValue(BigInt(-5), BigInt(2)));

  m = match_leading_numeral("1,234,567 ants", all);
  REQUIRE(m.has_value());
  CHECK(m->value == ExactValue(1234567));

  // A comma is grouping only when exactly three digits follow.
  m = match_leading_numeral("1,23 things", all);
  REQUIRE(m.has_value());
  CHECK(m->value == ExactValue(1));

  CHECK_FALSE(match_leading_numeral("abc", all).has_value());
  CHECK_FALSE(match_leading_numeral("", all).has_value());
  CHECK_FALSE(match_leading_numeral("$5", NumeralOptions{}).has_value());
}

TEST_CASE("numeral parsing is strict about the head, loose about the tail") {
  CHECK(parse_numeral("42") == ExactValue(42));
  CHECK(parse_numeral("  -3.5 apples") == ExactValue(BigInt(-7), BigInt(2)));
  CHECK(parse_numeral("3/4") == ExactValue(BigInt(3), BigInt(4)));
  CHECK_THROWS_AS(parse_numeral("no number"), NotANumeralError);
  CHECK_THROWS_AS(parse_numeral("7/0"), ZeroDenominatorError);
}

TEST_CASE("prose scanning finds standalone numerals with exact spans") {
  std::string text = "Dylan has 38 cards and 1,200 stickers; X11 isn't a number, 1.2.3 either.";
  auto found = find_numerals(text);
  REQUIRE(found.size() == 3);
  CHECK(text.substr(found[0].span.begin, found[0].span.end - found[0].span.begin) == "38");
  CHECK(found[0].value == ExactValue(38));
  CHECK(text.substr(found[1].span.begin, found[1].span.end - found[1].span.begin) == "1,200");
  CHECK(found[1].value == ExactValue(1200));
  CHECK(text.substr(found[2].span.begin, found[2].span.end - found[2].span.begin) == "1.2");
  CHECK(found[2].value == ExactValue(BigInt(6), BigInt(5)));
}

TEST_CASE("digit counting") {
  CHECK(digit_count(BigInt(0)) == 1);
  CHECK(digit_count(BigInt(9)) == 1);
  CHECK(digit_count(BigInt(10)) == 2);
  CHECK(digit_count(BigInt(-9999999)) == 7);
  CHECK(pow10(3) == BigInt(1000));
}

TEST_CASE("equal values hash equally") {
  std::hash<ExactValue> h;
  CHECK(h(ExactValue(BigInt(2), BigInt(4))) == h(ExactValue(BigInt(1), BigInt(2))));
}

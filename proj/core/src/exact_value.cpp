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

#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <utility>

namespace abacus {

namespace {

bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool ascii_alnum(char c) {
  return ascii_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Leading zeros must go: cpp_int's string constructor reads "0..." as octal.
BigInt from_digits(const std::string& digits) {
  std::size_t i = 0;
  while (i + 1 < digits.size() && digits[i] == '0') ++i;
  return BigInt(digits.substr(i));
}

// "1234567" -> "1,234,567"
std::string group_digits(const std::string& digits) {
  std::string out;
  out.reserve(digits.size() + digits.size() / 3);
  std::size_t lead = digits.size() % 3;
  if (lead == 0) lead = 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i >= lead && (i - lead) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string signed_digits(const BigInt& v, bool separators) {
  std::string s = BigInt(boost::multiprecision::abs(v)).str();
  if (separators) s = group_digits(s);
  if (v < 0) s.insert(s.begin(), '-');
  return s;
}

// Rounds num/den (den > 0) to the nearest integer, ties away from zero.
// With r = 2*num +- den, truncating r/(2*den) toward zero lands on the
// half-away-from-zero result for every sign combination.
BigInt round_half_away(const BigInt& num, const BigInt& den) {
  BigInt r = 2 * num + (num >= 0 ? den : -den);
  return r / (2 * den);
}

// Exact scaling by 10^places, then half-away rounding. No cap on places:
// canonical_string relies on arbitrarily deep terminating expansions.
std::string decimal_string(const ExactValue& v, int places, bool separators) {
  BigInt t = round_half_away(v.numerator() * pow10(places), v.denominator());
  if (places == 0) return signed_digits(t, separators);
  std::string digits = BigInt(boost::multiprecision::abs(t)).str();
  if (digits.size() < static_cast<std::size_t>(places) + 1) {
    digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
  }
  std::string int_part = digits.substr(0, digits.size() - places);
  std::string frac_part = digits.substr(digits.size() - places);
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  if (separators) int_part = group_digits(int_part);
  std::string out;
  if (t < 0) out.push_back('-');
  out += int_part;
  if (!frac_part.empty()) {
    out.push_back('.');
    out += frac_part;
  }
  return out;
}

struct TokenValue {
  BigInt num;
  BigInt den;
};

// Digit run at p, optionally with strict 3-digit comma grouping. Commas are
// consumed only while every group after the first has exactly three digits
// and is not followed by a fourth. Returns digits sans commas; empty when p
// is not at a digit.
std::string take_integer_token(std::string_view s, std::size_t& p, bool allow_commas) {
  if (p >= s.size() || !ascii_digit(s[p])) return {};
  std::size_t start = p;
  while (p < s.size() && ascii_digit(s[p])) ++p;
  std::string digits(s.substr(start, p - start));
  if (!allow_commas || digits.size() > 3) return digits;
  while (p < s.size() && s[p] == ',') {
    if (p + 4 > s.size()) break;
    if (!ascii_digit(s[p + 1]) || !ascii_digit(s[p + 2]) || !ascii_digit(s[p + 3])) break;
    if (p + 4 < s.size() && ascii_digit(s[p + 4])) break;
    digits.append(s.substr(p + 1, 3));
    p += 4;
  }
  return digits;
}

// Core matcher. `p` must sit on the first token character (sign, digit or
// leading dot); whitespace and currency skipping belong to the callers.
std::optional<NumeralMatch> match_at(std::string_view s, std::size_t p,
                                     const NumeralOptions& opt) {
  std::size_t begin = p;
  bool negative = false;
  if (opt.allow_sign && p < s.size() && (s[p] == '-' || s[p] == '+')) {
    bool digit_next = p + 1 < s.size() &&
                      (ascii_digit(s[p + 1]) ||
                       (s[p + 1] == '.' && p + 2 < s.size() && ascii_digit(s[p + 2])));
    if (!digit_next) return std::nullopt;
    negative = s[p] == '-';
    ++p;
  }

  std::string int_digits = take_integer_token(s, p, /*allow_commas=*/true);
  std::string frac_digits;
  if (p < s.size() && s[p] == '.' && p + 1 < s.size() && ascii_digit(s[p + 1])) {
    std::size_t q = p + 1;
    while (q < s.size() && ascii_digit(s[q])) ++q;
    frac_digits.assign(s.substr(p + 1, q - p - 1));
    p = q;
  }
  if (int_digits.empty() && frac_digits.empty()) return std::nullopt;
  if (int_digits.empty()) int_digits = "0";

  TokenValue tok;
  tok.num = from_digits(int_digits) * pow10(static_cast<int>(frac_digits.size()));
  if (!frac_digits.empty()) tok.num += from_digits(frac_digits);
  tok.den = pow10(static_cast<int>(frac_digits.size()));

  if (opt.allow_fraction && frac_digits.empty() && p + 1 < s.size() && s[p] == '/' &&
      ascii_digit(s[p + 1])) {
    std::size_t q = p + 1;
    std::string den_digits = take_integer_token(s, q, /*allow_commas=*/true);
    BigInt den = from_digits(den_digits);
    if (den == 0) {
      throw ZeroDenominatorError("zero denominator in '" +
                                 std::string(s.substr(begin, q - begin)) + "'");
    }
    tok.den = den;
    p = q;
  }

  if (negative) tok.num = -tok.num;
  ExactValue value(tok.num, tok.den);
  if (opt.allow_percent && p < s.size() && s[p] == '%') {
    ++p;
    value = value / ExactValue(100);
  }
  return NumeralMatch{Span{begin, p}, std::move(value)};
}

constexpr std::string_view kSpace = " \t\r\n";

}  // namespace

ExactValue::ExactValue(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw ZeroDenominatorError("denominator is zero");
  normalize();
}

void ExactValue::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

ExactValue ExactValue::abs() const { return num_ < 0 ? -*this : *this; }

ExactValue ExactValue::operator-() const {
  ExactValue r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

ExactValue ExactValue::operator+(const ExactValue& o) const {
  return ExactValue(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

ExactValue ExactValue::operator-(const ExactValue& o) const {
  return ExactValue(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

ExactValue ExactValue::operator*(const ExactValue& o) const {
  return ExactValue(num_ * o.num_, den_ * o.den_);
}

ExactValue ExactValue::operator/(const ExactValue& o) const {
  if (o.num_ == 0) throw DivisionByZeroError("exact division by zero");
  return ExactValue(num_ * o.den_, den_ * o.num_);
}

std::string ExactValue::fraction_string() const {
  return num_.str() + "/" + den_.str();
}

std::string render(const ExactValue& value, const RenderMode& mode) {
  using Kind = RenderMode::Kind;
  if ((mode.kind == Kind::decimal || mode.kind == Kind::percent) &&
      (mode.max_places < 0 || mode.max_places > 12)) {
    throw ConfigError("decimal places must lie in [0, 12], got " +
                      std::to_string(mode.max_places));
  }
  switch (mode.kind) {
    case Kind::integer:
      if (!value.is_integer()) {
        throw NotAnIntegerError("integer render of non-integer " + value.fraction_string());
      }
      return signed_digits(value.numerator(), mode.thousands_separators);
    case Kind::decimal:
      return decimal_string(value, mode.max_places, mode.thousands_separators);
    case Kind::fraction:
      if (value.is_integer()) return signed_digits(value.numerator(), false);
      return value.fraction_string();
    case Kind::percent:
      return decimal_string(value * ExactValue(100), mode.max_places,
                            mode.thousands_separators) +
             "%";
  }
  throw InternalError("unreachable render kind");
}

std::string canonical_string(const ExactValue& value) {
  if (value.is_integer()) return signed_digits(value.numerator(), false);
  BigInt den = value.denominator();
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den == 1) {
    // Terminating expansion: exact, so the rounding step never fires.
    return decimal_string(value, std::max(twos, fives), false);
  }
  return value.fraction_string();
}

std::optional<NumeralMatch> match_leading_numeral(std::string_view text,
                                                  const NumeralOptions& options) {
  std::size_t p = 0;
  while (p < text.size() && kSpace.find(text[p]) != std::string_view::npos) ++p;
  if (options.allow_currency && p < text.size() && text[p] == '$') ++p;
  if (p >= text.size()) return std::nullopt;
  return match_at(text, p, options);
}

ExactValue parse_numeral(std::string_view text) {
  NumeralOptions all;
  all.allow_sign = true;
  all.allow_fraction = true;
  all.allow_percent = true;
  all.allow_currency = true;
  auto m = match_leading_numeral(text, all);
  if (!m) {
    std::string snippet(text.substr(0, 32));
    throw NotANumeralError("no numeral at start of '" + snippet + "'");
  }
  return std::move(m->value);
}

std::vector<NumeralMatch> find_numerals(std::string_view text) {
  NumeralOptions prose;  // unsigned, no fractions, no '%', no '$'
  std::vector<NumeralMatch> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!ascii_digit(text[i])) {
      ++i;
      continue;
    }
    // Word boundary: digits glued to an identifier or to "x.y" tails are
    // not standalone numerals.
    if (i > 0 && (ascii_alnum(text[i - 1]) || text[i - 1] == '.')) {
      while (i < text.size() && ascii_digit(text[i])) ++i;
      continue;
    }
    auto m = match_at(text, i, prose);
    if (!m) {
      ++i;
      continue;
    }
    i = m->span.end;
    out.push_back(std::move(*m));
  }
  return out;
}

int digit_count(const BigInt& v) {
  if (v == 0) return 1;
  return static_cast<int>(BigInt(boost::multiprecision::abs(v)).str().size());
}

BigInt pow10(int exponent) {
  BigInt r = 1;
  for (int i = 0; i < exponent; ++i) r *= 10;
  return r;
}

}  // namespace abacus

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

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abacus/errors.hpp"

namespace abacus {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number. The single numeric currency of the library:
/// operands, annotation results and final answers are all ExactValues.
///
/// Invariants (enforced on construction):
///   - denominator > 0
///   - gcd(|numerator|, denominator) == 1
///   - zero is stored as 0/1
class ExactValue {
 public:
  ExactValue() : num_(0), den_(1) {}
  ExactValue(int n) : num_(n), den_(1) {}                 // NOLINT(google-explicit-constructor)
  ExactValue(long long n) : num_(n), den_(1) {}           // NOLINT(google-explicit-constructor)
  ExactValue(BigInt n) : num_(std::move(n)), den_(1) {}   // NOLINT(google-explicit-constructor)

  /// Throws ZeroDenominatorError when den == 0.
  ExactValue(BigInt num, BigInt den);

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  ExactValue abs() const;

  ExactValue operator-() const;
  ExactValue operator+(const ExactValue& o) const;
  ExactValue operator-(const ExactValue& o) const;
  ExactValue operator*(const ExactValue& o) const;
  /// Throws DivisionByZeroError when o == 0.
  ExactValue operator/(const ExactValue& o) const;

  bool operator==(const ExactValue& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const ExactValue& o) const { return !(*this == o); }
  bool operator<(const ExactValue& o) const { return num_ * o.den_ < o.num_ * den_; }
  bool operator<=(const ExactValue& o) const { return num_ * o.den_ <= o.num_ * den_; }
  bool operator>(const ExactValue& o) const { return o < *this; }
  bool operator>=(const ExactValue& o) const { return o <= *this; }

  /// Always "n/d", even for integers ("82/1"). Stable hash/debug form.
  std::string fraction_string() const;

 private:
  void normalize();

  BigInt num_;
  BigInt den_;
};

/// How a value is turned into text.
struct RenderMode {
  enum class Kind { integer, decimal, fraction, percent };

  Kind kind = Kind::decimal;
  int max_places = 4;  // decimal/percent only; must lie in [0, 12]
  bool thousands_separators = false;

  static RenderMode integer(bool separators = false) {
    return RenderMode{Kind::integer, 0, separators};
  }
  static RenderMode decimal(int places, bool separators = false) {
    return RenderMode{Kind::decimal, places, separators};
  }
  static RenderMode fraction() { return RenderMode{Kind::fraction, 0, false}; }
  static RenderMode percent(int places) { return RenderMode{Kind::percent, places, false}; }
};

/// Renders `value` under `mode`.
///   integer   -> plain digits; requires denominator 1 (NotAnIntegerError)
///   decimal   -> rounds half-away-from-zero to max_places, strips trailing zeros
///   fraction  -> "n/d" in lowest terms ("n" when d == 1)
///   percent   -> value*100 in decimal mode, then "%"
std::string render(const ExactValue& value, const RenderMode& mode);

/// Integer when possible, exact terminating decimal when one exists,
/// otherwise "n/d". Never loses information: parse_numeral round-trips it.
std::string canonical_string(const ExactValue& value);

/// Half-open character range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
  bool operator==(const Span& o) const { return begin == o.begin && end == o.end; }
};

struct NumeralMatch {
  Span span;  // the numeral token itself (currency symbol excluded)
  ExactValue value;
};

/// Token-level knobs for the numeral grammar. Prose scanning keeps the
/// narrow defaults; parse_numeral turns everything on.
struct NumeralOptions {
  bool allow_sign = false;
  bool allow_fraction = false;  // merge "a/b" into one rational token
  bool allow_percent = false;   // trailing '%' divides by 100
  bool allow_currency = false;  // leading '$' is skipped
};

/// Matches the numeral starting at the first non-space character, or nullopt.
/// Throws ZeroDenominatorError for "a/0" when fractions are enabled.
std::optional<NumeralMatch> match_leading_numeral(std::string_view text,
                                                  const NumeralOptions& options);

/// Parses the leading numeral of `text`, ignoring any trailing prose
/// ("44 fish sausages" -> 44). Commas inside digit groups and a leading '$'
/// are stripped; "a/b" parses as a rational; a trailing '%' divides by 100.
/// Throws NotANumeralError when no numeral prefix exists.
ExactValue parse_numeral(std::string_view text);

/// Scans prose for standalone unsigned numerals (integers and decimals,
/// comma grouping recognized). "3/4" yields two matches: fractions and '%'
/// suffixes are deliberately not merged so spans stay substitutable.
std::vector<NumeralMatch> find_numerals(std::string_view text);

/// Digits in |v|; digit_count(0) == 1.
int digit_count(const BigInt& v);

BigInt pow10(int exponent);

}  // namespace abacus

template <>
struct std::hash<abacus::ExactValue> {
  std::size_t operator()(const abacus::ExactValue& v) const {
    return std::hash<std::string>{}(v.fraction_string());
  }
};

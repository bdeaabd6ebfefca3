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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abacus/exact_value.hpp"
#include "abacus/rng.hpp"

namespace abacus {

/// Problem families of the synthetic corpus. Order is canonical (it is the
/// id sort order); keep it alphabetical.
enum class ArithCategory { add, div, fraction, mul, percent, sub };

inline constexpr std::array<ArithCategory, 6> kCategories = {
    ArithCategory::add,      ArithCategory::div,     ArithCategory::fraction,
    ArithCategory::mul,      ArithCategory::percent, ArithCategory::sub,
};

std::string_view category_name(ArithCategory c);
std::optional<ArithCategory> category_from_name(std::string_view name);

/// Per-category shares. Defaults give the basic operations the bulk of the
/// corpus with fraction/percentage items layered on top; the split is a
/// configuration choice, recorded in the manifest, not a fixed constant.
struct CategoryMix {
  double add = 0.25;
  double sub = 0.25;
  double mul = 0.15;
  double div = 0.15;
  double fraction = 0.10;
  double percent = 0.10;

  double weight(ArithCategory c) const;
};

struct GeneratorConfig {
  std::uint64_t seed = 0;
  std::uint64_t total_count = 1'290'175;
  int max_digits = 7;                    // in [1, 15]
  CategoryMix mix;
  double exact_division_probability = 0.5;
  int fraction_component_max_digits = 3; // keeps fraction items readable
  bool subtraction_nonnegative = true;

  /// Throws ConfigError when weights do not sum to 1 or bounds are violated.
  void validate() const;
};

struct ArithmeticExample {
  std::string id;  // "<category>-<8-digit index>"; lexicographic == canonical
  ArithCategory category = ArithCategory::add;
  std::string input;   // "4305 + 97 = " / "What is 25% of 480?"
  std::string target;  // exact answer rendering
  std::vector<ExactValue> operands;
};

/// One operand draw: digit count uniform over {1..max_digits}, then uniform
/// within the digit class ([0,10) for d=1). Uniform digit counts are the
/// point: plain uniform sampling would almost always produce max-width
/// operands.
BigInt sample_operand(Rng& rng, int max_digits);

/// One example from the category's stream. No id, no dedup; resamples
/// internally on degenerate draws (zero divisors, zero remainders in
/// remainder form).
ArithmeticExample gen_example(Rng& rng, ArithCategory category,
                              const GeneratorConfig& cfg);

/// Largest-remainder split of `total` over the mix; ties go to the earlier
/// canonical category. Entries sum to exactly `total`.
std::array<std::uint64_t, 6> apportion_counts(std::uint64_t total,
                                              const CategoryMix& mix);

/// The canonical line serialization (JSON object + LF). Manifest digests are
/// computed over exactly these bytes.
std::string corpus_line(const ArithmeticExample& ex);

class ExampleSink {
 public:
  virtual ~ExampleSink() = default;
  /// May throw SinkFailureError; build_dataset propagates it.
  virtual void accept(const ArithmeticExample& ex) = 0;
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  std::uint64_t total = 0;
  std::array<std::uint64_t, 6> counts{};  // indexed like kCategories
  std::string digest;                     // sha256 over the corpus_line stream
};

/// Emits exactly total_count examples into `sink`, unique by input text,
/// ordered by id. `threads` > 1 generates categories concurrently on
/// independent sub-streams and replays buffered results in canonical order,
/// so the byte stream never depends on the thread count.
/// Throws ExhaustedRetriesError when a category's unique space runs dry.
DatasetManifest build_dataset(const GeneratorConfig& cfg, ExampleSink& sink,
                              int threads = 1);

}  // namespace abacus

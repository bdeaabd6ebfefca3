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

#include "abacus/arith_gen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <thread>
#include <unordered_set>
#include <utility>

#include "abacus/digest.hpp"
#include "abacus/errors.hpp"

namespace abacus {

namespace {

constexpr int kMaxDedupRetries = 100000;
constexpr int kMaxDegenerateRetries = 100000;

std::string make_id(ArithCategory cat, std::uint64_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "-%08llu", static_cast<unsigned long long>(index));
  return std::string(category_name(cat)) + buf;
}

BigInt sample_nonzero(Rng& rng, int max_digits) {
  for (int i = 0; i < kMaxDegenerateRetries; ++i) {
    BigInt v = sample_operand(rng, max_digits);
    if (v != 0) return v;
  }
  throw ExhaustedRetriesError("could not draw a nonzero operand");
}

void json_escape_to(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
}

ArithmeticExample basic_example(ArithCategory cat, char op, const BigInt& a,
                                const BigInt& b, const ExactValue& result) {
  ArithmeticExample ex;
  ex.category = cat;
  ex.input = a.str() + " " + op + " " + b.str() + " = ";
  ex.target = canonical_string(result);
  ex.operands = {ExactValue(a), ExactValue(b)};
  return ex;
}

}  // namespace

std::string_view category_name(ArithCategory c) {
  switch (c) {
    case ArithCategory::add: return "add";
    case ArithCategory::div: return "div";
    case ArithCategory::fraction: return "fraction";
    case ArithCategory::mul: return "mul";
    case ArithCategory::percent: return "percent";
    case ArithCategory::sub: return "sub";
  }
  throw InternalError("unreachable category");
}

std::optional<ArithCategory> category_from_name(std::string_view name) {
  for (ArithCategory c : kCategories) {
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

double CategoryMix::weight(ArithCategory c) const {
  switch (c) {
    case ArithCategory::add: return add;
    case ArithCategory::div: return div;
    case ArithCategory::fraction: return fraction;
    case ArithCategory::mul: return mul;
    case ArithCategory::percent: return percent;
    case ArithCategory::sub: return sub;
  }
  throw InternalError("unreachable category");
}

void GeneratorConfig::validate() const {
  double sum = 0;
  for (ArithCategory c : kCategories) {
    double w = mix.weight(c);
    if (w < 0) throw ConfigError("negative category weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("category weights sum to " + std::to_string(sum) + ", expected 1");
  }
  if (max_digits < 1 || max_digits > 15) {
    throw ConfigError("max_digits must lie in [1, 15]");
  }
  if (exact_division_probability < 0 || exact_division_probability > 1) {
    throw ConfigError("exact_division_probability must lie in [0, 1]");
  }
  if (fraction_component_max_digits < 1) {
    throw ConfigError("fraction_component_max_digits must be >= 1");
  }
  if (total_count < 1) throw ConfigError("total_count must be >= 1");
}

BigInt sample_operand(Rng& rng, int max_digits) {
  int d = static_cast<int>(rng.uniform_in(1, static_cast<std::uint64_t>(max_digits)));
  if (d == 1) return BigInt(rng.uniform_below(10));
  std::uint64_t lo = 1;
  for (int i = 1; i < d; ++i) lo *= 10;
  return BigInt(rng.uniform_in(lo, lo * 10 - 1));
}

ArithmeticExample gen_example(Rng& rng, ArithCategory category,
                              const GeneratorConfig& cfg) {
  switch (category) {
    case ArithCategory::add: {
      BigInt a = sample_operand(rng, cfg.max_digits);
      BigInt b = sample_operand(rng, cfg.max_digits);
      return basic_example(category, '+', a, b, ExactValue(a) + ExactValue(b));
    }
    case ArithCategory::sub: {
      BigInt a = sample_operand(rng, cfg.max_digits);
      BigInt b = sample_operand(rng, cfg.max_digits);
      if (cfg.subtraction_nonnegative && b > a) std::swap(a, b);
      return basic_example(category, '-', a, b, ExactValue(a) - ExactValue(b));
    }
    case ArithCategory::mul: {
      BigInt a = sample_operand(rng, cfg.max_digits);
      BigInt b = sample_operand(rng, cfg.max_digits);
      return basic_example(category, '*', a, b, ExactValue(a) * ExactValue(b));
    }
    case ArithCategory::div: {
      if (rng.bernoulli(cfg.exact_division_probability)) {
        BigInt b = sample_nonzero(rng, cfg.max_digits);
        BigInt a = sample_operand(rng, cfg.max_digits);
        a = (a / b) * b;  // floor to a multiple; never grows the digit count
        return basic_example(category, '/', a, b, ExactValue(a) / ExactValue(b));
      }
      // Remainder form. Degenerate draws (divisor < 2, or an exact split
      // that belongs to the other branch) are rejected and resampled.
      for (int i = 0; i < kMaxDegenerateRetries; ++i) {
        BigInt b = sample_operand(rng, cfg.max_digits);
        if (b < 2) continue;
        BigInt a = sample_operand(rng, cfg.max_digits);
        BigInt r = a % b;
        if (r == 0) continue;
        ArithmeticExample ex = basic_example(category, '/', a, b, ExactValue(a));
        ex.target = BigInt(a / b).str() + " R " + r.str();
        return ex;
      }
      throw ExhaustedRetriesError("no remainder-form division draw succeeded");
    }
    case ArithCategory::fraction: {
      int fd = std::min(cfg.fraction_component_max_digits, cfg.max_digits);
      BigInt a = sample_operand(rng, fd);
      BigInt b = sample_nonzero(rng, fd);
      BigInt c = sample_operand(rng, fd);
      BigInt d = sample_nonzero(rng, fd);
      int op = static_cast<int>(rng.uniform_below(4));
      if (op == 3 && c == 0) c = sample_nonzero(rng, fd);  // divisor must be nonzero
      ExactValue lhs(a, b);
      ExactValue rhs(c, d);
      if (op == 1 && cfg.subtraction_nonnegative && lhs < rhs) {
        std::swap(a, c);
        std::swap(b, d);
        std::swap(lhs, rhs);
      }
      static constexpr char kOps[] = {'+', '-', '*', '/'};
      ExactValue result;
      switch (op) {
        case 0: result = lhs + rhs; break;
        case 1: result = lhs - rhs; break;
        case 2: result = lhs * rhs; break;
        default: result = lhs / rhs; break;
      }
      ArithmeticExample ex;
      ex.category = category;
      ex.input = a.str() + "/" + b.str() + " " + kOps[op] + " " + c.str() + "/" +
                 d.str() + " = ";
      ex.target = render(result, RenderMode::fraction());
      ex.operands = {lhs, rhs};
      return ex;
    }
    case ArithCategory::percent: {
      BigInt p = sample_operand(rng, std::min(3, cfg.max_digits));
      BigInt n = sample_operand(rng, cfg.max_digits);
      ArithmeticExample ex;
      ex.category = category;
      ex.input = "What is " + p.str() + "% of " + n.str() + "?";
      ex.target = canonical_string(ExactValue(p) * ExactValue(n) / ExactValue(100));
      ex.operands = {ExactValue(p), ExactValue(n)};
      return ex;
    }
  }
  throw InternalError("unreachable category");
}

std::array<std::uint64_t, 6> apportion_counts(std::uint64_t total,
                                              const CategoryMix& mix) {
  std::array<std::uint64_t, 6> base{};
  std::array<double, 6> remainder{};
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < kCategories.size(); ++i) {
    double share = static_cast<double>(total) * mix.weight(kCategories[i]);
    double fl = std::floor(share);
    base[i] = static_cast<std::uint64_t>(fl);
    remainder[i] = share - fl;
    assigned += base[i];
  }
  std::array<std::size_t, 6> order = {0, 1, 2, 3, 4, 5};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y]; });
  while (assigned < total) {
    for (std::size_t k = 0; k < order.size() && assigned < total; ++k) {
      ++base[order[k]];
      ++assigned;
    }
  }
  while (assigned > total) {  // floating-point overshoot; take back from low remainders
    for (std::size_t k = order.size(); k-- > 0 && assigned > total;) {
      if (base[order[k]] > 0) {
        --base[order[k]];
        --assigned;
      }
    }
  }
  return base;
}

std::string corpus_line(const ArithmeticExample& ex) {
  std::string out = "{\"id\":\"";
  json_escape_to(out, ex.id);
  out += "\",\"category\":\"";
  out += category_name(ex.category);
  out += "\",\"input\":\"";
  json_escape_to(out, ex.input);
  out += "\",\"target\":\"";
  json_escape_to(out, ex.target);
  out += "\"}\n";
  return out;
}

DatasetManifest build_dataset(const GeneratorConfig& cfg, ExampleSink& sink,
                              int threads) {
  cfg.validate();
  auto counts = apportion_counts(cfg.total_count, cfg.mix);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 99'999'999ULL) {
      throw ConfigError("category count exceeds the 8-digit id space");
    }
  }

  DatasetManifest manifest;
  manifest.seed = cfg.seed;
  manifest.total = cfg.total_count;
  manifest.counts = counts;

  auto run_category = [&cfg, &counts](std::size_t ci,
                                      const std::function<void(ArithmeticExample&&)>& emit) {
    ArithCategory cat = kCategories[ci];
    Rng rng = derive_stream(cfg.seed, {"arithgen", category_name(cat), "0"});
    std::unordered_set<std::string> seen;
    seen.reserve(static_cast<std::size_t>(counts[ci]) * 2);
    for (std::uint64_t i = 0; i < counts[ci]; ++i) {
      ArithmeticExample ex;
      int tries = 0;
      for (;;) {
        ex = gen_example(rng, cat, cfg);
        if (seen.insert(ex.input).second) break;
        if (++tries > kMaxDedupRetries) {
          throw ExhaustedRetriesError("category '" + std::string(category_name(cat)) +
                                      "' ran out of unique inputs at item " +
                                      std::to_string(i));
        }
      }
      ex.id = make_id(cat, i);
      emit(std::move(ex));
    }
  };

  Sha256 digest;
  if (threads <= 1) {
    for (std::size_t ci = 0; ci < kCategories.size(); ++ci) {
      run_category(ci, [&](ArithmeticExample&& ex) {
        digest.update(corpus_line(ex));
        sink.accept(ex);
      });
    }
  } else {
    std::array<std::vector<ArithmeticExample>, 6> buffers;
    std::array<std::exception_ptr, 6> failures{};
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t ci = next.fetch_add(1);
        if (ci >= kCategories.size()) return;
        try {
          buffers[ci].reserve(static_cast<std::size_t>(counts[ci]));
          run_category(ci, [&](ArithmeticExample&& ex) {
            buffers[ci].push_back(std::move(ex));
          });
        } catch (...) {
          failures[ci] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(threads, static_cast<int>(kCategories.size()));
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
    for (auto& buffer : buffers) {
      for (ArithmeticExample& ex : buffer) {
        digest.update(corpus_line(ex));
        sink.accept(ex);
      }
      buffer.clear();
      buffer.shrink_to_fit();
    }
  }
  manifest.digest = digest.hex_digest();
  return manifest;
}

}  // namespace abacus

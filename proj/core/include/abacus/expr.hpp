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

#include <memory>
#include <string_view>
#include <vector>

#include "abacus/exact_value.hpp"

namespace abacus {

/// AST for calculator-annotation expressions.
///
///   expr    := term (('+' | '-') term)*
///   term    := factor (('*' | '/') factor)*
///   factor  := '-' factor | primary
///   primary := numeral | '(' expr ')'
///
/// Numerals are unsigned integers or decimals, comma grouping allowed.
/// Binary operators associate left. Literal nodes keep their source span so
/// callers can rewrite operands in place.
struct ExprNode {
  enum class Kind { literal, negate, add, sub, mul, div, group };

  Kind kind = Kind::literal;
  ExactValue literal;                // Kind::literal only
  Span span;                         // Kind::literal: numeral span in the input
  std::unique_ptr<ExprNode> lhs;     // binary ops; negate/group use lhs alone
  std::unique_ptr<ExprNode> rhs;
};

using ExprPtr = std::unique_ptr<ExprNode>;

/// Parses all of `text` (trailing garbage is an error).
/// Throws ExprParseError.
ExprPtr parse_expr(std::string_view text);

/// Exact evaluation. Throws DivisionByZeroError.
ExactValue eval_expr(const ExprNode& node);

/// Literal nodes in source order (left to right).
std::vector<const ExprNode*> literal_nodes(const ExprNode& root);

}  // namespace abacus

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

#include <string>
#include <utility>

#include "abacus/errors.hpp"

namespace abacus {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr run() {
    ExprPtr root = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ExprParseError(why + " at offset " + std::to_string(pos_) + " in '" +
                         std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr parse_sum() {
    ExprPtr node = parse_product();
    for (;;) {
      if (eat('+')) {
        node = binary(ExprNode::Kind::add, std::move(node), parse_product());
      } else if (eat('-')) {
        node = binary(ExprNode::Kind::sub, std::move(node), parse_product());
      } else {
        return node;
      }
    }
  }

  ExprPtr parse_product() {
    ExprPtr node = parse_factor();
    for (;;) {
      if (eat('*')) {
        node = binary(ExprNode::Kind::mul, std::move(node), parse_factor());
      } else if (eat('/')) {
        node = binary(ExprNode::Kind::div, std::move(node), parse_factor());
      } else {
        return node;
      }
    }
  }

  ExprPtr parse_factor() {
    if (eat('-')) {
      auto node = std::make_unique<ExprNode>();
      node->kind = ExprNode::Kind::negate;
      node->lhs = parse_factor();
      return node;
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    if (eat('(')) {
      auto node = std::make_unique<ExprNode>();
      node->kind = ExprNode::Kind::group;
      node->lhs = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return node;
    }
    skip_space();
    if (pos_ >= text_.size()) fail("expected a numeral");
    NumeralOptions literal_opts;  // unsigned, commas+decimals only
    auto m = match_leading_numeral(text_.substr(pos_), literal_opts);
    if (!m) fail("expected a numeral");
    auto node = std::make_unique<ExprNode>();
    node->kind = ExprNode::Kind::literal;
    node->literal = std::move(m->value);
    node->span = Span{pos_ + m->span.begin, pos_ + m->span.end};
    pos_ = node->span.end;
    return node;
  }

  static ExprPtr binary(ExprNode::Kind kind, ExprPtr lhs, ExprPtr rhs) {
    auto node = std::make_unique<ExprNode>();
    node->kind = kind;
    node->lhs = std::move(lhs);
    node->rhs = std::move(rhs);
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect_literals(const ExprNode& node, std::vector<const ExprNode*>& out) {
  switch (node.kind) {
    case ExprNode::Kind::literal:
      out.push_back(&node);
      return;
    case ExprNode::Kind::negate:
    case ExprNode::Kind::group:
      collect_literals(*node.lhs, out);
      return;
    default:
      collect_literals(*node.lhs, out);
      collect_literals(*node.rhs, out);
      return;
  }
}

}  // namespace

ExprPtr parse_expr(std::string_view text) { return Parser(text).run(); }

ExactValue eval_expr(const ExprNode& node) {
  switch (node.kind) {
    case ExprNode::Kind::literal:
      return node.literal;
    case ExprNode::Kind::negate:
      return -eval_expr(*node.lhs);
    case ExprNode::Kind::group:
      return eval_expr(*node.lhs);
    case ExprNode::Kind::add:
      return eval_expr(*node.lhs) + eval_expr(*node.rhs);
    case ExprNode::Kind::sub:
      return eval_expr(*node.lhs) - eval_expr(*node.rhs);
    case ExprNode::Kind::mul:
      return eval_expr(*node.lhs) * eval_expr(*node.rhs);
    case ExprNode::Kind::div:
      return eval_expr(*node.lhs) / eval_expr(*node.rhs);
  }
  throw InternalError("unreachable expr kind");
}

std::vector<const ExprNode*> literal_nodes(const ExprNode& root) {
  std::vector<const ExprNode*> out;
  collect_literals(root, out);
  return out;
}

}  // namespace abacus

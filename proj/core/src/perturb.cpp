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

#include "abacus/perturb.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "abacus/errors.hpp"
#include "abacus/rng.hpp"

namespace abacus {

namespace {

// Changed values render canonically; thousands separators are kept iff the
// text being replaced used them.
std::string render_like(const std::string& text, const Span& span, const ExactValue& v) {
  bool commas = text.find(',', span.begin) < span.end;
  if (v.is_integer()) return render(v, RenderMode::integer(commas));
  return canonical_string(v);
}

struct Edit {
  Span span;
  std::string text;
};

std::string splice(const std::string& original, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(),
            [](const Edit& a, const Edit& b) { return a.span.begin < b.span.begin; });
  std::string out;
  out.reserve(original.size() + 16);
  std::size_t from = 0;
  for (const Edit& e : edits) {
    if (e.span.begin < from) throw InternalError("overlapping rewrite spans");
    out.append(original, from, e.span.begin - from);
    out.append(e.text);
    from = e.span.end;
  }
  out.append(original, from, original.size() - from);
  return out;
}

bool spans_overlap(const Span& a, const Span& b) {
  return a.begin < b.end && b.begin < a.end;
}

// AST shape with literals replaced by binding tokens. Equal strings mean
// same operators, same topology, same binding structure.
void shape_of(const ExprNode& n, const std::vector<OperandRef>& refs,
              std::size_t& literal_cursor, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::literal: {
      const OperandRef& r = refs[literal_cursor++];
      switch (r.kind) {
        case OperandRef::Kind::input:
          out += "i" + std::to_string(r.index);
          break;
        case OperandRef::Kind::node:
          out += "n" + std::to_string(r.index);
          break;
        case OperandRef::Kind::constant:
          out += "c" + canonical_string(r.constant);
          break;
      }
      return;
    }
    case ExprNode::Kind::negate:
      out += "-(";
      shape_of(*n.lhs, refs, literal_cursor, out);
      out += ")";
      return;
    case ExprNode::Kind::group:
      out += "(";
      shape_of(*n.lhs, refs, literal_cursor, out);
      out += ")";
      return;
    default: {
      char op = n.kind == ExprNode::Kind::add   ? '+'
                : n.kind == ExprNode::Kind::sub ? '-'
                : n.kind == ExprNode::Kind::mul ? '*'
                                                : '/';
      out += "(";
      shape_of(*n.lhs, refs, literal_cursor, out);
      out.push_back(op);
      shape_of(*n.rhs, refs, literal_cursor, out);
      out += ")";
      return;
    }
  }
}

// Evaluates a node's AST with each literal replaced by its ref's value.
ExactValue eval_with_refs(const GraphNode& node,
                          const std::function<ExactValue(const OperandRef&)>& value_of) {
  std::size_t cursor = 0;
  std::function<ExactValue(const ExprNode&)> ev = [&](const ExprNode& n) -> ExactValue {
    switch (n.kind) {
      case ExprNode::Kind::literal:
        return value_of(node.literal_refs[cursor++]);
      case ExprNode::Kind::negate:
        return -ev(*n.lhs);
      case ExprNode::Kind::group:
        return ev(*n.lhs);
      default: {
        // The cursor pairs literals with refs in source order, so the two
        // operands must be evaluated left before right; `ev(a) + ev(b)`
        // leaves that order to the compiler.
        ExactValue lhs = ev(*n.lhs);
        ExactValue rhs = ev(*n.rhs);
        switch (n.kind) {
          case ExprNode::Kind::add: return lhs + rhs;
          case ExprNode::Kind::sub: return lhs - rhs;
          case ExprNode::Kind::mul: return lhs * rhs;
          default: return lhs / rhs;
        }
      }
    }
    throw InternalError("unreachable expr kind");
  };
  return ev(*node.ast);
}

// The precise numeral span inside an annotation's result text, in solution
// coordinates. Rewrites target the numeral, not trailing prose.
Span result_numeral_span(const Annotation& a) {
  NumeralOptions opts;
  opts.allow_sign = true;
  opts.allow_fraction = true;
  opts.allow_percent = true;
  opts.allow_currency = true;
  auto m = match_leading_numeral(a.result_text, opts);
  if (!m) throw InternalError("annotation result lost its numeral");
  return Span{a.result_span.begin + m->span.begin, a.result_span.begin + m->span.end};
}

std::uint64_t pow10_u64(int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

std::string ComputationGraph::signature() const {
  std::string sig = "i" + std::to_string(inputs.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    sig += "|n" + std::to_string(j) + ":";
    std::size_t cursor = 0;
    shape_of(*nodes[j].ast, nodes[j].literal_refs, cursor, sig);
  }
  sig += "|r" + std::to_string(root);
  return sig;
}

ComputationGraph build_graph(const GsmRecord& record) {
  ComputationGraph g;
  const std::vector<NumeralMatch> question_numerals = find_numerals(record.question);

  std::unordered_map<ExactValue, std::size_t> slot_by_value;
  auto bind_question = [&](const ExactValue& v) -> std::optional<OperandRef> {
    if (auto it = slot_by_value.find(v); it != slot_by_value.end()) {
      return OperandRef{OperandRef::Kind::input, it->second, {}};
    }
    InputSlot slot;
    slot.value = v;
    bool first = true;
    for (const NumeralMatch& qm : question_numerals) {
      if (qm.value != v) continue;
      if (first) {
        slot.question_span = qm.span;
        first = false;
      } else {
        slot.extra_question_spans.push_back(qm.span);
      }
    }
    if (first) return std::nullopt;  // value absent from the question
    g.inputs.push_back(std::move(slot));
    slot_by_value.emplace(v, g.inputs.size() - 1);
    return OperandRef{OperandRef::Kind::input, g.inputs.size() - 1, {}};
  };

  // Operation nodes with operand binding: prior node > question > constant.
  std::vector<bool> consumed;
  for (std::size_t i = 0; i < record.annotations.size(); ++i) {
    const Annotation& a = record.annotations[i];
    GraphNode node;
    node.annotation_index = i;
    node.ast = parse_expr(a.expr_text);
    for (const ExprNode* lit : literal_nodes(*node.ast)) {
      const ExactValue& v = lit->literal;
      OperandRef ref{OperandRef::Kind::constant, 0, v};
      bool bound = false;
      for (std::size_t j = 0; j < g.nodes.size(); ++j) {
        if (!consumed[j] && g.nodes[j].value == v) {
          ref = OperandRef{OperandRef::Kind::node, j, {}};
          consumed[j] = true;
          bound = true;
          break;
        }
      }
      if (!bound) {
        if (std::optional<OperandRef> in = bind_question(v)) ref = *in;
      }
      node.literal_refs.push_back(std::move(ref));
    }
    node.value = eval_expr(*node.ast);
    g.nodes.push_back(std::move(node));
    consumed.push_back(false);
  }

  bool rooted = false;
  for (std::size_t j = g.nodes.size(); j-- > 0;) {
    if (g.nodes[j].value == record.final_answer) {
      g.root = j;
      rooted = true;
      break;
    }
  }
  if (!rooted) {
    throw NoRootError("record '" + record.id + "': no step produces the final answer " +
                      canonical_string(record.final_answer));
  }

  // Prose numerals in the solution: echoes right after a token track that
  // node; within each inter-annotation segment, a trailing run restating the
  // next annotation's operands binds positionally; the rest bind by value.
  struct SegmentNumeral {
    NumeralMatch m;
    std::size_t segment;  // annotations.size() == tail
  };
  std::vector<std::vector<SegmentNumeral>> segments(record.annotations.size() + 1);

  for (const NumeralMatch& m : find_numerals(record.solution)) {
    bool inside_token = false;
    std::size_t echo_of = record.annotations.size();
    for (std::size_t i = 0; i < record.annotations.size(); ++i) {
      const Span& t = record.annotations[i].token_span;
      if (m.span.begin >= t.begin && m.span.begin < t.end) {
        inside_token = true;
        break;
      }
      std::size_t echo_pos = t.end;
      if (echo_pos < record.solution.size() && record.solution[echo_pos] == '$') ++echo_pos;
      if (m.span.begin == echo_pos) echo_of = i;
    }
    if (inside_token) continue;
    if (spans_overlap(m.span, record.final_answer_span)) continue;  // root rewrite
    if (echo_of < record.annotations.size() && m.value == g.nodes[echo_of].value) {
      g.prose_sites.push_back({m.span, OperandRef{OperandRef::Kind::node, echo_of, {}}});
      continue;
    }
    std::size_t seg = record.annotations.size();
    for (std::size_t i = 0; i < record.annotations.size(); ++i) {
      if (m.span.end <= record.annotations[i].token_span.begin) {
        seg = i;
        break;
      }
    }
    segments[seg].push_back({m, seg});
  }

  auto bind_by_value = [&](const NumeralMatch& m) {
    if (auto it = slot_by_value.find(m.value); it != slot_by_value.end()) {
      g.prose_sites.push_back({m.span, OperandRef{OperandRef::Kind::input, it->second, {}}});
      return;
    }
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      if (g.nodes[j].value == m.value) {
        g.prose_sites.push_back({m.span, OperandRef{OperandRef::Kind::node, j, {}}});
        return;
      }
    }
    g.inert.push_back({false, m.span, m.value});
  };

  for (std::size_t seg = 0; seg < segments.size(); ++seg) {
    std::vector<SegmentNumeral>& list = segments[seg];
    std::size_t positional_from = list.size();
    if (seg < g.nodes.size()) {
      const GraphNode& node = g.nodes[seg];
      std::vector<const ExprNode*> lits = literal_nodes(*node.ast);
      if (list.size() >= lits.size() && !lits.empty()) {
        std::size_t start = list.size() - lits.size();
        bool match = true;
        for (std::size_t k = 0; k < lits.size(); ++k) {
          if (list[start + k].m.value != lits[k]->literal) {
            match = false;
            break;
          }
        }
        if (match) {
          positional_from = start;
          for (std::size_t k = 0; k < lits.size(); ++k) {
            g.prose_sites.push_back({list[start + k].m.span, node.literal_refs[k]});
          }
        }
      }
    }
    for (std::size_t k = 0; k < positional_from; ++k) bind_by_value(list[k].m);
  }

  for (const NumeralMatch& qm : question_numerals) {
    if (slot_by_value.find(qm.value) == slot_by_value.end()) {
      g.inert.push_back({true, qm.span, qm.value});
    }
  }
  return g;
}

GsmRecord substitute(const ComputationGraph& graph, const GsmRecord& record,
                     const Assignment& assignment,
                     const PerturbConstraints& constraints) {
  if (assignment.size() != graph.inputs.size()) {
    throw ConfigError("assignment covers " + std::to_string(assignment.size()) +
                      " inputs, graph has " + std::to_string(graph.inputs.size()));
  }
  if (constraints.require_nonnegative) {
    for (const ExactValue& v : assignment) {
      if (v.is_negative()) {
        throw ConstraintViolatedError("negative input " + canonical_string(v));
      }
    }
  }

  std::vector<ExactValue> node_values(graph.nodes.size());
  auto old_of = [&](const OperandRef& r) -> ExactValue {
    switch (r.kind) {
      case OperandRef::Kind::input: return graph.inputs[r.index].value;
      case OperandRef::Kind::node: return graph.nodes[r.index].value;
      case OperandRef::Kind::constant: return r.constant;
    }
    throw InternalError("unreachable ref kind");
  };
  auto new_of = [&](const OperandRef& r) -> ExactValue {
    switch (r.kind) {
      case OperandRef::Kind::input: return assignment[r.index];
      case OperandRef::Kind::node: return node_values[r.index];
      case OperandRef::Kind::constant: return r.constant;
    }
    throw InternalError("unreachable ref kind");
  };

  for (std::size_t j = 0; j < graph.nodes.size(); ++j) {
    const GraphNode& node = graph.nodes[j];
    try {
      node_values[j] = eval_with_refs(node, new_of);
    } catch (const DivisionByZeroError&) {
      throw ConstraintViolatedError("substituted step " + std::to_string(j) +
                                    " divides by zero");
    }
    if (constraints.require_nonnegative && node_values[j].is_negative()) {
      throw ConstraintViolatedError("step " + std::to_string(j) + " becomes negative");
    }
    if (constraints.require_integer_where_original_integer && node.value.is_integer() &&
        !node_values[j].is_integer()) {
      throw ConstraintViolatedError("step " + std::to_string(j) +
                                    " loses integrality: " +
                                    canonical_string(node_values[j]));
    }
  }

  auto edit_for = [&](const std::string& text, const Span& span, const ExactValue& before,
                      const ExactValue& after) -> Edit {
    if (after == before) return {span, text.substr(span.begin, span.length())};
    return {span, render_like(text, span, after)};
  };

  std::vector<Edit> question_edits;
  for (std::size_t s = 0; s < graph.inputs.size(); ++s) {
    const InputSlot& slot = graph.inputs[s];
    question_edits.push_back(
        edit_for(record.question, slot.question_span, slot.value, assignment[s]));
    for (const Span& extra : slot.extra_question_spans) {
      question_edits.push_back(edit_for(record.question, extra, slot.value, assignment[s]));
    }
  }
  std::string new_question = splice(record.question, std::move(question_edits));

  std::vector<Edit> solution_edits;
  for (std::size_t j = 0; j < graph.nodes.size(); ++j) {
    const GraphNode& node = graph.nodes[j];
    const Annotation& a = record.annotations[node.annotation_index];
    std::vector<const ExprNode*> lits = literal_nodes(*node.ast);
    for (std::size_t k = 0; k < lits.size(); ++k) {
      Span abs{a.expr_span.begin + lits[k]->span.begin,
               a.expr_span.begin + lits[k]->span.end};
      solution_edits.push_back(edit_for(record.solution, abs, lits[k]->literal,
                                        new_of(node.literal_refs[k])));
    }
    solution_edits.push_back(edit_for(record.solution, result_numeral_span(a),
                                      node.value, node_values[j]));
  }
  for (const ProseSite& site : graph.prose_sites) {
    solution_edits.push_back(
        edit_for(record.solution, site.span, old_of(site.ref), new_of(site.ref)));
  }
  solution_edits.push_back(edit_for(record.solution, record.final_answer_span,
                                    graph.nodes[graph.root].value,
                                    node_values[graph.root]));
  std::string new_solution = splice(record.solution, std::move(solution_edits));

  GsmRecord out = parse_record(record.id, std::move(new_question), std::move(new_solution));
  std::vector<ValidationIssue> issues = validate_annotations(out);
  if (!issues.empty()) {
    throw InternalError("substitution broke annotation " +
                        std::to_string(issues.front().annotation_index) + ": " +
                        issues.front().reason);
  }
  return out;
}

VariantSet gen_variants(const GsmRecord& record, const PerturbPolicy& policy) {
  if (policy.variants < 1) throw ConfigError("policy.variants must be >= 1");
  if (policy.kind == PerturbPolicy::Kind::digit_expand && policy.extra_digits < 1) {
    throw ConfigError("digit_expand requires extra_digits >= 1");
  }

  ComputationGraph graph = build_graph(record);
  const std::string signature = graph.signature();

  // Each input is a mantissa over a power-of-ten denominator; resampling
  // swaps the mantissa within its digit class and keeps the scale, so
  // decimal inputs stay decimals with the same precision.
  struct SlotShape {
    int digits = 1;
    int scale = 0;
  };
  std::vector<SlotShape> shapes;
  shapes.reserve(graph.inputs.size());
  for (const InputSlot& slot : graph.inputs) {
    SlotShape sh;
    BigInt den = slot.value.denominator();
    while (den % 10 == 0) {
      den /= 10;
      ++sh.scale;
    }
    if (den != 1) throw InternalError("question numeral with non-decimal denominator");
    sh.digits = digit_count(slot.value.numerator());
    if (policy.kind == PerturbPolicy::Kind::digit_expand) sh.digits += policy.extra_digits;
    if (sh.digits > 18) throw ConfigError("digit class exceeds 18 digits");
    shapes.push_back(sh);
  }

  Rng rng = derive_stream(policy.seed, {"perturb", record.id});
  VariantSet out;
  out.report.requested = policy.variants;
  std::unordered_set<std::string> seen{record.question};

  for (std::size_t k = 0; k < policy.variants; ++k) {
    for (int attempt = 0; attempt < policy.max_retries_per_variant; ++attempt) {
      Assignment assignment;
      assignment.reserve(graph.inputs.size());
      for (const SlotShape& sh : shapes) {
        std::uint64_t m = sh.digits == 1
                              ? rng.uniform_below(10)
                              : rng.uniform_in(pow10_u64(sh.digits - 1),
                                               pow10_u64(sh.digits) - 1);
        assignment.push_back(ExactValue(BigInt(m), pow10(sh.scale)));
      }

      bool ambiguous = false;
      for (const InertNumeral& inert : graph.inert) {
        for (std::size_t s = 0; s < graph.inputs.size() && !ambiguous; ++s) {
          ambiguous = assignment[s] != graph.inputs[s].value &&
                      inert.value == graph.inputs[s].value;
        }
        if (ambiguous) break;
      }
      if (ambiguous) {
        ++out.report.rejected_guard;
        continue;
      }

      GsmRecord candidate;
      try {
        candidate = substitute(graph, record, assignment, policy.constraints);
      } catch (const ConstraintViolatedError&) {
        ++out.report.rejected_constraint;
        continue;
      }
      if (seen.count(candidate.question) != 0) {
        ++out.report.rejected_duplicate;
        continue;
      }
      bool same_shape = false;
      try {
        same_shape = build_graph(candidate).signature() == signature;
      } catch (const Error&) {
        same_shape = false;
      }
      if (!same_shape) {
        ++out.report.rejected_structure;
        continue;
      }

      char suffix[8];
      std::snprintf(suffix, sizeof(suffix), "-v%02zu",
                    static_cast<std::size_t>(out.records.size()));
      candidate.id = record.id + suffix;
      seen.insert(candidate.question);
      out.records.push_back(std::move(candidate));
      break;
    }
  }
  out.report.produced = out.records.size();
  return out;
}

}  // namespace abacus

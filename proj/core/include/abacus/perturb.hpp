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

#include <cstdint>
#include <string>
#include <vector>

#include "abacus/exact_value.hpp"
#include "abacus/expr.hpp"
#include "abacus/gsm_record.hpp"

namespace abacus {

/// What an annotation operand (or a tracked prose numeral) stands for.
struct OperandRef {
  enum class Kind { input, node, constant };
  Kind kind = Kind::constant;
  std::size_t index = 0;  // input slot or node index
  ExactValue constant;    // Kind::constant only
};

/// A question quantity that feeds the computation. Every question numeral
/// with this value belongs to the slot: they denote the same quantity, so
/// substitution rewrites them together.
struct InputSlot {
  ExactValue value;
  Span question_span;                       // earliest occurrence
  std::vector<Span> extra_question_spans;   // equal-value repeats
};

/// One annotation's calculation. The AST is kept whole (annotations may
/// chain several operators); literal_refs runs parallel to
/// literal_nodes(*ast) and records what each literal is bound to.
struct GraphNode {
  std::size_t annotation_index = 0;
  ExprPtr ast;
  std::vector<OperandRef> literal_refs;
  ExactValue value;  // evaluated under the original inputs
};

/// A solution numeral outside the annotation tokens that tracks a graph
/// quantity (operand restatements like "38 + 6 =", result echoes like
/// ">>44", restated totals). Rewritten on substitution.
struct ProseSite {
  Span span;  // in the solution
  OperandRef ref;
};

/// A numeral bound to nothing. Left untouched by substitution; a variant
/// that changes an input to collide with one of these is ambiguous and gets
/// rejected.
struct InertNumeral {
  bool in_question = false;
  Span span;
  ExactValue value;
};

/// Dataflow extracted from an annotated record: question inputs feed
/// operation nodes, the root node produces the final answer. Substitution
/// recomputes every node exactly, so variants stay numerically consistent.
struct ComputationGraph {
  std::vector<InputSlot> inputs;
  std::vector<GraphNode> nodes;
  std::size_t root = 0;
  std::vector<ProseSite> prose_sites;
  std::vector<InertNumeral> inert;

  /// Topology + operators + binding shape, input values abstracted away.
  /// Two records have isomorphic graphs iff their signatures are equal.
  std::string signature() const;
};

/// Binds each annotation operand, in order of preference, to (a) the
/// earliest prior node with the same value not yet consumed by another
/// operand, (b) the question numeral with the same value, else (c) a fixed
/// constant. The root is the last node whose value equals the final answer.
/// Throws NoRootError when no node matches the final answer; expression
/// and evaluation failures propagate (ExprParseError, DivisionByZeroError).
ComputationGraph build_graph(const GsmRecord& record);

struct PerturbConstraints {
  bool require_nonnegative = true;
  bool require_integer_where_original_integer = true;
};

/// New input values, indexed like graph.inputs.
using Assignment = std::vector<ExactValue>;

/// Rewrites the record under `assignment`: input spans in the question,
/// annotation literals and results, tracked prose numerals and the final
/// answer all move together. Sites whose value is unchanged keep their
/// original text, so the identity assignment returns a byte-identical
/// record. The result is re-parsed and re-validated before it is returned.
/// Throws ConstraintViolatedError when a recomputed value breaks the
/// constraints (or a division hits zero).
GsmRecord substitute(const ComputationGraph& graph, const GsmRecord& record,
                     const Assignment& assignment,
                     const PerturbConstraints& constraints = {});

struct PerturbPolicy {
  enum class Kind { substitute, digit_expand };

  Kind kind = Kind::substitute;
  int extra_digits = 1;  // digit_expand: added to each input's digit count
  std::size_t variants = 50;
  std::uint64_t seed = 0;
  PerturbConstraints constraints;
  int max_retries_per_variant = 100;
};

struct VariantReport {
  std::size_t requested = 0;
  std::size_t produced = 0;
  std::size_t rejected_constraint = 0;
  std::size_t rejected_duplicate = 0;
  std::size_t rejected_guard = 0;
  std::size_t rejected_structure = 0;

  bool shortfall() const { return produced < requested; }
};

struct VariantSet {
  std::vector<GsmRecord> records;
  VariantReport report;
};

/// Up to policy.variants distinct variants of `record`. Inputs are resampled
/// uniformly within their digit class (plus extra_digits when expanding);
/// draws that violate constraints, duplicate an earlier question, collide
/// with an inert numeral, or change the graph's shape are rejected and
/// retried up to max_retries_per_variant times each. Deterministic in
/// (policy.seed, record.id). A short list is reported, not thrown.
VariantSet gen_variants(const GsmRecord& record, const PerturbPolicy& policy);

}  // namespace abacus

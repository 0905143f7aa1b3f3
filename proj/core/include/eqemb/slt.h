// Copyright 2026 The eqemb Authors. All Rights Reserved.
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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqemb/vocabulary.h"

namespace eqemb {

// Spatial relation between two symbols of a layout tree.
enum class Relation : char {
  kNext = 'n',    // to the right
  kAbove = 'a',   // superscript
  kUnder = 'u',   // subscript, denominator
  kOver = 'o',    // numerator
  kWithin = 'w',  // radicand, braced group, accent or environment body
};

enum class NodeKind { kSymbol, kGroup, kFraction, kScriptCarrier, kRoot, kOperatorName };

struct MathNode;
using MathRow = std::vector<MathNode>;  // horizontal chain linked by `next`

// One symbol of a symbol layout tree. Each slot holds a row.
struct MathNode {
  NodeKind kind = NodeKind::kSymbol;
  std::string symbol;
  MathRow above;
  MathRow under;
  MathRow over;
  MathRow within;

  friend bool operator==(const MathNode&, const MathNode&) = default;
};

enum class ParseMode {
  kStrict,   // unknown commands are errors
  kLenient,  // unknown commands become opaque symbols
};

// Parses display-math content (no delimiters) into a layout row.
// Throws ParseError on unbalanced braces, and in strict mode on unknown
// commands.
MathRow parse_math(std::string_view latex, ParseMode mode = ParseMode::kLenient);

struct SltTuple {
  std::string from;
  std::string to;
  Relation relation = Relation::kNext;

  friend bool operator==(const SltTuple&, const SltTuple&) = default;
};

// Depth-first emission: for each node, its above/over/under/within slots in
// that order (each followed by the slot's subtree), then its `next` links.
// Every symbol is linked to the first `symbol_window` symbols of each chain.
std::vector<SltTuple> slt_tuples(const MathRow& row, std::size_t symbol_window = 1);

// "(from,to,rel)" with ',', '(', ')', '%' and whitespace percent-escaped.
std::string unit_string(const SltTuple& tuple);
SltTuple parse_unit_string(std::string_view unit);

struct SltTupleSequence {
  std::uint32_t eq_id = 0;
  std::vector<SltTuple> tuples;
  std::vector<std::string> units;  // unit_string of each tuple
};

SltTupleSequence tokenize_equation(std::uint32_t eq_id, std::string_view latex,
                                   ParseMode mode = ParseMode::kLenient,
                                   std::size_t symbol_window = 1);

// Marks a unit dropped by the frequency threshold.
inline constexpr std::uint32_t kUnitGap = 0xFFFFFFFFu;

struct UnitCorpus {
  Vocabulary vocabulary{VocabularyKind::kUnit};
  // Unit id sequence per input sequence, in input order.
  std::vector<std::vector<std::uint32_t>> sequences;
};

// weights[i] multiplies the counts of sequences[i] (the equation's
// occurrence count); empty weights mean 1 each. Throws Error(kInput) on an
// empty sequence set.
UnitCorpus build_unit_vocabulary(std::span<const SltTupleSequence> sequences,
                                 std::span<const std::uint32_t> weights = {},
                                 std::uint64_t min_count = 1);

}  // namespace eqemb

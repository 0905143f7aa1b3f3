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

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "eqemb/error.h"
#include "eqemb/rng.h"
#include "eqemb/slt.h"
#include "eqemb/synthetic.h"

namespace eqemb {
namespace {

MathNode sym(std::string s, NodeKind kind = NodeKind::kSymbol) {
  MathNode n;
  n.kind = kind;
  n.symbol = std::move(s);
  return n;
}

std::vector<std::string> units_of(std::string_view latex, std::size_t window = 1) {
  return tokenize_equation(0, latex, ParseMode::kLenient, window).units;
}

// Independent emitter: an explicit work stack instead of recursion. A work
// item expands one slot of node i of a row, or (phase 4) emits its next links.
std::vector<SltTuple> reemit(const MathRow& root, std::size_t window) {
  std::vector<SltTuple> out;
  struct Work {
    const MathRow* row;
    std::size_t i;
    int phase;  // 0..3: slots a, o, u, w; 4: next links
  };
  std::vector<Work> stack;
  for (std::size_t i = root.size(); i-- > 0;) stack.push_back({&root, i, 0});
  while (!stack.empty()) {
    Work w = stack.back();
    stack.pop_back();
    const MathNode& n = (*w.row)[w.i];
    if (w.phase == 4) {
      for (std::size_t k = 1; k <= window && w.i + k < w.row->size(); ++k) {
        out.push_back({n.symbol, (*w.row)[w.i + k].symbol, Relation::kNext});
      }
      continue;
    }
    const MathRow* slots[] = {&n.above, &n.over, &n.under, &n.within};
    const Relation rels[] = {Relation::kAbove, Relation::kOver, Relation::kUnder,
                             Relation::kWithin};
    const MathRow& child = *slots[w.phase];
    stack.push_back({w.row, w.i, w.phase + 1});
    if (child.empty()) continue;
    for (std::size_t k = 0; k < window && k < child.size(); ++k) {
      out.push_back({n.symbol, child[k].symbol, rels[w.phase]});
    }
    for (std::size_t i = child.size(); i-- > 0;) stack.push_back({&child, i, 0});
  }
  return out;
}

std::vector<std::string> split_units(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string u; in >> u;) out.push_back(u);
  return out;
}

struct GoldenRow {
  std::string latex;
  std::vector<std::string> units;
};

std::vector<GoldenRow> golden_rows() {
  std::ifstream in(std::string(EQEMB_TEST_DATA_DIR) + "/slt_golden.tsv");
  std::vector<GoldenRow> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    rows.push_back({line.substr(0, tab), split_units(line.substr(tab + 1))});
  }
  return rows;
}

TEST(SltGolden, FixtureReproducesBitExact) {
  const auto rows = golden_rows();
  ASSERT_EQ(rows.size(), 30u);
  for (const auto& row : rows) EXPECT_EQ(units_of(row.latex), row.units) << row.latex;
}

TEST(SltGolden, FixtureCoversRequiredStructures) {
  std::set<char> relations;
  bool fraction = false, radical = false, big_op = false, script = false;
  for (const auto& row : golden_rows()) {
    for (const auto& u : row.units) {
      const SltTuple t = parse_unit_string(u);
      relations.insert(static_cast<char>(t.relation));
      fraction |= t.from == "frac";
      radical |= t.from == "sqrt";
      big_op |= t.from == "\\sum" || t.from == "\\prod" || t.from == "\\int";
      script |= t.relation == Relation::kAbove || t.relation == Relation::kUnder;
    }
  }
  EXPECT_TRUE(fraction && radical && big_op && script);
  EXPECT_EQ(relations, (std::set<char>{'n', 'a', 'u', 'o', 'w'}));
}

TEST(SltGolden, IndependentEmitterAgreesOnFixture) {
  for (const auto& row : golden_rows()) {
    for (std::size_t window : {1, 2, 3}) {
      const MathRow tree = parse_math(row.latex);
      EXPECT_EQ(slt_tuples(tree, window), reemit(tree, window)) << row.latex;
    }
  }
}

TEST(SltParse, SuperscriptGoesAbove) {
  MathNode x = sym("x");
  x.above = {sym("2")};
  EXPECT_EQ(parse_math("x^2"), MathRow{x});
}

TEST(SltParse, FractionSlots) {
  MathNode f = sym("frac", NodeKind::kFraction);
  f.over = {sym("a")};
  f.under = {sym("b")};
  EXPECT_EQ(parse_math("\\frac{a}{b}"), MathRow{f});
}

TEST(SltParse, SumWithLimitsMatchesHandBuiltTree) {
  MathNode sum = sym("\\sum");
  sum.under = {sym("i"), sym("="), sym("1")};
  sum.above = {sym("n")};
  MathNode x = sym("x");
  x.under = {sym("i")};
  EXPECT_EQ(parse_math("\\sum_{i=1}^{n} x_i"), (MathRow{sum, x}));
}

TEST(SltParse, StrictModeRejectsUnknownCommands) {
  EXPECT_THROW(parse_math("\\foo x", ParseMode::kStrict), ParseError);
  const MathRow lenient = parse_math("\\foo x", ParseMode::kLenient);
  ASSERT_EQ(lenient.size(), 2u);
  EXPECT_EQ(lenient[0].symbol, "\\foo");
}

TEST(SltParse, UnbalancedBracesReportOffset) {
  try {
    parse_math("x^{2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(parse_math("x}"), ParseError);
}

TEST(SltTuples, SuperscriptIsOneAboveTuple) {
  EXPECT_EQ(slt_tuples(parse_math("x^2")), (std::vector<SltTuple>{{"x", "2", Relation::kAbove}}));
}

TEST(SltTuples, AdjacencyChain) {
  EXPECT_EQ(slt_tuples(parse_math("a+b")),
            (std::vector<SltTuple>{{"a", "+", Relation::kNext}, {"+", "b", Relation::kNext}}));
}

TEST(SltTuples, FractionNumeratorThenDenominator) {
  EXPECT_EQ(slt_tuples(parse_math("\\frac{a}{b}")),
            (std::vector<SltTuple>{{"frac", "a", Relation::kOver},
                                   {"frac", "b", Relation::kUnder}}));
}

TEST(SltTuples, WiderSymbolWindowLinksFurtherSymbols) {
  const auto tuples = slt_tuples(parse_math("a+b"), 2);
  EXPECT_EQ(tuples, (std::vector<SltTuple>{{"a", "+", Relation::kNext},
                                           {"a", "b", Relation::kNext},
                                           {"+", "b", Relation::kNext}}));
}

TEST(SltUnits, EscapesDelimiters) {
  const SltTuple t{"(", "a,b", Relation::kNext};
  EXPECT_EQ(unit_string(t), "(%28,a%2Cb,n)");
  EXPECT_EQ(parse_unit_string(unit_string(t)), t);
}

TEST(SltUnits, MalformedUnitIsRejected) {
  EXPECT_THROW(parse_unit_string("(a,b)"), Error);
  EXPECT_THROW(parse_unit_string("(a,b,q)"), Error);
}

// Symbols drawn from a pool that exercises the escape set.
TEST(SltProperty, UnitStringRoundTrip) {
  const std::vector<std::string> pool = {"x", "(", ")", ",", "%", "\\alpha", "a b",
                                         "{}", "frac", "%2C", "\t", "|"};
  const Relation rels[] = {Relation::kNext, Relation::kAbove, Relation::kUnder, Relation::kOver,
                           Relation::kWithin};
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const SltTuple t{pool[rng.below(pool.size())] + pool[rng.below(pool.size())],
                     pool[rng.below(pool.size())], rels[rng.below(5)]};
    const std::string u = unit_string(t);
    EXPECT_EQ(u.find_first_of(" \t\n"), std::string::npos);
    EXPECT_EQ(parse_unit_string(u), t);
  }
}

std::string respace(const std::string& latex, Rng& rng) {
  // Spaces may go anywhere except inside a command name or between a
  // backslash and its name.
  std::string out;
  for (std::size_t i = 0; i < latex.size(); ++i) {
    out.push_back(latex[i]);
    const bool in_command = std::isalpha(static_cast<unsigned char>(latex[i])) &&
                            i + 1 < latex.size() &&
                            std::isalpha(static_cast<unsigned char>(latex[i + 1]));
    if (latex[i] == '\\' || in_command) continue;
    if (rng.below(3) == 0) out += rng.below(2) ? " " : "\n  ";
  }
  return out;
}

TEST(SltProperty, TupleSequenceIgnoresWhitespace) {
  Rng rng(11);
  const SyntheticCorpus corpus = generate_synthetic_corpus({});
  std::size_t checked = 0;
  for (const auto& [latex, cls] : corpus.equation_class) {
    const auto base = units_of(latex);
    EXPECT_EQ(units_of(respace(latex, rng)), base) << latex;
    if (++checked == 200) break;
  }
  for (const auto& row : golden_rows()) {
    EXPECT_EQ(units_of(respace(row.latex, rng)), row.units) << row.latex;
  }
}

TEST(SltProperty, DeterministicForIdenticalInput) {
  for (const auto& row : golden_rows()) {
    EXPECT_EQ(tokenize_equation(1, row.latex).tuples, tokenize_equation(2, row.latex).tuples);
  }
}

// Every symbol with a neighbor (a slot child, a parent or a next item)
// shows up in some tuple.
void collect_linked(const MathRow& row, bool has_parent, std::multiset<std::string>& out) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    const MathNode& n = row[i];
    const bool has_child =
        !n.above.empty() || !n.under.empty() || !n.over.empty() || !n.within.empty();
    if (row.size() > 1 || has_child || (i == 0 && has_parent)) out.insert(n.symbol);
    collect_linked(n.above, true, out);
    collect_linked(n.under, true, out);
    collect_linked(n.over, true, out);
    collect_linked(n.within, true, out);
  }
}

TEST(SltProperty, EveryLinkedSymbolAppearsInATuple) {
  for (const auto& row : golden_rows()) {
    const MathRow tree = parse_math(row.latex);
    std::multiset<std::string> linked;
    collect_linked(tree, false, linked);
    std::set<std::string> seen;
    for (const auto& t : slt_tuples(tree)) {
      seen.insert(t.from);
      seen.insert(t.to);
    }
    for (const auto& s : linked) EXPECT_TRUE(seen.count(s)) << row.latex << " missing " << s;
  }
}

TEST(UnitVocabulary, SharedUnitCountsAcrossEquations) {
  const std::vector<SltTupleSequence> seqs = {tokenize_equation(0, "x^2"),
                                              tokenize_equation(1, "x^2+y")};
  const UnitCorpus uc = build_unit_vocabulary(seqs);
  const auto id = uc.vocabulary.find("(x,2,a)");
  ASSERT_TRUE(id.has_value());
  EXPECT_EQ(uc.vocabulary.freq(*id), 2u);
  EXPECT_EQ(uc.sequences[0][0], uc.sequences[1][0]);
}

TEST(UnitVocabulary, MinCountOneDropsNothing) {
  const std::vector<SltTupleSequence> seqs = {tokenize_equation(0, "a+b"),
                                              tokenize_equation(1, "\\frac{c}{d}")};
  const UnitCorpus uc = build_unit_vocabulary(seqs, {}, 1);
  EXPECT_EQ(uc.vocabulary.size(), 4u);
  for (const auto& s : uc.sequences) {
    for (auto u : s) EXPECT_NE(u, kUnitGap);
  }
}

TEST(UnitVocabulary, ThresholdLeavesGaps) {
  const std::vector<SltTupleSequence> seqs = {tokenize_equation(0, "x^2"),
                                              tokenize_equation(1, "x^2+y")};
  const UnitCorpus uc = build_unit_vocabulary(seqs, {}, 2);
  EXPECT_EQ(uc.vocabulary.size(), 1u);
  EXPECT_EQ(uc.sequences[1][1], kUnitGap);
}

TEST(UnitVocabulary, WeightsMultiplyCounts) {
  const std::vector<SltTupleSequence> seqs = {tokenize_equation(0, "x^2")};
  const std::vector<std::uint32_t> weights = {5};
  const UnitCorpus uc = build_unit_vocabulary(seqs, weights);
  EXPECT_EQ(uc.vocabulary.freq(0), 5u);
}

TEST(UnitVocabulary, EmptyInputIsAnInputError) {
  EXPECT_THROW(build_unit_vocabulary(std::span<const SltTupleSequence>{}), Error);
}

}  // namespace
}  // namespace eqemb

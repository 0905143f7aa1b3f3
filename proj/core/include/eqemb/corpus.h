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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "eqemb/vocabulary.h"

namespace eqemb {

struct RawDocument {
  std::string doc_id;
  std::string source_text;
};

// ---------------------------------------------------------------------------
// Display-math extraction

// One display-math region of the source that produced at least one equation.
// Multi-line environments (align, eqnarray) yield one equation per line.
struct DisplayRegion {
  std::size_t source_begin = 0;
  std::size_t source_end = 0;  // one past the closing delimiter
  std::uint32_t first_equation = 0;
  std::uint32_t equation_count = 0;
};

struct ExtractedDocument {
  std::string doc_id;
  // Source with every extracted region replaced by its placeholder run.
  std::string prose;
  // Normalized latex, indexed by the local ordinal carried in placeholders.
  std::vector<std::string> equations;
  std::vector<DisplayRegion> regions;
  std::size_t skipped_regions = 0;
  std::vector<std::string> warnings;
};

// Pure per-document step; safe to run on many documents concurrently.
ExtractedDocument extract_display_equations(const RawDocument& doc);

// Collapses whitespace runs to one space, trims, and strips \label{...},
// \nonumber and \notag.
std::string normalize_equation(std::string_view latex);

// Placeholder text substituted for one display region.
std::string region_placeholder(const DisplayRegion& region);

// Inverse of extraction: puts the original source text of every region back.
std::string restore_display_math(const ExtractedDocument& doc,
                                 std::string_view source);

struct EquationRecord {
  std::uint32_t eq_id = 0;
  std::string doc_id;  // first document the equation was seen in
  std::string latex;
  std::uint32_t occurrence_count = 0;
};

// Corpus-wide deduplicating registry. Feed documents in doc_id order for a
// deterministic id assignment.
class EquationRegistry {
 public:
  // Returns the global eq_id for each local equation of the document.
  std::vector<std::uint32_t> add_document(const ExtractedDocument& doc);

  std::uint32_t intern(const std::string& latex, std::string_view doc_id);

  // Rebuilds a record verbatim (used when loading a bundle).
  void restore(EquationRecord record);

  const EquationRecord& at(std::uint32_t eq_id) const { return records_.at(eq_id); }
  std::size_t size() const { return records_.size(); }
  const std::vector<EquationRecord>& records() const { return records_; }
  std::uint64_t total_occurrences() const;

 private:
  std::vector<EquationRecord> records_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// ---------------------------------------------------------------------------
// Word tokenization

struct RawToken {
  enum class Kind { kWord, kEquation };
  Kind kind = Kind::kWord;
  std::string text;             // lowercased word; empty for equations
  std::uint32_t equation = 0;   // local equation ordinal

  static RawToken word(std::string w) { return {Kind::kWord, std::move(w), 0}; }
  static RawToken eq(std::uint32_t local) { return {Kind::kEquation, {}, local}; }
  bool is_word() const { return kind == Kind::kWord; }
  friend bool operator==(const RawToken&, const RawToken&) = default;
};

// Lowercased alphabetic tokens (letters with optional internal hyphens) in
// document order. LaTeX commands, comments, inline math and the arguments of
// reference-like commands are dropped; placeholders come through as
// equation tokens.
std::vector<RawToken> tokenize_words(std::string_view prose);

// ---------------------------------------------------------------------------
// Word vocabulary

struct WordFilterParams {
  std::uint64_t min_tf = 10;
  std::size_t min_len = 4;
  std::size_t top_stop = 25;
  std::size_t abbrev_top = 50;
  std::size_t abbrev_len = 3;
};

// Optional extra predicate, e.g. a part-of-speech gate. Returning false
// rejects the form.
using TokenFilterHook = std::function<bool(std::string_view)>;

using WordCounts = std::map<std::string, std::uint64_t>;

WordCounts count_words(std::span<const std::vector<RawToken>> token_lists);

// The frequency-rank rules (top-N stop list, top-N abbreviations) resolved
// against one corpus. Applying a resolved filter is idempotent.
struct WordFilter {
  WordFilterParams params;
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> frequency_stops;
  std::unordered_set<std::string> abbreviations;
  TokenFilterHook hook;

  bool admits(const std::string& form, std::uint64_t tf) const;
};

WordFilter resolve_word_filter(const WordCounts& counts,
                               const std::unordered_set<std::string>& stopwords,
                               const WordFilterParams& params,
                               TokenFilterHook hook = {});

Vocabulary apply_word_filter(const WordFilter& filter, const WordCounts& counts);

// Throws Error(kInput, "empty corpus") when no word tokens exist.
Vocabulary build_word_vocabulary(
    std::span<const std::vector<RawToken>> token_lists,
    const std::unordered_set<std::string>& stopwords,
    const WordFilterParams& params = {}, TokenFilterHook hook = {});

// The English stopword list shipped with the library.
const std::unordered_set<std::string>& default_stopwords();

// ---------------------------------------------------------------------------
// Token streams

// A positioned stream entry packed into 32 bits: word ids are plain, equation
// ids carry the high bit, and all-ones marks a gap.
class Item {
 public:
  static constexpr std::uint32_t kEquationTag = 0x80000000u;
  static constexpr std::uint32_t kGapValue = 0xFFFFFFFFu;
  static constexpr std::uint32_t kMaxId = 0x7FFFFFFEu;

  constexpr Item() : raw_(kGapValue) {}

  static constexpr Item word(std::uint32_t id) { return Item(id); }
  static constexpr Item equation(std::uint32_t id) { return Item(id | kEquationTag); }
  static constexpr Item gap() { return Item(); }
  static constexpr Item from_raw(std::uint32_t raw) { return Item(raw); }

  constexpr bool is_gap() const { return raw_ == kGapValue; }
  constexpr bool is_equation() const { return !is_gap() && (raw_ & kEquationTag); }
  constexpr bool is_word() const { return !(raw_ & kEquationTag); }
  constexpr std::uint32_t id() const { return raw_ & ~kEquationTag; }
  constexpr std::uint32_t raw() const { return raw_; }

  friend constexpr bool operator==(Item, Item) = default;

 private:
  constexpr explicit Item(std::uint32_t raw) : raw_(raw) {}
  std::uint32_t raw_;
};

struct TokenStream {
  std::string doc_id;
  std::vector<Item> items;

  friend bool operator==(const TokenStream&, const TokenStream&) = default;
};

// local_equations maps each local equation ordinal of the document to its
// global eq_id. Throws Error(kInvalidArgument) on an unknown ordinal.
TokenStream build_token_stream(std::string doc_id,
                               std::span<const RawToken> tokens,
                               const Vocabulary& words,
                               std::span<const std::uint32_t> local_equations);

// ---------------------------------------------------------------------------
// Held-out sets

enum class Split { kValidation, kTest };

struct HeldOutItem {
  Split split = Split::kValidation;
  std::uint32_t eq_id = 0;
  std::uint32_t doc = 0;       // index into the stream list
  std::uint32_t position = 0;  // index into that stream's items
  std::uint32_t target = 0;    // word id
  std::vector<Item> context;   // window words followed by the equation
  std::vector<std::uint32_t> negatives;

  friend bool operator==(const HeldOutItem&, const HeldOutItem&) = default;
};

struct HeldOutParams {
  std::size_t per_equation = 2;
  std::size_t context_window = 4;
  std::size_t n_negatives = 10;
  // Singletons sampled into scope; every repeated equation is always in
  // scope. Zero means all singletons.
  std::size_t singleton_sample = 2000;
  std::uint64_t seed = 1;
};

struct HeldOutSets {
  std::vector<HeldOutItem> validation;
  std::vector<HeldOutItem> test;
  std::size_t equations_in_scope = 0;
  std::size_t skipped_equations = 0;  // too few surrounding words
};

HeldOutSets build_heldout(std::span<const TokenStream> streams,
                          const EquationRegistry& registry,
                          std::size_t word_vocab_size,
                          const HeldOutParams& params);

// (doc, position) keys of held-out targets, excluded from training.
class HeldOutMask {
 public:
  HeldOutMask() = default;
  explicit HeldOutMask(const HeldOutSets& sets);

  bool contains(std::uint32_t doc, std::uint32_t position) const {
    return keys_.count(key(doc, position)) != 0;
  }
  std::size_t size() const { return keys_.size(); }

 private:
  static std::uint64_t key(std::uint32_t doc, std::uint32_t pos) {
    return (static_cast<std::uint64_t>(doc) << 32) | pos;
  }
  std::unordered_set<std::uint64_t> keys_;
};

}  // namespace eqemb

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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace eqemb {

enum class VocabularyKind { kWord, kUnit };

// Bidirectional map between surface forms and dense ids 0..V-1, each with a
// corpus frequency.
class Vocabulary {
 public:
  struct Entry {
    std::string form;
    std::uint64_t freq = 0;
  };

  explicit Vocabulary(VocabularyKind kind = VocabularyKind::kWord)
      : kind_(kind) {}

  // Builds a vocabulary whose ids follow descending frequency, ties broken by
  // ascending form. Forms must be unique.
  static Vocabulary from_counts(
      VocabularyKind kind,
      std::vector<std::pair<std::string, std::uint64_t>> counts);

  // Appends with the next dense id. Throws on a duplicate form.
  std::uint32_t add(std::string form, std::uint64_t freq);

  std::optional<std::uint32_t> find(std::string_view form) const;
  bool contains(std::string_view form) const { return find(form).has_value(); }

  const std::string& form(std::uint32_t id) const { return entries_.at(id).form; }
  std::uint64_t freq(std::uint32_t id) const { return entries_.at(id).freq; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  VocabularyKind kind() const { return kind_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::vector<double> frequencies() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b);

 private:
  VocabularyKind kind_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace eqemb

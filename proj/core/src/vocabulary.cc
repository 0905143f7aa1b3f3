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

#include "eqemb/vocabulary.h"

#include <algorithm>

#include "eqemb/error.h"

namespace eqemb {

Vocabulary Vocabulary::from_counts(
    VocabularyKind kind,
    std::vector<std::pair<std::string, std::uint64_t>> counts) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab(kind);
  for (auto& [form, freq] : counts) vocab.add(std::move(form), freq);
  return vocab;
}

std::uint32_t Vocabulary::add(std::string form, std::uint64_t freq) {
  const auto id = static_cast<std::uint32_t>(entries_.size());
  auto [it, inserted] = index_.emplace(form, id);
  if (!inserted) {
    throw Error(ErrorKind::kInvalidArgument, "duplicate vocabulary form: " + form);
  }
  entries_.push_back({std::move(form), freq});
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view form) const {
  auto it = index_.find(std::string(form));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> Vocabulary::frequencies() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(static_cast<double>(e.freq));
  return out;
}

bool operator==(const Vocabulary& a, const Vocabulary& b) {
  if (a.kind_ != b.kind_ || a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i].form != b.entries_[i].form ||
        a.entries_[i].freq != b.entries_[i].freq) {
      return false;
    }
  }
  return true;
}

}  // namespace eqemb

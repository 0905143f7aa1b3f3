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

#include <algorithm>
#include <vector>

#include "eqemb/corpus.h"
#include "eqemb/error.h"

namespace eqemb {
namespace {

using Ranked = std::vector<std::pair<std::string, std::uint64_t>>;

// Descending frequency, ties by ascending form.
void rank(Ranked& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
}

}  // namespace

WordCounts count_words(std::span<const std::vector<RawToken>> token_lists) {
  WordCounts counts;
  for (const auto& tokens : token_lists) {
    for (const RawToken& t : tokens) {
      if (t.is_word()) ++counts[t.text];
    }
  }
  return counts;
}

bool WordFilter::admits(const std::string& form, std::uint64_t tf) const {
  if (stopwords.count(form) || frequency_stops.count(form)) return false;
  if (tf < params.min_tf) return false;
  if (form.size() < params.min_len && !abbreviations.count(form)) return false;
  if (hook && !hook(form)) return false;
  return true;
}

WordFilter resolve_word_filter(const WordCounts& counts,
                               const std::unordered_set<std::string>& stopwords,
                               const WordFilterParams& params,
                               TokenFilterHook hook) {
  WordFilter filter;
  filter.params = params;
  filter.stopwords = stopwords;
  filter.hook = std::move(hook);

  Ranked remaining;
  for (const auto& [form, tf] : counts) {
    if (!stopwords.count(form)) remaining.emplace_back(form, tf);
  }
  rank(remaining);
  const std::size_t n_stop = std::min(params.top_stop, remaining.size());
  for (std::size_t i = 0; i < n_stop; ++i) {
    filter.frequency_stops.insert(remaining[i].first);
  }

  std::size_t taken = 0;
  for (std::size_t i = n_stop; i < remaining.size() && taken < params.abbrev_top; ++i) {
    if (remaining[i].first.size() == params.abbrev_len) {
      filter.abbreviations.insert(remaining[i].first);
      ++taken;
    }
  }
  return filter;
}

Vocabulary apply_word_filter(const WordFilter& filter, const WordCounts& counts) {
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [form, tf] : counts) {
    if (filter.admits(form, tf)) kept.emplace_back(form, tf);
  }
  return Vocabulary::from_counts(VocabularyKind::kWord, std::move(kept));
}

Vocabulary build_word_vocabulary(
    std::span<const std::vector<RawToken>> token_lists,
    const std::unordered_set<std::string>& stopwords,
    const WordFilterParams& params, TokenFilterHook hook) {
  const WordCounts counts = count_words(token_lists);
  if (counts.empty()) throw Error(ErrorKind::kInput, "empty corpus");
  const WordFilter filter =
      resolve_word_filter(counts, stopwords, params, std::move(hook));
  return apply_word_filter(filter, counts);
}

}  // namespace eqemb

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
#include <map>
#include <set>

#include "eqemb/context.h"
#include "eqemb/corpus.h"
#include "eqemb/error.h"
#include "eqemb/rng.h"

namespace eqemb {
namespace {

struct Candidate {
  std::uint32_t doc;
  std::uint32_t effective;  // index into that doc's effective sequence
  std::uint32_t position;   // stream position

  friend bool operator<(const Candidate& a, const Candidate& b) {
    return std::tie(a.doc, a.position) < std::tie(b.doc, b.position);
  }
};

std::vector<std::uint32_t> equations_in_scope(const EquationRegistry& registry,
                                              const HeldOutParams& params) {
  std::vector<std::uint32_t> repeated;
  std::vector<std::uint32_t> singletons;
  for (const auto& r : registry.records()) {
    (r.occurrence_count > 1 ? repeated : singletons).push_back(r.eq_id);
  }
  if (params.singleton_sample != 0 && singletons.size() > params.singleton_sample) {
    Rng rng(derive_seed(params.seed, 1));
    rng.shuffle(singletons);
    singletons.resize(params.singleton_sample);
  }
  std::vector<std::uint32_t> scope = std::move(repeated);
  scope.insert(scope.end(), singletons.begin(), singletons.end());
  std::sort(scope.begin(), scope.end());
  return scope;
}

}  // namespace

HeldOutSets build_heldout(std::span<const TokenStream> streams,
                          const EquationRegistry& registry,
                          std::size_t word_vocab_size,
                          const HeldOutParams& params) {
  if (params.context_window == 0 || params.context_window % 2 != 0) {
    throw Error(ErrorKind::kInvalidArgument, "held-out window must be even and positive");
  }
  if (params.n_negatives > 0 && word_vocab_size < 2) {
    throw Error(ErrorKind::kInvalidArgument, "word vocabulary too small for negatives");
  }
  const std::size_t radius = params.context_window / 2;

  std::vector<std::vector<EffectiveItem>> seqs;
  seqs.reserve(streams.size());
  std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> occurrences;
  for (std::size_t d = 0; d < streams.size(); ++d) {
    seqs.push_back(effective_sequence(streams[d], /*keep_equations=*/true));
    const auto& seq = seqs.back();
    for (std::size_t j = 0; j < seq.size(); ++j) {
      if (seq[j].item.is_equation()) {
        occurrences[seq[j].item.id()].emplace_back(static_cast<std::uint32_t>(d),
                                                   static_cast<std::uint32_t>(j));
      }
    }
  }

  // Window words of a candidate, target excluded.
  auto window_words = [&](const Candidate& c) {
    std::vector<Item> words;
    const auto& seq = seqs[c.doc];
    for_each_in_window(c.effective, radius, seq.size(), [&](std::size_t j) {
      if (seq[j].item.is_word()) words.push_back(seq[j].item);
    });
    return words;
  };

  const std::vector<std::uint32_t> scope = equations_in_scope(registry, params);
  HeldOutSets sets;
  sets.equations_in_scope = scope.size();
  Rng rng(derive_seed(params.seed, 2));
  std::set<std::pair<std::uint32_t, std::uint32_t>> used;

  for (std::uint32_t eq : scope) {
    std::set<Candidate> pool;
    if (auto it = occurrences.find(eq); it != occurrences.end()) {
      for (const auto& [doc, center] : it->second) {
        const auto& seq = seqs[doc];
        for_each_in_window(center, radius, seq.size(), [&](std::size_t j) {
          if (!seq[j].item.is_word()) return;
          const Candidate c{doc, static_cast<std::uint32_t>(j), seq[j].position};
          if (used.count({c.doc, c.position})) return;
          const auto words = window_words(c);
          const Item target = seq[j].item;
          if (words.empty() ||
              std::find(words.begin(), words.end(), target) != words.end()) {
            return;
          }
          pool.insert(c);
        });
      }
    }
    if (pool.size() < 2 * params.per_equation || params.per_equation == 0) {
      ++sets.skipped_equations;
      continue;
    }
    std::vector<Candidate> picks(pool.begin(), pool.end());
    rng.shuffle(picks);
    for (std::size_t k = 0; k < 2 * params.per_equation; ++k) {
      const Candidate& c = picks[k];
      HeldOutItem item;
      item.split = k < params.per_equation ? Split::kValidation : Split::kTest;
      item.eq_id = eq;
      item.doc = c.doc;
      item.position = c.position;
      item.target = seqs[c.doc][c.effective].item.id();
      item.context = window_words(c);
      item.context.push_back(Item::equation(eq));
      while (item.negatives.size() < params.n_negatives) {
        const auto neg = static_cast<std::uint32_t>(rng.below(word_vocab_size));
        if (neg != item.target) item.negatives.push_back(neg);
      }
      used.insert({c.doc, c.position});
      (item.split == Split::kValidation ? sets.validation : sets.test)
          .push_back(std::move(item));
    }
  }
  return sets;
}

HeldOutMask::HeldOutMask(const HeldOutSets& sets) {
  for (const auto& item : sets.validation) keys_.insert(key(item.doc, item.position));
  for (const auto& item : sets.test) keys_.insert(key(item.doc, item.position));
}

}  // namespace eqemb

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

#include "eqemb/context.h"
#include "eqemb/corpus.h"
#include "eqemb/error.h"

namespace eqemb {

std::vector<std::uint32_t> EquationRegistry::add_document(
    const ExtractedDocument& doc) {
  std::vector<std::uint32_t> ids;
  ids.reserve(doc.equations.size());
  for (const std::string& latex : doc.equations) {
    ids.push_back(intern(latex, doc.doc_id));
  }
  return ids;
}

std::uint32_t EquationRegistry::intern(const std::string& latex,
                                       std::string_view doc_id) {
  if (auto it = index_.find(latex); it != index_.end()) {
    ++records_[it->second].occurrence_count;
    return it->second;
  }
  if (records_.size() > Item::kMaxId) {
    throw Error(ErrorKind::kInput, "too many distinct equations");
  }
  const auto id = static_cast<std::uint32_t>(records_.size());
  records_.push_back({id, std::string(doc_id), latex, 1});
  index_.emplace(latex, id);
  return id;
}

void EquationRegistry::restore(EquationRecord record) {
  if (record.eq_id != records_.size() || record.occurrence_count == 0) {
    throw Error(ErrorKind::kCorrupt, "equation records out of order");
  }
  index_.emplace(record.latex, record.eq_id);
  records_.push_back(std::move(record));
}

std::uint64_t EquationRegistry::total_occurrences() const {
  std::uint64_t total = 0;
  for (const auto& r : records_) total += r.occurrence_count;
  return total;
}

TokenStream build_token_stream(std::string doc_id,
                               std::span<const RawToken> tokens,
                               const Vocabulary& words,
                               std::span<const std::uint32_t> local_equations) {
  TokenStream stream;
  stream.doc_id = std::move(doc_id);
  stream.items.reserve(tokens.size());
  for (const RawToken& t : tokens) {
    if (t.is_word()) {
      auto id = words.find(t.text);
      stream.items.push_back(id ? Item::word(*id) : Item::gap());
    } else {
      if (t.equation >= local_equations.size()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "unknown equation placeholder " + std::to_string(t.equation) +
                        " in " + stream.doc_id);
      }
      stream.items.push_back(Item::equation(local_equations[t.equation]));
    }
  }
  return stream;
}

std::vector<EffectiveItem> effective_sequence(const TokenStream& stream,
                                              bool keep_equations) {
  std::vector<EffectiveItem> out;
  out.reserve(stream.items.size());
  for (std::size_t p = 0; p < stream.items.size(); ++p) {
    const Item item = stream.items[p];
    if (item.is_gap()) continue;
    if (item.is_equation() && !keep_equations) continue;
    out.push_back({static_cast<std::uint32_t>(p), item});
  }
  return out;
}

}  // namespace eqemb

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
#include <map>
#include <string>
#include <vector>

#include "eqemb/corpus.h"

namespace eqemb {

// A generated LaTeX corpus with planted structure: each document belongs to
// one class, its prose draws topic words from that class's private word set,
// and its display equations are built from that class's private symbols.
struct SyntheticParams {
  std::size_t documents = 200;
  std::size_t classes = 4;
  std::size_t topic_words = 20;
  std::size_t equations_per_document = 5;
  std::size_t words_per_sentence = 12;
  std::size_t max_terms = 2;  // right-hand sides have 2..max_terms terms
  double topic_rate = 0.2;
  double filler_share = 0.2;  // of the other tokens: content words shared by all classes
  double reuse_rate = 0.1;   // chance an equation repeats an earlier one
  std::uint64_t seed = 8;
};

struct SyntheticCorpus {
  std::vector<RawDocument> documents;
  std::vector<std::size_t> document_class;
  std::vector<std::vector<std::string>> topic_words;  // per class
  std::map<std::string, std::size_t> equation_class;  // normalized latex
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticParams& params = {});

// Writes one `<doc_id>.tex` per document.
void write_corpus_dir(const SyntheticCorpus& corpus, const std::string& dir);

}  // namespace eqemb

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
#include <string>
#include <vector>

#include "eqemb/config.h"
#include "eqemb/corpus.h"
#include "eqemb/slt.h"
#include "eqemb/trainer.h"
#include "eqemb/vocabulary.h"

namespace eqemb {

inline constexpr std::uint32_t kBundleFormatVersion = 1;

// Everything ingest produces: vocabularies, equations and their units,
// token streams and the held-out splits.
struct CorpusBundle {
  IngestConfig config;
  Vocabulary words{VocabularyKind::kWord};
  EquationRegistry equations;
  Vocabulary units{VocabularyKind::kUnit};
  std::vector<std::vector<std::uint32_t>> eq_units;  // per eq_id
  std::vector<TokenStream> streams;
  HeldOutSets heldout;
};

struct IngestStats {
  std::size_t documents = 0;
  std::size_t skipped_regions = 0;
  std::size_t untokenizable_equations = 0;
  std::vector<std::string> warnings;
};

// Every `*.tex` file directly inside `dir`, sorted by doc_id (the file name
// without its extension). Unreadable or empty files are reported in
// `warnings` and left out. Throws Error(kInput) if `dir` is not a directory.
std::vector<RawDocument> read_corpus_dir(const std::string& dir,
                                         std::vector<std::string>* warnings = nullptr);

// Extraction and tokenization run per document (concurrently when
// config.parallel is set); results merge in doc_id order, so the bundle does
// not depend on the thread count. Throws Error(kInput) when no document
// survives or the corpus has no words.
CorpusBundle ingest_documents(std::vector<RawDocument> docs, const IngestConfig& config,
                              IngestStats* stats = nullptr);

// Writes into a temporary sibling directory and renames it into place. An
// existing directory is replaced only if it is empty or holds a bundle.
void write_bundle(const CorpusBundle& bundle, const std::string& dir);
// Throws Error(kCorrupt) on malformed content, Error(kInput) if missing.
CorpusBundle read_bundle(const std::string& dir);

// Column order: documents, words, equations, units.
std::string bundle_summary(const CorpusBundle& bundle);

// The bundle must outlive the returned view.
TrainingData training_data(const CorpusBundle& bundle);

}  // namespace eqemb

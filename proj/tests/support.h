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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "eqemb/bundle.h"
#include "eqemb/embedding.h"
#include "eqemb/rng.h"
#include "eqemb/synthetic.h"

namespace eqemb::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("eqemb_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Tables with every cell drawn uniformly from [-scale, scale].
inline ModelTables random_tables(std::size_t words, std::size_t equations, std::size_t units,
                                 std::size_t dim, Rng& rng, double scale = 0.5) {
  ModelTables t;
  t.dim = dim;
  t.words = EmbeddingTable(ObjectClass::kWord, words, dim);
  t.equations = EmbeddingTable(ObjectClass::kEquation, equations, dim);
  t.units = EmbeddingTable(ObjectClass::kUnit, units, dim);
  t.words.initialize(rng, scale);
  t.equations.initialize(rng, scale);
  t.units.initialize(rng, scale);
  return t;
}

inline void set_row(std::span<double> row, std::initializer_list<double> values) {
  std::size_t k = 0;
  for (double v : values) row[k++] = v;
}

// A small planted corpus, ingested with default settings.
inline CorpusBundle small_bundle(std::size_t documents = 40, std::uint64_t seed = 8) {
  SyntheticParams p;
  p.documents = documents;
  p.seed = seed;
  return ingest_documents(generate_synthetic_corpus(p).documents, IngestConfig{});
}

inline ModelConfig quick_config(Mode mode, std::size_t max_epochs = 3) {
  ModelConfig c;
  c.mode = mode;
  c.dim = 8;
  c.max_epochs = max_epochs;
  c.learning_rate = 0.05;
  return c;
}

}  // namespace eqemb::testing

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

#include "eqemb/synthetic.h"

#include <cctype>
#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "eqemb/error.h"
#include "eqemb/rng.h"

namespace eqemb {
namespace {

struct SymbolPool {
  std::vector<std::string> letters;
  std::vector<std::string> greek;
};

const std::vector<SymbolPool>& symbol_pools() {
  static const std::vector<SymbolPool> pools = {
      {{"a", "b", "c"}, {"\\alpha", "\\beta", "\\gamma"}},
      {{"i", "j", "k"}, {"\\lambda", "\\mu", "\\nu"}},
      {{"p", "q", "r"}, {"\\theta", "\\phi", "\\psi"}},
      {{"u", "v", "w"}, {"\\omega", "\\sigma", "\\tau"}},
      {{"d", "e", "f"}, {"\\delta", "\\epsilon", "\\zeta"}},
      {{"g", "h", "m"}, {"\\eta", "\\kappa", "\\xi"}},
      {{"s", "t", "z"}, {"\\chi", "\\rho", "\\pi"}},
      {{"l", "o", "y"}, {"\\Gamma", "\\Delta", "\\Lambda"}},
  };
  return pools;
}

class Generator {
 public:
  explicit Generator(const SyntheticParams& p) : p_(p), rng_(p.seed) {}

  SyntheticCorpus run() {
    if (p_.classes == 0 || p_.classes > symbol_pools().size()) {
      throw Error(ErrorKind::kInvalidArgument, "synthetic corpus supports 1 to 8 classes");
    }
    SyntheticCorpus c;
    for (std::size_t k = 0; k < p_.classes; ++k) c.topic_words.push_back(words(p_.topic_words, 3));
    glue_ = words(25, 3);
    general_ = words(60, 3);
    abbrevs_ = words(10, 1, /*closed=*/true);
    history_.resize(p_.classes);

    char id[32];
    for (std::size_t d = 0; d < p_.documents; ++d) {
      const std::size_t cls = d % p_.classes;
      std::snprintf(id, sizeof id, "doc%04zu", d);
      std::string text = "\\section{Overview}\n";
      text += sentence(c.topic_words[cls]) + " \\cite{ref" + std::to_string(d) + "}.\n\n";
      for (std::size_t e = 0; e < p_.equations_per_document; ++e) {
        const std::string latex = equation(cls);
        c.equation_class.emplace(normalize_equation(latex), cls);
        text += sentence(c.topic_words[cls]) + "\n";
        text += display(latex) + "\n";
        text += sentence(c.topic_words[cls]) + " with $x_" + std::to_string(e) + "$.\n\n";
      }
      c.documents.push_back({id, std::move(text)});
      c.document_class.push_back(cls);
    }
    return c;
  }

 private:
  // Pronounceable forms of `syllables` consonant-vowel pairs; `closed` adds
  // a final consonant.
  std::vector<std::string> words(std::size_t n, std::size_t syllables, bool closed = false) {
    static const char* cons = "bcdfghjklmnprstvz";
    static const char* vows = "aeiou";
    std::vector<std::string> out;
    while (out.size() < n) {
      std::string w;
      for (std::size_t s = 0; s < syllables; ++s) {
        w += cons[rng_.below(17)];
        w += vows[rng_.below(5)];
      }
      if (closed) w += cons[rng_.below(17)];
      if (used_.insert(w).second && !default_stopwords().count(w)) out.push_back(w);
    }
    return out;
  }

  const std::string& pick(const std::vector<std::string>& v) { return v[rng_.below(v.size())]; }

  std::string sentence(const std::vector<std::string>& topic) {
    static const std::vector<std::string> stops = {"the", "of", "and", "to", "in", "is",
                                                   "we", "that", "for", "this", "with", "as"};
    std::string s;
    for (std::size_t i = 0; i < p_.words_per_sentence; ++i) {
      if (i) s += ' ';
      if (rng_.uniform01() < p_.topic_rate) {
        s += pick(topic);
        continue;
      }
      if (rng_.uniform01() < p_.filler_share) {
        s += pick(general_);
        continue;
      }
      // The rest splits 12:3:1 between glue words, stopwords and abbreviations.
      const double r = rng_.uniform01();
      if (r < 0.75) s += pick(glue_);
      else if (r < 0.9375) s += pick(stops);
      else s += pick(abbrevs_);
    }
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  }

  std::string atom(std::size_t cls) {
    const auto& pool = symbol_pools()[cls];
    return rng_.below(2) ? pick(pool.letters) : pick(pool.greek);
  }

  std::string term(std::size_t cls) {
    std::string t = atom(cls);
    switch (rng_.below(4)) {
      case 0: t += "^{" + std::to_string(2 + rng_.below(3)) + "}"; break;
      case 1: t += "_{" + atom(cls) + "}"; break;
      case 2: t += "_{" + atom(cls) + "}^{" + atom(cls) + "}"; break;
      default: break;
    }
    return t;
  }

  std::string piece(std::size_t cls) {
    const auto& pool = symbol_pools()[cls];
    if (rng_.below(2)) return term(cls);
    switch (cls % 4) {
      case 0: return term(cls) + " " + term(cls);
      case 1: return "\\sum_{" + pool.letters[0] + "=1}^{" + pool.letters[1] + "} " + term(cls);
      case 2: return "\\frac{" + term(cls) + "}{" + term(cls) + "}";
      default: return rng_.below(2) ? "\\sqrt{" + term(cls) + "}"
                                    : "\\int " + term(cls) + " d" + pool.letters[2];
    }
  }

  std::string equation(std::size_t cls) {
    auto& seen = history_[cls];
    if (!seen.empty() && rng_.uniform01() < p_.reuse_rate) return pick(seen);
    std::string eq = term(cls) + " = " + piece(cls);
    const std::size_t extra = 1 + rng_.below(std::max<std::size_t>(p_.max_terms, 2) - 1);
    for (std::size_t i = 0; i < extra; ++i) eq += (rng_.below(2) ? " + " : " - ") + piece(cls);
    seen.push_back(eq);
    return eq;
  }

  std::string display(const std::string& latex) {
    switch (rng_.below(3)) {
      case 0: return "\\begin{equation}\n" + latex + "\n\\end{equation}";
      case 1: return "\\[ " + latex + " \\]";
      default: return "$$" + latex + "$$";
    }
  }

  const SyntheticParams& p_;
  Rng rng_;
  std::set<std::string> used_;
  std::vector<std::string> glue_;
  std::vector<std::string> general_;
  std::vector<std::string> abbrevs_;
  std::vector<std::vector<std::string>> history_;
};

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticParams& params) {
  return Generator(params).run();
}

void write_corpus_dir(const SyntheticCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& doc : corpus.documents) {
    std::ofstream out(std::filesystem::path(dir) / (doc.doc_id + ".tex"), std::ios::binary);
    out << doc.source_text;
    if (!out) throw Error(ErrorKind::kRuntime, "cannot write synthetic document " + doc.doc_id);
  }
}

}  // namespace eqemb

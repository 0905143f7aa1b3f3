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

#include <cctype>
#include <string>
#include <string_view>
#include <unordered_map>

#include "eqemb/corpus.h"

namespace eqemb {
namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Commands whose mandatory arguments are identifiers, paths or layout
// values rather than prose.
const std::unordered_map<std::string_view, int>& argument_skipping_commands() {
  static const std::unordered_map<std::string_view, int> table = {
      {"begin", 1},        {"end", 1},           {"cite", 1},
      {"citep", 1},        {"citet", 1},         {"citealp", 1},
      {"citeauthor", 1},   {"citeyear", 1},      {"nocite", 1},
      {"ref", 1},          {"eqref", 1},         {"pageref", 1},
      {"autoref", 1},      {"cref", 1},          {"Cref", 1},
      {"label", 1},        {"url", 1},           {"href", 1},
      {"includegraphics", 1}, {"usepackage", 1}, {"documentclass", 1},
      {"bibliography", 1}, {"bibliographystyle", 1}, {"input", 1},
      {"include", 1},      {"vspace", 1},        {"hspace", 1},
      {"setlength", 2},    {"newcommand", 2},    {"renewcommand", 2},
      {"setcounter", 2},   {"addtolength", 2},   {"color", 1},
      {"pagestyle", 1},    {"thispagestyle", 1}, {"newtheorem", 2},
  };
  return table;
}

class WordScanner {
 public:
  explicit WordScanner(std::string_view s) : s_(s) {}

  std::vector<RawToken> run() {
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '\x02') {
        placeholder();
      } else if (c == '%') {
        skip_to_eol();
      } else if (c == '\\') {
        command();
      } else if (c == '$') {
        dollar();
      } else if (is_letter(c)) {
        word();
      } else if (is_digit(c)) {
        skip_alnum();
      } else {
        ++i_;
      }
    }
    return std::move(out_);
  }

 private:
  void placeholder() {
    std::size_t j = i_ + 1;
    std::uint32_t value = 0;
    bool any = false;
    while (j < s_.size() && is_digit(s_[j])) {
      value = value * 10 + static_cast<std::uint32_t>(s_[j] - '0');
      any = true;
      ++j;
    }
    if (any && j < s_.size() && s_[j] == '\x03') {
      out_.push_back(RawToken::eq(value));
      i_ = j + 1;
    } else {
      ++i_;
    }
  }

  void skip_to_eol() {
    const std::size_t eol = s_.find('\n', i_);
    i_ = eol == std::string_view::npos ? s_.size() : eol;
  }

  void command() {
    if (i_ + 1 >= s_.size()) {
      ++i_;
      return;
    }
    const char next = s_[i_ + 1];
    if (next == '(') {
      skip_past("\\)", i_ + 2);
      return;
    }
    if (next == '[') {
      skip_past("\\]", i_ + 2);
      return;
    }
    if (!is_letter(next)) {
      i_ += 2;
      return;
    }
    std::size_t j = i_ + 1;
    while (j < s_.size() && is_letter(s_[j])) ++j;
    const std::string_view name = s_.substr(i_ + 1, j - i_ - 1);
    i_ = j;
    const auto& table = argument_skipping_commands();
    if (auto it = table.find(name); it != table.end()) skip_arguments(it->second);
  }

  // Skips an optional star, any [..] options, and `count` {..} groups.
  void skip_arguments(int count) {
    if (i_ < s_.size() && s_[i_] == '*') ++i_;
    while (count > 0) {
      while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (i_ >= s_.size()) return;
      if (s_[i_] == '[') {
        skip_group('[', ']');
      } else if (s_[i_] == '{') {
        skip_group('{', '}');
        --count;
      } else if (s_[i_] == '\\') {
        // \newcommand\foo{...} style: a bare command counts as an argument.
        ++i_;
        while (i_ < s_.size() && is_letter(s_[i_])) ++i_;
        --count;
      } else {
        return;
      }
    }
  }

  void skip_group(char open, char close) {
    long depth = 0;
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '\\') {
        i_ += 2;
        continue;
      }
      if (c == open) ++depth;
      if (c == close && --depth == 0) {
        ++i_;
        return;
      }
      ++i_;
    }
  }

  void dollar() {
    if (i_ + 1 < s_.size() && s_[i_ + 1] == '$') {
      skip_past("$$", i_ + 2);
    } else {
      skip_past("$", i_ + 1);
    }
  }

  // Moves past the next unescaped occurrence of `close`, or to the end.
  void skip_past(std::string_view close, std::size_t from) {
    std::size_t j = from;
    while (j < s_.size()) {
      if (s_.compare(j, close.size(), close) == 0) {
        i_ = j + close.size();
        return;
      }
      j += s_[j] == '\\' ? 2 : 1;
    }
    i_ = s_.size();
  }

  // letters ( '-' letters )*
  void word() {
    std::string w;
    std::size_t j = i_;
    while (true) {
      while (j < s_.size() && is_letter(s_[j])) {
        w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s_[j]))));
        ++j;
      }
      if (j + 1 < s_.size() && s_[j] == '-' && is_letter(s_[j + 1])) {
        w.push_back('-');
        ++j;
        continue;
      }
      break;
    }
    i_ = j;
    // Alphanumeric runs such as "word2vec" or "l2" are not words.
    if (j < s_.size() && is_digit(s_[j])) {
      skip_alnum();
      return;
    }
    out_.push_back(RawToken::word(std::move(w)));
  }

  void skip_alnum() {
    while (i_ < s_.size() && (is_letter(s_[i_]) || is_digit(s_[i_]))) ++i_;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::vector<RawToken> out_;
};

}  // namespace

std::vector<RawToken> tokenize_words(std::string_view prose) {
  return WordScanner(prose).run();
}

}  // namespace eqemb

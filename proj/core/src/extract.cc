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

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "eqemb/corpus.h"
#include "eqemb/error.h"

namespace eqemb {
namespace {

constexpr char kPlaceholderOpen = '\x02';
constexpr char kPlaceholderClose = '\x03';

struct Environment {
  std::string_view name;
  bool multi_line;
};

constexpr std::array<Environment, 7> kDisplayEnvironments = {{
    {"equation", false},
    {"equation*", false},
    {"align", true},
    {"align*", true},
    {"eqnarray", true},
    {"eqnarray*", true},
    {"displaymath", false},
}};

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

// Length of the LaTeX command token starting at s[i] == '\\'.
std::size_t command_length(std::string_view s, std::size_t i) {
  if (i + 1 >= s.size()) return 1;
  if (!is_letter(s[i + 1])) return 2;
  std::size_t j = i + 1;
  while (j < s.size() && is_letter(s[j])) ++j;
  return j - i;
}

// Finds `needle` at or after `from`, stepping over command tokens so that an
// escaped delimiter (\$, \\) never matches. Returns npos when absent.
std::size_t find_delimiter(std::string_view s, std::size_t from,
                           std::string_view needle) {
  std::size_t i = from;
  while (i < s.size()) {
    if (s.compare(i, needle.size(), needle) == 0) return i;
    if (s[i] == '\\') {
      i += command_length(s, i);
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

bool braces_balanced(std::string_view s) {
  long depth = 0;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '\\') {
      i += command_length(s, i);
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}' && --depth < 0) return false;
    ++i;
  }
  return depth == 0;
}

// Splits on \\ at brace depth zero, dropping any [spacing] argument.
std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  long depth = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '\\') {
      const std::size_t len = command_length(s, i);
      if (len == 2 && s[i + 1] == '\\' && depth == 0) {
        lines.push_back(s.substr(start, i - start));
        i += 2;
        std::size_t k = i;
        while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
        if (k < s.size() && s[k] == '[') {
          const std::size_t close = s.find(']', k);
          if (close != std::string_view::npos) i = close + 1;
        }
        start = i;
        continue;
      }
      i += len;
      continue;
    }
    if (s[i] == '{') ++depth;
    if (s[i] == '}') --depth;
    ++i;
  }
  lines.push_back(s.substr(start));
  return lines;
}

// Copies a %-comment through the end of line.
std::size_t copy_comment(std::string_view s, std::size_t i, std::string& out) {
  const std::size_t eol = s.find('\n', i);
  const std::size_t end = eol == std::string_view::npos ? s.size() : eol;
  out.append(s.substr(i, end - i));
  return end;
}

class Extractor {
 public:
  explicit Extractor(const RawDocument& doc) : src_(doc.source_text) {
    result_.doc_id = doc.doc_id;
  }

  ExtractedDocument run() {
    std::size_t i = 0;
    while (i < src_.size()) {
      const char c = src_[i];
      if (c == '%') {
        i = copy_comment(src_, i, result_.prose);
      } else if (c == '$') {
        i = src_.compare(i, 2, "$$") == 0 ? dollar_display(i) : inline_math(i);
      } else if (c == '\\') {
        i = command(i);
      } else {
        result_.prose.push_back(c);
        ++i;
      }
    }
    return std::move(result_);
  }

 private:
  std::size_t command(std::size_t i) {
    const std::size_t len = command_length(src_, i);
    const std::string_view name = src_.substr(i, len);
    if (name == "\\[") return delimited_display(i, 2, "\\]");
    if (name == "\\begin") {
      if (auto next = environment(i, len)) return *next;
    }
    result_.prose.append(name);
    return i + len;
  }

  std::size_t inline_math(std::size_t i) {
    const std::size_t close = find_delimiter(src_, i + 1, "$");
    const std::size_t end = close == std::string_view::npos ? src_.size() : close + 1;
    result_.prose.append(src_.substr(i, end - i));
    return end;
  }

  std::size_t dollar_display(std::size_t i) {
    return delimited_display(i, 2, "$$");
  }

  std::size_t delimited_display(std::size_t i, std::size_t open_len,
                                std::string_view close) {
    const std::size_t body = i + open_len;
    const std::size_t end = find_delimiter(src_, body, close);
    if (end == std::string_view::npos) {
      skip(i, open_len, "unterminated display math");
      return i + open_len;
    }
    const std::size_t region_end = end + close.size();
    if (!emit_region(i, region_end, src_.substr(body, end - body), false)) {
      result_.prose.append(src_.substr(i, region_end - i));
    }
    return region_end;
  }

  // Handles \begin{env}; returns nullopt for environments that are not
  // display math so the caller copies the command through.
  std::optional<std::size_t> environment(std::size_t i, std::size_t len) {
    std::size_t j = i + len;
    if (j >= src_.size() || src_[j] != '{') return std::nullopt;
    const std::size_t close = src_.find('}', j);
    if (close == std::string_view::npos) return std::nullopt;
    const std::string_view name = src_.substr(j + 1, close - j - 1);
    const Environment* env = nullptr;
    for (const auto& e : kDisplayEnvironments) {
      if (e.name == name) env = &e;
    }
    if (env == nullptr) return std::nullopt;

    const std::size_t body = close + 1;
    const std::string end_tag = "\\end{" + std::string(name) + "}";
    const std::size_t end = src_.find(end_tag, body);
    const std::size_t open_len = body - i;
    if (end == std::string_view::npos) {
      skip(i, open_len, "unterminated \\begin{" + std::string(name) + "}");
      return i + open_len;
    }
    const std::size_t region_end = end + end_tag.size();
    if (!emit_region(i, region_end, src_.substr(body, end - body), env->multi_line)) {
      // Left verbatim; the word tokenizer drops the math content.
      result_.prose.append(src_.substr(i, region_end - i));
    }
    return region_end;
  }

  // Returns false (and records the skip) when nothing could be extracted.
  bool emit_region(std::size_t begin, std::size_t end, std::string_view body,
                   bool multi_line) {
    if (!braces_balanced(body)) {
      record_skip(begin, "unbalanced braces in display math");
      return false;
    }
    std::vector<std::string> equations;
    if (multi_line) {
      for (std::string_view line : split_lines(body)) {
        std::string eq = normalize_equation(line);
        if (!eq.empty()) equations.push_back(std::move(eq));
      }
    } else {
      std::string eq = normalize_equation(body);
      if (!eq.empty()) equations.push_back(std::move(eq));
    }
    if (equations.empty()) {
      record_skip(begin, "empty display math");
      return false;
    }
    DisplayRegion region;
    region.source_begin = begin;
    region.source_end = end;
    region.first_equation = static_cast<std::uint32_t>(result_.equations.size());
    region.equation_count = static_cast<std::uint32_t>(equations.size());
    for (auto& eq : equations) result_.equations.push_back(std::move(eq));
    result_.prose.append(region_placeholder(region));
    result_.regions.push_back(region);
    return true;
  }

  void skip(std::size_t at, std::size_t len, const std::string& why) {
    result_.prose.append(src_.substr(at, len));
    record_skip(at, why);
  }

  void record_skip(std::size_t at, const std::string& why) {
    ++result_.skipped_regions;
    result_.warnings.push_back(result_.doc_id + ": " + why + " at offset " +
                               std::to_string(at));
  }

  std::string_view src_;
  ExtractedDocument result_;
};

}  // namespace

ExtractedDocument extract_display_equations(const RawDocument& doc) {
  return Extractor(doc).run();
}

std::string normalize_equation(std::string_view latex) {
  std::string stripped;
  stripped.reserve(latex.size());
  std::size_t i = 0;
  while (i < latex.size()) {
    if (latex[i] == '\\') {
      const std::size_t len = command_length(latex, i);
      const std::string_view name = latex.substr(i, len);
      if (name == "\\label") {
        std::size_t j = i + len;
        while (j < latex.size() && std::isspace(static_cast<unsigned char>(latex[j]))) ++j;
        if (j < latex.size() && latex[j] == '{') {
          long depth = 0;
          for (; j < latex.size(); ++j) {
            if (latex[j] == '{') ++depth;
            if (latex[j] == '}' && --depth == 0) break;
          }
          i = j < latex.size() ? j + 1 : latex.size();
          stripped.push_back(' ');
          continue;
        }
      }
      if (name == "\\nonumber" || name == "\\notag") {
        i += len;
        stripped.push_back(' ');
        continue;
      }
      stripped.append(name);
      i += len;
      continue;
    }
    stripped.push_back(latex[i]);
    ++i;
  }

  std::string out;
  out.reserve(stripped.size());
  bool pending_space = false;
  for (char c : stripped) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string region_placeholder(const DisplayRegion& region) {
  std::string out;
  for (std::uint32_t k = 0; k < region.equation_count; ++k) {
    out.push_back(' ');
    out.push_back(kPlaceholderOpen);
    out.append(std::to_string(region.first_equation + k));
    out.push_back(kPlaceholderClose);
  }
  out.push_back(' ');
  return out;
}

std::string restore_display_math(const ExtractedDocument& doc,
                                 std::string_view source) {
  std::string out;
  std::size_t cursor = 0;
  for (const DisplayRegion& region : doc.regions) {
    const std::string placeholder = region_placeholder(region);
    const std::size_t at = doc.prose.find(placeholder, cursor);
    if (at == std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "placeholder missing from prose");
    }
    out.append(doc.prose, cursor, at - cursor);
    out.append(source.substr(region.source_begin,
                             region.source_end - region.source_begin));
    cursor = at + placeholder.size();
  }
  out.append(doc.prose, cursor);
  return out;
}

}  // namespace eqemb

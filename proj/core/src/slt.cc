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

#include "eqemb/slt.h"

#include <cctype>
#include <map>
#include <unordered_set>

#include "eqemb/error.h"

namespace eqemb {
namespace {

// ---------------------------------------------------------------------------
// Command tables

const std::unordered_set<std::string_view>& symbol_commands() {
  static const std::unordered_set<std::string_view> table = {
      // Greek
      "alpha", "beta", "gamma", "delta", "epsilon", "varepsilon", "zeta", "eta",
      "theta", "vartheta", "iota", "kappa", "varkappa", "lambda", "mu", "nu",
      "xi", "omicron", "pi", "varpi", "rho", "varrho", "sigma", "varsigma",
      "tau", "upsilon", "phi", "varphi", "chi", "psi", "omega", "Gamma",
      "Delta", "Theta", "Lambda", "Xi", "Pi", "Sigma", "Upsilon", "Phi", "Psi",
      "Omega", "digamma",
      // Big operators
      "sum", "prod", "coprod", "int", "iint", "iiint", "oint", "bigcup",
      "bigcap", "bigoplus", "bigotimes", "bigodot", "bigvee", "bigwedge",
      "biguplus", "bigsqcup",
      // Named functions
      "log", "ln", "exp", "sin", "cos", "tan", "sec", "csc", "cot", "arcsin",
      "arccos", "arctan", "sinh", "cosh", "tanh", "coth", "lim", "limsup",
      "liminf", "max", "min", "sup", "inf", "arg", "argmax", "argmin", "det",
      "dim", "ker", "deg", "gcd", "lg", "Pr", "hom", "mod", "bmod", "pmod",
      // Relations, binary operators, arrows
      "leq", "le", "geq", "ge", "neq", "ne", "equiv", "approx", "sim", "simeq",
      "cong", "propto", "in", "notin", "ni", "subset", "subseteq", "supset",
      "supseteq", "cup", "cap", "setminus", "wedge", "vee", "land", "lor",
      "oplus", "otimes", "odot", "cdot", "times", "div", "pm", "mp", "ast",
      "star", "circ", "bullet", "diamond", "prec", "succ", "preceq", "succeq",
      "ll", "gg", "perp", "parallel", "mid", "nmid", "models", "vdash",
      "dashv", "to", "rightarrow", "leftarrow", "Rightarrow", "Leftarrow",
      "leftrightarrow", "Leftrightarrow", "longrightarrow", "longleftarrow",
      "Longrightarrow", "Longleftarrow", "longleftrightarrow",
      "Longleftrightarrow", "iff", "implies", "mapsto", "longmapsto",
      "uparrow", "downarrow", "Uparrow", "Downarrow", "hookrightarrow",
      "rightharpoonup", "leftharpoonup", "gets", "triangleq", "doteq",
      "coloneqq", "lesssim", "gtrsim", "sqsubseteq", "sqsupseteq", "sqcup",
      "sqcap", "uplus", "wr", "amalg", "triangle", "triangledown",
      "bigtriangleup", "bigtriangledown", "leqslant", "geqslant", "nleq",
      "ngeq", "lhd", "rhd", "unlhd", "unrhd", "ominus", "oslash",
      // Miscellaneous symbols and delimiters
      "infty", "partial", "nabla", "forall", "exists", "nexists", "neg",
      "lnot", "emptyset", "varnothing", "ell", "hbar", "imath", "jmath", "wp",
      "Re", "Im", "aleph", "beth", "prime", "backslash", "angle", "top", "bot",
      "cdots", "ldots", "dots", "vdots", "ddots", "dotsc", "dotsb", "dotsm",
      "dotsi", "langle", "rangle", "lceil", "rceil", "lfloor", "rfloor",
      "lvert", "rvert", "lVert", "rVert", "vert", "Vert", "choose", "atop",
      "surd", "flat", "sharp", "natural", "dagger", "ddagger", "colon",
      "not", "S", "P", "checkmark", "square", "Box", "blacksquare",
      "therefore", "because", "qed",
  };
  return table;
}

// Commands that vanish: spacing, sizing and declarative style switches.
const std::unordered_set<std::string_view>& ignored_commands() {
  static const std::unordered_set<std::string_view> table = {
      "quad", "qquad", "enspace", "thinspace", "medspace", "thickspace",
      "negthinspace", "hfill", "hline", "cr", "displaystyle", "textstyle",
      "scriptstyle", "scriptscriptstyle", "limits", "nolimits", "bf", "rm",
      "it", "sf", "tt", "cal", "normalsize", "small", "large", "Large",
      "nonumber", "notag", "allowbreak", "nobreak", "relax", "strut",
      "vphantom", "phantom", "hphantom", "left", "right", "middle", "big",
      "Big", "bigg", "Bigg", "bigl", "bigr", "Bigl", "Bigr", "biggl", "biggr",
      "Biggl", "Biggr", "bigm", "Bigm",
  };
  return table;
}

const std::unordered_set<std::string_view>& accent_commands() {
  static const std::unordered_set<std::string_view> table = {
      "hat", "bar", "tilde", "vec", "dot", "ddot", "check", "breve", "acute",
      "grave", "overline", "underline", "widehat", "widetilde",
      "overrightarrow", "overleftarrow", "overbrace", "underbrace", "mathring",
  };
  return table;
}

const std::unordered_set<std::string_view>& text_commands() {
  static const std::unordered_set<std::string_view> table = {
      "operatorname", "mathrm", "text", "textrm", "textit", "textbf", "textsf",
      "texttt", "textnormal", "mbox", "mathop", "textup", "emph",
  };
  return table;
}

// Font wrappers whose content is spliced into the surrounding row.
const std::unordered_set<std::string_view>& font_commands() {
  static const std::unordered_set<std::string_view> table = {
      "mathbf", "mathit", "mathsf", "mathtt", "boldsymbol", "bm", "pmb",
      "mathnormal", "mathbold",
  };
  return table;
}

// Alphabet-changing fonts; a single-symbol argument becomes "\mathbb{R}".
const std::unordered_set<std::string_view>& alphabet_commands() {
  static const std::unordered_set<std::string_view> table = {
      "mathbb", "mathcal", "mathfrak", "mathscr", "mathds",
  };
  return table;
}

const std::unordered_set<std::string_view>& transparent_environments() {
  static const std::unordered_set<std::string_view> table = {
      "aligned", "split", "gathered", "alignedat", "gather", "gather*",
      "multline", "multline*", "align", "align*", "equation", "equation*",
  };
  return table;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { kEnd, kCommand, kChar, kNumber, kOpen, kClose, kCaret, kUnderscore, kPrime };

struct Token {
  Tok type = Tok::kEnd;
  std::string_view text;  // command name without the backslash, or the text
  std::size_t offset = 0;
  std::size_t length = 0;
};

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token peek() {
    skip_noise();
    return lex_at(pos_);
  }

  Token next() {
    Token t = peek();
    pos_ = t.offset + t.length;
    return t;
  }

  // Consumes only the first digit of a number token (TeX reads x^12 as x^{1}2).
  Token next_digit() {
    Token t = peek();
    t.length = 1;
    t.text = s_.substr(t.offset, 1);
    pos_ = t.offset + 1;
    return t;
  }

  std::size_t position() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  std::string_view source() const { return s_; }

  // Raw balanced-brace content following the current position; the lexer
  // must be positioned at '{'.
  std::string_view raw_group(std::size_t& offset) {
    skip_noise();
    offset = pos_;
    if (pos_ >= s_.size() || s_[pos_] != '{') throw ParseError(pos_, "expected '{'");
    long depth = 0;
    for (std::size_t i = pos_; i < s_.size(); ++i) {
      if (s_[i] == '\\') {
        ++i;
        continue;
      }
      if (s_[i] == '{') ++depth;
      if (s_[i] == '}' && --depth == 0) {
        const std::string_view inner = s_.substr(pos_ + 1, i - pos_ - 1);
        pos_ = i + 1;
        return inner;
      }
    }
    throw ParseError(pos_, "unbalanced braces");
  }

 private:
  void skip_noise() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '~' || c == '&') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Token lex_at(std::size_t i) const {
    Token t;
    t.offset = i;
    if (i >= s_.size()) return t;
    const char c = s_[i];
    auto single = [&](Tok type) {
      t.type = type;
      t.text = s_.substr(i, 1);
      t.length = 1;
      return t;
    };
    switch (c) {
      case '{': return single(Tok::kOpen);
      case '}': return single(Tok::kClose);
      case '^': return single(Tok::kCaret);
      case '_': return single(Tok::kUnderscore);
      case '\'': return single(Tok::kPrime);
      default: break;
    }
    if (c == '\\') {
      t.type = Tok::kCommand;
      if (i + 1 >= s_.size()) {
        t.text = "\\";
        t.length = 1;
        return t;
      }
      std::size_t j = i + 1;
      if (is_letter(s_[j])) {
        while (j < s_.size() && is_letter(s_[j])) ++j;
      } else {
        ++j;
      }
      t.text = s_.substr(i + 1, j - i - 1);
      t.length = j - i;
      return t;
    }
    if (is_digit(c)) {
      std::size_t j = i;
      while (j < s_.size() && is_digit(s_[j])) ++j;
      if (j + 1 < s_.size() && s_[j] == '.' && is_digit(s_[j + 1])) {
        ++j;
        while (j < s_.size() && is_digit(s_[j])) ++j;
      }
      t.type = Tok::kNumber;
      t.text = s_.substr(i, j - i);
      t.length = j - i;
      return t;
    }
    // One character, keeping UTF-8 sequences whole.
    std::size_t j = i + 1;
    if (static_cast<unsigned char>(c) >= 0x80) {
      while (j < s_.size() && (static_cast<unsigned char>(s_[j]) & 0xC0) == 0x80) ++j;
    }
    t.type = Tok::kChar;
    t.text = s_.substr(i, j - i);
    t.length = j - i;
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Parser

MathNode symbol_node(std::string text, NodeKind kind = NodeKind::kSymbol) {
  MathNode n;
  n.kind = kind;
  n.symbol = std::move(text);
  return n;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '~') {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view latex, ParseMode mode) : lex_(latex), mode_(mode) {}

  MathRow parse() {
    MathRow row = parse_row(Stop::kEnd, {});
    return row;
  }

 private:
  enum class Stop { kEnd, kBrace, kBracket, kEnvironment };

  MathRow parse_row(Stop stop, std::string_view env) {
    MathRow row;
    while (true) {
      const Token t = lex_.peek();
      if (t.type == Tok::kEnd) {
        if (stop == Stop::kEnd) return row;
        if (stop == Stop::kEnvironment && mode_ == ParseMode::kLenient) return row;
        throw ParseError(t.offset, stop == Stop::kBrace ? "unbalanced braces: missing '}'"
                                                        : "unterminated group");
      }
      if (t.type == Tok::kClose) {
        if (stop == Stop::kBrace) {
          lex_.next();
          return row;
        }
        throw ParseError(t.offset, "unbalanced braces: unexpected '}'");
      }
      if (stop == Stop::kBracket && t.type == Tok::kChar && t.text == "]") {
        lex_.next();
        return row;
      }
      if (t.type == Tok::kCommand && t.text == "end") {
        if (stop != Stop::kEnvironment) {
          throw ParseError(t.offset, "unexpected \\end");
        }
        lex_.next();
        std::size_t offset = 0;
        const std::string_view name = lex_.raw_group(offset);
        if (name != env && mode_ == ParseMode::kStrict) {
          throw ParseError(offset, "mismatched \\end{" + std::string(name) + "}");
        }
        return row;
      }
      parse_item(row);
    }
  }

  // One atom plus any scripts.
  void parse_item(MathRow& row) {
    const Token t = lex_.peek();
    const bool script_first = t.type == Tok::kCaret || t.type == Tok::kUnderscore ||
                              t.type == Tok::kPrime;
    bool has_base = false;
    if (script_first) {
      row.push_back(symbol_node("{}", NodeKind::kScriptCarrier));
      has_base = true;
    } else {
      has_base = parse_base(row);
    }
    if (!has_base) return;
    parse_scripts(row);
  }

  void parse_scripts(MathRow& row) {
    while (true) {
      const Token t = lex_.peek();
      if (t.type == Tok::kCommand && (t.text == "limits" || t.text == "nolimits")) {
        lex_.next();
        continue;
      }
      if (t.type == Tok::kPrime) {
        lex_.next();
        attach(row, Relation::kAbove, MathRow{symbol_node("\\prime")}, t.offset, true);
        continue;
      }
      if (t.type != Tok::kCaret && t.type != Tok::kUnderscore) return;
      lex_.next();
      MathRow script = parse_argument();
      attach(row, t.type == Tok::kCaret ? Relation::kAbove : Relation::kUnder,
             std::move(script), t.offset, false);
    }
  }

  void attach(MathRow& row, Relation rel, MathRow script, std::size_t offset,
              bool is_prime) {
    MathNode* node = &row.back();
    if (node->kind == NodeKind::kFraction || node->kind == NodeKind::kRoot) {
      MathNode carrier = symbol_node("{}", NodeKind::kScriptCarrier);
      carrier.within.push_back(std::move(row.back()));
      row.back() = std::move(carrier);
      node = &row.back();
    }
    MathRow& slot = rel == Relation::kAbove ? node->above : node->under;
    if (!slot.empty() && !is_prime && mode_ == ParseMode::kStrict &&
        !(rel == Relation::kAbove && slot.back().symbol == "\\prime")) {
      throw ParseError(offset, rel == Relation::kAbove ? "double superscript"
                                                        : "double subscript");
    }
    for (auto& n : script) slot.push_back(std::move(n));
  }

  // A script or command argument: a braced row or a single token.
  MathRow parse_argument() {
    const Token t = lex_.peek();
    switch (t.type) {
      case Tok::kOpen:
        lex_.next();
        return parse_row(Stop::kBrace, {});
      case Tok::kNumber:
        return MathRow{symbol_node(std::string(lex_.next_digit().text))};
      case Tok::kChar:
        lex_.next();
        return MathRow{symbol_node(std::string(t.text))};
      case Tok::kCommand: {
        MathRow row;
        parse_base(row);
        return row;
      }
      default:
        if (mode_ == ParseMode::kStrict) throw ParseError(t.offset, "missing argument");
        return {};
    }
  }

  // Appends the nodes of one base to the row; returns whether a node that
  // can carry scripts was appended.
  bool parse_base(MathRow& row) {
    const Token t = lex_.next();
    switch (t.type) {
      case Tok::kOpen: {
        MathNode group = symbol_node("{}", NodeKind::kGroup);
        group.within = parse_row(Stop::kBrace, {});
        row.push_back(std::move(group));
        return true;
      }
      case Tok::kNumber:
        row.push_back(symbol_node(std::string(t.text)));
        return true;
      case Tok::kChar:
        if (t.text == "$") return false;
        row.push_back(symbol_node(std::string(t.text)));
        return true;
      case Tok::kCommand:
        return command(t, row);
      default:
        throw ParseError(t.offset, "unexpected token");
    }
  }

  bool command(const Token& t, MathRow& row) {
    const std::string_view name = t.text;
    const std::string backslashed = "\\" + std::string(name);

    if (name.size() == 1 && !is_letter(name[0])) {
      // \, \; \: \! and "\ " are spacing; \\ is a line break.
      if (name == "," || name == ";" || name == ":" || name == "!" || name == " " ||
          name == "\\" || name == "\n" || name == "\t" || name == "/") {
        return false;
      }
      row.push_back(symbol_node(backslashed));
      return true;
    }
    if (ignored_commands().count(name)) {
      if (name == "left" || name == "right" || name == "middle" ||
          name.rfind("big", 0) == 0 || name.rfind("Big", 0) == 0) {
        const Token d = lex_.peek();
        if (d.type == Tok::kChar && d.text == ".") lex_.next();
      }
      if (name == "vphantom" || name == "phantom" || name == "hphantom") {
        parse_argument();
      }
      return false;
    }
    if (name == "frac" || name == "dfrac" || name == "tfrac" || name == "cfrac" ||
        name == "binom" || name == "dbinom" || name == "tbinom") {
      const bool binom = name.find("binom") != std::string_view::npos;
      MathNode frac = symbol_node(binom ? "binom" : "frac", NodeKind::kFraction);
      frac.over = parse_argument();
      frac.under = parse_argument();
      row.push_back(std::move(frac));
      return true;
    }
    if (name == "sqrt") {
      MathNode root = symbol_node("sqrt", NodeKind::kRoot);
      const Token b = lex_.peek();
      if (b.type == Tok::kChar && b.text == "[") {
        lex_.next();
        root.above = parse_row(Stop::kBracket, {});
      }
      root.within = parse_argument();
      row.push_back(std::move(root));
      return true;
    }
    if (text_commands().count(name)) {
      const Token star = lex_.peek();
      if (star.type == Tok::kChar && star.text == "*") lex_.next();
      std::string text;
      if (lex_.peek().type == Tok::kOpen) {
        std::size_t offset = 0;
        text = collapse_whitespace(lex_.raw_group(offset));
      } else {
        const Token a = lex_.next();
        text = std::string(a.text);
      }
      if (text.empty()) return false;
      row.push_back(symbol_node(std::move(text), NodeKind::kOperatorName));
      return true;
    }
    if (font_commands().count(name)) {
      MathRow inner = parse_argument();
      if (inner.empty()) return false;
      for (auto& n : inner) row.push_back(std::move(n));
      return true;
    }
    if (alphabet_commands().count(name)) {
      MathRow inner = parse_argument();
      if (inner.empty()) return false;
      if (inner.size() == 1 && inner[0].kind == NodeKind::kSymbol &&
          inner[0].above.empty() && inner[0].under.empty()) {
        row.push_back(symbol_node(backslashed + "{" + inner[0].symbol + "}"));
      } else {
        for (auto& n : inner) row.push_back(std::move(n));
      }
      return true;
    }
    if (accent_commands().count(name)) {
      MathNode accent = symbol_node(backslashed, NodeKind::kGroup);
      accent.within = parse_argument();
      row.push_back(std::move(accent));
      return true;
    }
    if (name == "begin") {
      std::size_t offset = 0;
      const std::string name_arg(lex_.raw_group(offset));
      if (name_arg == "array" || name_arg == "tabular" || name_arg == "subarray" ||
          name_arg == "alignedat") {
        const Token opt = lex_.peek();
        if (opt.type == Tok::kChar && opt.text == "[") {
          lex_.next();
          parse_row(Stop::kBracket, {});
        }
        lex_.raw_group(offset);
      }
      MathRow body = parse_row(Stop::kEnvironment, name_arg);
      if (transparent_environments().count(name_arg)) {
        if (body.empty()) return false;
        for (auto& n : body) row.push_back(std::move(n));
        return true;
      }
      MathNode env = symbol_node(name_arg, NodeKind::kGroup);
      env.within = std::move(body);
      row.push_back(std::move(env));
      return true;
    }
    if (symbol_commands().count(name) || mode_ == ParseMode::kLenient) {
      row.push_back(symbol_node(backslashed));
      return true;
    }
    throw ParseError(t.offset, "unknown command " + backslashed);
  }

  Lexer lex_;
  ParseMode mode_;
};

// ---------------------------------------------------------------------------
// Tuple emission

class Emitter {
 public:
  explicit Emitter(std::size_t window) : window_(window) {}

  void row(const MathRow& r) {
    for (std::size_t i = 0; i < r.size(); ++i) node(r, i);
  }

  std::vector<SltTuple> take() { return std::move(out_); }

 private:
  void node(const MathRow& r, std::size_t i) {
    const MathNode& n = r[i];
    // Slots top to bottom, then the body, then the horizontal chain.
    slot(n, n.above, Relation::kAbove);
    slot(n, n.over, Relation::kOver);
    slot(n, n.under, Relation::kUnder);
    slot(n, n.within, Relation::kWithin);
    for (std::size_t k = 1; k <= window_ && i + k < r.size(); ++k) {
      out_.push_back({n.symbol, r[i + k].symbol, Relation::kNext});
    }
  }

  void slot(const MathNode& n, const MathRow& child, Relation rel) {
    if (child.empty()) return;
    for (std::size_t k = 0; k < window_ && k < child.size(); ++k) {
      out_.push_back({n.symbol, child[k].symbol, rel});
    }
    row(child);
  }

  std::size_t window_;
  std::vector<SltTuple> out_;
};

bool needs_escape(char c) {
  return c == ',' || c == '(' || c == ')' || c == '%' ||
         std::isspace(static_cast<unsigned char>(c));
}

void append_escaped(std::string& out, std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  for (char c : s) {
    if (needs_escape(c)) {
      const auto u = static_cast<unsigned char>(c);
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0xF]);
    } else {
      out.push_back(c);
    }
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size()) {
        throw Error(ErrorKind::kCorrupt, "truncated escape in unit string");
      }
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi < 0 || lo < 0) throw Error(ErrorKind::kCorrupt, "bad escape in unit string");
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

MathRow parse_math(std::string_view latex, ParseMode mode) {
  return Parser(latex, mode).parse();
}

std::vector<SltTuple> slt_tuples(const MathRow& row, std::size_t symbol_window) {
  if (symbol_window == 0) {
    throw Error(ErrorKind::kInvalidArgument, "symbol window must be positive");
  }
  Emitter e(symbol_window);
  e.row(row);
  return e.take();
}

std::string unit_string(const SltTuple& tuple) {
  std::string out = "(";
  append_escaped(out, tuple.from);
  out.push_back(',');
  append_escaped(out, tuple.to);
  out.push_back(',');
  out.push_back(static_cast<char>(tuple.relation));
  out.push_back(')');
  return out;
}

SltTuple parse_unit_string(std::string_view unit) {
  if (unit.size() < 6 || unit.front() != '(' || unit.back() != ')') {
    throw Error(ErrorKind::kCorrupt, "malformed unit string: " + std::string(unit));
  }
  const std::string_view body = unit.substr(1, unit.size() - 2);
  const std::size_t c1 = body.find(',');
  const std::size_t c2 = body.rfind(',');
  if (c1 == std::string_view::npos || c1 == c2 || c2 + 2 != body.size()) {
    throw Error(ErrorKind::kCorrupt, "malformed unit string: " + std::string(unit));
  }
  const char rel = body.back();
  if (rel != 'n' && rel != 'a' && rel != 'u' && rel != 'o' && rel != 'w') {
    throw Error(ErrorKind::kCorrupt, "unknown relation in unit string");
  }
  SltTuple t;
  t.from = unescape(body.substr(0, c1));
  t.to = unescape(body.substr(c1 + 1, c2 - c1 - 1));
  t.relation = static_cast<Relation>(rel);
  return t;
}

SltTupleSequence tokenize_equation(std::uint32_t eq_id, std::string_view latex,
                                   ParseMode mode, std::size_t symbol_window) {
  SltTupleSequence seq;
  seq.eq_id = eq_id;
  seq.tuples = slt_tuples(parse_math(latex, mode), symbol_window);
  seq.units.reserve(seq.tuples.size());
  for (const auto& t : seq.tuples) seq.units.push_back(unit_string(t));
  return seq;
}

UnitCorpus build_unit_vocabulary(std::span<const SltTupleSequence> sequences,
                                 std::span<const std::uint32_t> weights,
                                 std::uint64_t min_count) {
  if (sequences.empty()) throw Error(ErrorKind::kInput, "empty equation set");
  if (!weights.empty() && weights.size() != sequences.size()) {
    throw Error(ErrorKind::kInvalidArgument, "weights do not match sequences");
  }
  std::map<std::string, std::uint64_t> counts;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const std::uint64_t w = weights.empty() ? 1 : weights[i];
    for (const auto& u : sequences[i].units) counts[u] += w;
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [unit, n] : counts) {
    if (n >= min_count) kept.emplace_back(unit, n);
  }
  UnitCorpus out;
  out.vocabulary = Vocabulary::from_counts(VocabularyKind::kUnit, std::move(kept));
  out.sequences.reserve(sequences.size());
  for (const auto& seq : sequences) {
    std::vector<std::uint32_t> ids;
    ids.reserve(seq.units.size());
    for (const auto& u : seq.units) {
      auto id = out.vocabulary.find(u);
      ids.push_back(id ? *id : kUnitGap);
    }
    out.sequences.push_back(std::move(ids));
  }
  return out;
}

}  // namespace eqemb

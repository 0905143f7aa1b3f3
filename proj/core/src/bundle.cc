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

#include "eqemb/bundle.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "eqemb/error.h"
#include "eqemb/model_io.h"

namespace fs = std::filesystem;

namespace eqemb {
namespace {

// One-line header: format version plus the effective ingest config.
std::string header_line(const char* file, const IngestConfig& config) {
  std::string echo = ingest_config_echo(config);
  std::replace(echo.begin(), echo.end(), '\n', ' ');
  while (!echo.empty() && echo.back() == ' ') echo.pop_back();
  return std::string("# eqemb-bundle ") + file + " format=" +
         std::to_string(kBundleFormatVersion) + " " + echo + "\n";
}

[[noreturn]] void corrupt(const std::string& file, const std::string& what) {
  throw Error(ErrorKind::kCorrupt, file + ": " + what);
}

// Checks a header line and returns the config it carries.
IngestConfig parse_header(const std::string& file, std::string_view line) {
  const std::string prefix = "# eqemb-bundle " + file + " format=";
  if (line.substr(0, prefix.size()) != prefix) corrupt(file, "missing bundle header");
  line.remove_prefix(prefix.size());
  const auto sp = line.find(' ');
  if (line.substr(0, sp) != std::to_string(kBundleFormatVersion)) {
    corrupt(file, "unsupported bundle format");
  }
  ConfigValues values;
  std::string_view rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
  try {
    while (!rest.empty()) {
      const auto next = rest.find(' ');
      if (!rest.substr(0, next).empty()) values.set(rest.substr(0, next));
      if (next == std::string_view::npos) break;
      rest.remove_prefix(next + 1);
    }
    return resolve_config(values).ingest;
  } catch (const Error& e) {
    corrupt(file, std::string("bad header config: ") + e.what());
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& file, std::string_view s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    corrupt(file, "bad number '" + std::string(s) + "'");
  }
  return v;
}

// Lines of a text file after its header; also returns the header config.
std::vector<std::string> read_rows(const std::string& dir, const std::string& file,
                                   IngestConfig* config = nullptr) {
  const std::string text = read_file((fs::path(dir) / file).string());
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) corrupt(file, "empty file");
  const IngestConfig c = parse_header(file, line);
  if (config) *config = c;
  while (std::getline(in, line)) rows.push_back(line);
  return rows;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class BinReader {
 public:
  BinReader(std::string data, std::string file) : data_(std::move(data)), file_(std::move(file)) {
    const auto nl = data_.find('\n');
    if (nl == std::string::npos) corrupt(file_, "missing bundle header");
    parse_header(file_, std::string_view(data_).substr(0, nl));
    pos_ = nl + 1;
  }
  std::uint32_t u32() {
    if (data_.size() - pos_ < 4) corrupt(file_, "truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::string bytes(std::size_t n) {
    if (data_.size() - pos_ < n) corrupt(file_, "truncated");
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void need(std::uint64_t n) const {
    if (data_.size() - pos_ < n) corrupt(file_, "truncated");
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::string file_;
  std::size_t pos_ = 0;
};

std::string context_token(Item item) {
  return (item.is_equation() ? "e" : "w") + std::to_string(item.id());
}

std::string heldout_tsv(const std::vector<HeldOutItem>& items, const char* file,
                        const IngestConfig& config) {
  std::string out = header_line(file, config);
  for (const auto& it : items) {
    out += std::to_string(it.eq_id) + "\t" + std::to_string(it.doc) + "\t" +
           std::to_string(it.position) + "\t" + std::to_string(it.target) + "\t";
    for (std::size_t i = 0; i < it.context.size(); ++i) {
      out += (i ? "," : "") + context_token(it.context[i]);
    }
    out += "\t";
    for (std::size_t i = 0; i < it.negatives.size(); ++i) {
      out += (i ? "," : "") + std::to_string(it.negatives[i]);
    }
    out += "\n";
  }
  return out;
}

std::vector<HeldOutItem> parse_heldout(const std::string& dir, const std::string& file,
                                       Split split) {
  std::vector<HeldOutItem> items;
  for (const auto& row : read_rows(dir, file)) {
    const auto cols = split_tabs(row);
    if (cols.size() != 6) corrupt(file, "expected 6 columns");
    HeldOutItem it;
    it.split = split;
    it.eq_id = static_cast<std::uint32_t>(parse_u64(file, cols[0]));
    it.doc = static_cast<std::uint32_t>(parse_u64(file, cols[1]));
    it.position = static_cast<std::uint32_t>(parse_u64(file, cols[2]));
    it.target = static_cast<std::uint32_t>(parse_u64(file, cols[3]));
    std::string_view ctx = cols[4];
    while (!ctx.empty()) {
      const auto comma = ctx.find(',');
      const auto tok = ctx.substr(0, comma);
      if (tok.size() < 2 || (tok[0] != 'w' && tok[0] != 'e')) corrupt(file, "bad context token");
      const auto id = static_cast<std::uint32_t>(parse_u64(file, tok.substr(1)));
      if (id > Item::kMaxId) corrupt(file, "context id out of range");
      it.context.push_back(tok[0] == 'e' ? Item::equation(id) : Item::word(id));
      if (comma == std::string_view::npos) break;
      ctx.remove_prefix(comma + 1);
    }
    std::string_view neg = cols[5];
    while (!neg.empty()) {
      const auto comma = neg.find(',');
      it.negatives.push_back(static_cast<std::uint32_t>(parse_u64(file, neg.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      neg.remove_prefix(comma + 1);
    }
    items.push_back(std::move(it));
  }
  return items;
}

struct DocumentResult {
  std::string doc_id;
  ExtractedDocument extracted;
  std::vector<RawToken> tokens;
};

DocumentResult process_document(const RawDocument& doc) {
  DocumentResult r;
  r.doc_id = doc.doc_id;
  r.extracted = extract_display_equations(doc);
  r.tokens = tokenize_words(r.extracted.prose);
  return r;
}

template <typename Fn>
void parallel_for(std::size_t n, bool parallel, Fn&& fn) {
  std::size_t threads = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1;
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

bool looks_like_bundle(const fs::path& dir) {
  if (fs::is_empty(dir)) return true;
  std::ifstream in(dir / "summary.tsv");
  std::string line;
  return std::getline(in, line) && line.rfind("# eqemb-bundle ", 0) == 0;
}

}  // namespace

std::vector<RawDocument> read_corpus_dir(const std::string& dir,
                                         std::vector<std::string>* warnings) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::kInput, "corpus directory not found: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".tex") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.stem() < b.stem(); });
  std::vector<RawDocument> docs;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    if (in) ss << in.rdbuf();
    if (!in) {
      if (warnings) warnings->push_back("cannot read " + f.string());
      continue;
    }
    std::string text = ss.str();
    if (text.empty()) {
      if (warnings) warnings->push_back("empty file " + f.string());
      continue;
    }
    docs.push_back({f.stem().string(), std::move(text)});
  }
  return docs;
}

CorpusBundle ingest_documents(std::vector<RawDocument> docs, const IngestConfig& config,
                              IngestStats* stats) {
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  std::sort(docs.begin(), docs.end(),
            [](const RawDocument& a, const RawDocument& b) { return a.doc_id < b.doc_id; });
  for (std::size_t i = 1; i < docs.size(); ++i) {
    if (docs[i].doc_id == docs[i - 1].doc_id) {
      throw Error(ErrorKind::kInput, "duplicate doc_id " + docs[i].doc_id);
    }
  }
  std::erase_if(docs, [&](const RawDocument& d) {
    if (!d.source_text.empty()) return false;
    st.warnings.push_back("empty document " + d.doc_id);
    return true;
  });
  if (docs.empty()) throw Error(ErrorKind::kInput, "no documents to ingest");

  std::vector<DocumentResult> results(docs.size());
  parallel_for(docs.size(), config.parallel,
               [&](std::size_t i) { results[i] = process_document(docs[i]); });

  CorpusBundle b;
  b.config = config;
  std::vector<std::vector<std::uint32_t>> local_ids;
  std::vector<std::vector<RawToken>> token_lists;
  for (auto& r : results) {
    st.skipped_regions += r.extracted.skipped_regions;
    for (auto& w : r.extracted.warnings) st.warnings.push_back(std::move(w));
    local_ids.push_back(b.equations.add_document(r.extracted));
    token_lists.push_back(std::move(r.tokens));
  }
  st.documents = docs.size();

  WordFilterParams params;
  params.min_tf = config.min_tf;
  params.min_len = config.min_len;
  params.top_stop = config.top_stop;
  params.abbrev_top = config.abbrev_top;
  b.words = build_word_vocabulary(token_lists, default_stopwords(), params);

  for (std::size_t i = 0; i < results.size(); ++i) {
    b.streams.push_back(build_token_stream(results[i].doc_id, token_lists[i], b.words,
                                           local_ids[i]));
  }

  const std::size_t n_eq = b.equations.size();
  std::vector<SltTupleSequence> seqs(n_eq);
  std::vector<std::string> failures(n_eq);
  const ParseMode mode = config.lenient_math ? ParseMode::kLenient : ParseMode::kStrict;
  parallel_for(n_eq, config.parallel, [&](std::size_t e) {
    const auto id = static_cast<std::uint32_t>(e);
    try {
      seqs[e] = tokenize_equation(id, b.equations.at(id).latex, mode, config.symbol_window);
    } catch (const ParseError& err) {
      seqs[e].eq_id = id;
      failures[e] = err.what();
    }
  });
  for (std::size_t e = 0; e < n_eq; ++e) {
    if (!failures[e].empty()) {
      st.warnings.push_back("equation " + std::to_string(e) + ": " + failures[e]);
    }
    if (seqs[e].units.empty()) ++st.untokenizable_equations;
  }
  if (n_eq > 0) {
    std::vector<std::uint32_t> weights;
    for (const auto& r : b.equations.records()) weights.push_back(r.occurrence_count);
    UnitCorpus units = build_unit_vocabulary(seqs, weights, config.unit_min_count);
    b.units = std::move(units.vocabulary);
    b.eq_units = std::move(units.sequences);
  }

  HeldOutParams hp;
  hp.per_equation = config.heldout_per_equation;
  hp.context_window = config.heldout_window;
  hp.n_negatives = config.heldout_negatives;
  hp.singleton_sample = config.singleton_sample;
  hp.seed = config.seed;
  b.heldout = build_heldout(b.streams, b.equations, b.words.size(), hp);
  if (b.heldout.skipped_equations > 0) {
    st.warnings.push_back(std::to_string(b.heldout.skipped_equations) +
                          " equations had too few surrounding words for held-out items");
  }
  return b;
}

void write_bundle(const CorpusBundle& b, const std::string& dir) {
  const IngestConfig& c = b.config;
  std::vector<std::pair<std::string, std::string>> files;

  files.emplace_back("summary.tsv", header_line("summary.tsv", c) + bundle_summary(b));

  std::string vocab = header_line("vocab.tsv", c);
  for (std::uint32_t i = 0; i < b.words.size(); ++i) {
    vocab += b.words.form(i) + "\t" + std::to_string(i) + "\t" + std::to_string(b.words.freq(i)) +
             "\n";
  }
  files.emplace_back("vocab.tsv", std::move(vocab));

  std::string eqs = header_line("equations.tsv", c);
  for (const auto& r : b.equations.records()) {
    eqs += std::to_string(r.eq_id) + "\t" + std::to_string(r.occurrence_count) + "\t" + r.latex +
           "\t" + r.doc_id + "\n";
  }
  files.emplace_back("equations.tsv", std::move(eqs));

  std::string units = header_line("units.tsv", c);
  for (std::uint32_t i = 0; i < b.units.size(); ++i) {
    units += b.units.form(i) + "\t" + std::to_string(i) + "\t" + std::to_string(b.units.freq(i)) +
             "\n";
  }
  files.emplace_back("units.tsv", std::move(units));

  std::string streams = header_line("streams.bin", c);
  put_u32(streams, static_cast<std::uint32_t>(b.streams.size()));
  for (const auto& s : b.streams) {
    put_u32(streams, static_cast<std::uint32_t>(s.doc_id.size()));
    streams += s.doc_id;
    put_u32(streams, static_cast<std::uint32_t>(s.items.size()));
    for (Item item : s.items) put_u32(streams, item.raw());
  }
  files.emplace_back("streams.bin", std::move(streams));

  std::string eq_units = header_line("eq_units.bin", c);
  put_u32(eq_units, static_cast<std::uint32_t>(b.eq_units.size()));
  for (const auto& list : b.eq_units) {
    put_u32(eq_units, static_cast<std::uint32_t>(list.size()));
    for (std::uint32_t u : list) put_u32(eq_units, u);
  }
  files.emplace_back("eq_units.bin", std::move(eq_units));

  files.emplace_back("heldout.valid.tsv",
                     heldout_tsv(b.heldout.validation, "heldout.valid.tsv", c));
  files.emplace_back("heldout.test.tsv", heldout_tsv(b.heldout.test, "heldout.test.tsv", c));

  const fs::path target = fs::absolute(dir).lexically_normal();
  const fs::path parent = target.parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  if (fs::exists(target) && (!fs::is_directory(target) || !looks_like_bundle(target))) {
    throw Error(ErrorKind::kInput, "refusing to replace " + target.string() +
                                       ": not an existing bundle");
  }
  const std::string suffix = "." + std::to_string(::getpid());
  const fs::path tmp = target.string() + ".tmp" + suffix;
  fs::remove_all(tmp, ec);
  fs::create_directory(tmp, ec);
  if (ec) throw Error(ErrorKind::kInput, "cannot create " + tmp.string() + ": " + ec.message());
  try {
    for (const auto& [name, contents] : files) {
      std::ofstream out(tmp / name, std::ios::binary);
      out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
      if (!out) throw Error(ErrorKind::kRuntime, "write failed: " + (tmp / name).string());
    }
    if (fs::exists(target)) {
      const fs::path old = target.string() + ".old" + suffix;
      fs::rename(target, old);
      fs::rename(tmp, target);
      fs::remove_all(old);
    } else {
      fs::rename(tmp, target);
    }
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    throw Error(ErrorKind::kRuntime, e.what());
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

CorpusBundle read_bundle(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::kInput, "bundle not found: " + dir);
  CorpusBundle b;
  for (const auto& row : read_rows(dir, "vocab.tsv", &b.config)) {
    const auto cols = split_tabs(row);
    if (cols.size() != 3) corrupt("vocab.tsv", "expected 3 columns");
    if (parse_u64("vocab.tsv", cols[1]) != b.words.size()) corrupt("vocab.tsv", "ids not dense");
    b.words.add(std::string(cols[0]), parse_u64("vocab.tsv", cols[2]));
  }
  for (const auto& row : read_rows(dir, "equations.tsv")) {
    const auto cols = split_tabs(row);
    if (cols.size() < 4) corrupt("equations.tsv", "expected 4 columns");
    EquationRecord r;
    r.eq_id = static_cast<std::uint32_t>(parse_u64("equations.tsv", cols[0]));
    r.occurrence_count = static_cast<std::uint32_t>(parse_u64("equations.tsv", cols[1]));
    r.latex = std::string(cols[2]);
    const std::size_t doc_start = cols[3].data() - row.data();
    r.doc_id = row.substr(doc_start);
    b.equations.restore(std::move(r));
  }
  for (const auto& row : read_rows(dir, "units.tsv")) {
    const auto cols = split_tabs(row);
    if (cols.size() != 3) corrupt("units.tsv", "expected 3 columns");
    if (parse_u64("units.tsv", cols[1]) != b.units.size()) corrupt("units.tsv", "ids not dense");
    b.units.add(std::string(cols[0]), parse_u64("units.tsv", cols[2]));
  }

  {
    BinReader r(read_file((fs::path(dir) / "streams.bin").string()), "streams.bin");
    const std::uint32_t n_docs = r.u32();
    for (std::uint32_t d = 0; d < n_docs; ++d) {
      TokenStream s;
      s.doc_id = r.bytes(r.u32());
      const std::uint32_t n = r.u32();
      r.need(static_cast<std::uint64_t>(n) * 4);
      s.items.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        const Item item = Item::from_raw(r.u32());
        if ((item.is_word() && item.id() >= b.words.size()) ||
            (item.is_equation() && item.id() >= b.equations.size())) {
          corrupt("streams.bin", "item id out of range");
        }
        s.items.push_back(item);
      }
      b.streams.push_back(std::move(s));
    }
    if (!r.done()) corrupt("streams.bin", "trailing bytes");
  }
  {
    BinReader r(read_file((fs::path(dir) / "eq_units.bin").string()), "eq_units.bin");
    const std::uint32_t n = r.u32();
    if (n != 0 && n != b.equations.size()) corrupt("eq_units.bin", "equation count mismatch");
    for (std::uint32_t e = 0; e < n; ++e) {
      const std::uint32_t len = r.u32();
      r.need(static_cast<std::uint64_t>(len) * 4);
      std::vector<std::uint32_t> list(len);
      for (auto& u : list) {
        u = r.u32();
        if (u != kUnitGap && u >= b.units.size()) corrupt("eq_units.bin", "unit id out of range");
      }
      b.eq_units.push_back(std::move(list));
    }
    if (!r.done()) corrupt("eq_units.bin", "trailing bytes");
  }
  b.heldout.validation = parse_heldout(dir, "heldout.valid.tsv", Split::kValidation);
  b.heldout.test = parse_heldout(dir, "heldout.test.tsv", Split::kTest);
  for (const auto* set : {&b.heldout.validation, &b.heldout.test}) {
    for (const auto& it : *set) {
      if (it.doc >= b.streams.size() || it.position >= b.streams[it.doc].items.size()) {
        corrupt("heldout", "position out of range");
      }
    }
  }
  return b;
}

std::string bundle_summary(const CorpusBundle& b) {
  return "documents\twords\tequations\tunits\n" + std::to_string(b.streams.size()) + "\t" +
         std::to_string(b.words.size()) + "\t" + std::to_string(b.equations.size()) + "\t" +
         std::to_string(b.units.size()) + "\n";
}

TrainingData training_data(const CorpusBundle& b) {
  TrainingData d;
  d.streams = b.streams;
  d.word_freq = b.words.frequencies();
  for (const auto& r : b.equations.records()) d.equation_freq.push_back(r.occurrence_count);
  d.unit_freq = b.units.frequencies();
  d.eq_units = b.eq_units;
  d.eq_units.resize(b.equations.size());
  d.validation = b.heldout.validation;
  d.mask = HeldOutMask(b.heldout);
  return d;
}

}  // namespace eqemb

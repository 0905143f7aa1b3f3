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

#include "eqemb/model_io.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqemb/error.h"
#include "eqemb/slt.h"

namespace eqemb {
namespace {

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(double v) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    u32(bits);
  }
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void matrix(const std::vector<double>& m) {
    for (double v : m) f32(v);
  }
  std::string& data() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& in, std::size_t end) : in_(in), end_(end) {}

  void need(std::size_t n) const {
    if (end_ - pos_ < n) throw Error(ErrorKind::kCorrupt, "truncated model file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  double f32() {
    const std::uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return f;
  }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void matrix(std::vector<double>& m) {
    need(m.size() * 4);
    for (double& v : m) v = f32();
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  bool done() const { return pos_ == end_; }

 private:
  const std::string& in_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kNone: return "none";
    case Provenance::kTrained: return "trained";
    case Provenance::kUnitAverage: return "unit-average";
  }
  return "?";
}

std::string serialize_model(const TrainedModel& model) {
  const ModelTables& t = model.tables;
  const bool with_units = model.config.mode == Mode::kEqEmbU;
  Writer w;
  w.bytes(kModelMagic, sizeof kModelMagic);
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.config.mode));
  w.u32(static_cast<std::uint32_t>(t.dim));
  w.u32(static_cast<std::uint32_t>(t.words.rows()));
  w.u32(static_cast<std::uint32_t>(t.equations.rows()));
  w.u32(with_units ? static_cast<std::uint32_t>(t.units.rows()) : 0);
  w.u32(static_cast<std::uint32_t>(model.provenance));
  w.u64(model.config.seed);
  w.str(model_config_echo(model.config));
  w.matrix(t.words.rho_data());
  w.matrix(t.words.alpha_data());
  w.matrix(t.equations.rho_data());
  w.matrix(t.equations.alpha_data());
  if (with_units) {
    w.matrix(t.units.rho_data());
    w.matrix(t.units.alpha_data());
    for (std::size_t e = 0; e < t.equations.rows(); ++e) {
      const auto& list = e < t.eq_units.size() ? t.eq_units[e] : std::vector<std::uint32_t>{};
      w.u32(static_cast<std::uint32_t>(list.size()));
      for (std::uint32_t u : list) w.u32(u);
    }
  }
  const std::uint64_t sum = fnv1a(w.data().data(), w.data().size());
  w.u64(sum);
  return std::move(w.data());
}

ModelFile deserialize_model(const std::string& bytes) {
  if (bytes.size() < sizeof kModelMagic + 8 ||
      std::memcmp(bytes.data(), kModelMagic, sizeof kModelMagic) != 0) {
    throw Error(ErrorKind::kCorrupt, "not a model file");
  }
  const std::size_t body = bytes.size() - 8;
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) {
    stored |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[body + i])) << (8 * i);
  }
  if (fnv1a(bytes.data(), body) != stored) {
    throw Error(ErrorKind::kCorrupt, "model checksum mismatch");
  }
  Reader r(bytes, body);
  r.skip(sizeof kModelMagic);

  ModelFile m;
  ModelHeader& h = m.header;
  h.version = r.u32();
  if (h.version != kModelFormatVersion) {
    throw Error(ErrorKind::kCorrupt, "unsupported model version " + std::to_string(h.version));
  }
  const std::uint32_t mode = r.u32();
  if (mode > static_cast<std::uint32_t>(Mode::kEqEmbU)) {
    throw Error(ErrorKind::kCorrupt, "bad mode in model header");
  }
  h.mode = static_cast<Mode>(mode);
  h.dim = r.u32();
  h.n_words = r.u32();
  h.n_equations = r.u32();
  h.n_units = r.u32();
  const std::uint32_t prov = r.u32();
  if (prov > static_cast<std::uint32_t>(Provenance::kUnitAverage) || h.dim == 0) {
    throw Error(ErrorKind::kCorrupt, "bad model header");
  }
  h.provenance = static_cast<Provenance>(prov);
  h.seed = r.u64();
  h.config_echo = r.str();

  // Reject sizes the remaining bytes cannot hold before allocating.
  const std::uint64_t cells = (static_cast<std::uint64_t>(h.n_words) + h.n_equations +
                               (h.mode == Mode::kEqEmbU ? h.n_units : 0)) *
                              h.dim * 2;
  r.need(static_cast<std::size_t>(std::min<std::uint64_t>(cells * 4, SIZE_MAX)));

  ModelTables& t = m.tables;
  t.dim = h.dim;
  t.words = EmbeddingTable(ObjectClass::kWord, h.n_words, h.dim);
  t.equations = EmbeddingTable(ObjectClass::kEquation, h.n_equations, h.dim);
  t.units = EmbeddingTable(ObjectClass::kUnit, h.n_units, h.dim);
  r.matrix(t.words.rho_storage());
  r.matrix(t.words.alpha_storage());
  r.matrix(t.equations.rho_storage());
  r.matrix(t.equations.alpha_storage());
  t.eq_units.assign(h.n_equations, {});
  if (h.mode == Mode::kEqEmbU) {
    r.matrix(t.units.rho_storage());
    r.matrix(t.units.alpha_storage());
    for (auto& list : t.eq_units) {
      const std::uint32_t n = r.u32();
      r.need(static_cast<std::size_t>(n) * 4);
      list.resize(n);
      for (auto& u : list) {
        u = r.u32();
        if (u != kUnitGap && u >= h.n_units) {
          throw Error(ErrorKind::kCorrupt, "unit id out of range in model file");
        }
      }
    }
  } else if (h.n_units != 0) {
    throw Error(ErrorKind::kCorrupt, "unit table in a model without units");
  }
  if (!r.done()) throw Error(ErrorKind::kCorrupt, "trailing bytes in model file");
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kInput, "cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      std::remove(tmp.c_str());
      throw Error(ErrorKind::kRuntime, "write failed: " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::kRuntime, "cannot rename " + tmp + ": " + ec.message());
  }
}

void save_model(const TrainedModel& model, const std::string& path) {
  write_file_atomic(path, serialize_model(model));
}

ModelFile load_model(const std::string& path) { return deserialize_model(read_file(path)); }

std::string describe_header(const ModelHeader& h) {
  std::ostringstream out;
  out << "format_version\t" << h.version << "\n"
      << "mode\t" << mode_name(h.mode) << "\n"
      << "K\t" << h.dim << "\n"
      << "words\t" << h.n_words << "\n"
      << "equations\t" << h.n_equations << "\n"
      << "units\t" << h.n_units << "\n"
      << "equation_vectors\t" << provenance_name(h.provenance) << "\n"
      << "seed\t" << h.seed << "\n";
  std::istringstream echo(h.config_echo);
  for (std::string line; std::getline(echo, line);) {
    if (!line.empty()) out << "config\t" << line << "\n";
  }
  return out.str();
}

}  // namespace eqemb

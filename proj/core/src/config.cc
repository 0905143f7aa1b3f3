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

#include "eqemb/config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "eqemb/error.h"

namespace eqemb {
namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::kInput,
              "bad value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v);
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad_value(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::size_t> to_size_list(std::string_view key, std::string_view v) {
  std::vector<std::size_t> out;
  for (auto part : split_list(v)) out.push_back(to_u64(key, part));
  if (out.empty()) bad_value(key, v);
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

struct KeyHandler {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> apply;
};

const std::map<std::string, KeyHandler, std::less<>>& handlers() {
  static const auto* table = [] {
    auto* t = new std::map<std::string, KeyHandler, std::less<>>();
    auto model_size = [t](const char* name, std::size_t ModelConfig::*field) {
      (*t)[name] = {[field](RunConfig& c, std::string_view k, std::string_view v) {
        c.model.*field = to_u64(k, v);
      }};
    };
    auto ingest_size = [t](const char* name, std::size_t IngestConfig::*field) {
      (*t)[name] = {[field](RunConfig& c, std::string_view k, std::string_view v) {
        c.ingest.*field = to_u64(k, v);
      }};
    };
    auto path = [t](const char* name, std::string RunConfig::*field) {
      (*t)[name] = {[field](RunConfig& c, std::string_view, std::string_view v) {
        c.*field = std::string(v);
      }};
    };
    model_size("K", &ModelConfig::dim);
    model_size("W", &ModelConfig::word_window);
    model_size("E", &ModelConfig::eq_window);
    model_size("c_m", &ModelConfig::eq_context_window);
    model_size("cs_u", &ModelConfig::unit_window);
    model_size("n_neg", &ModelConfig::n_negatives);
    model_size("max_epochs", &ModelConfig::max_epochs);
    model_size("threads", &ModelConfig::threads);
    (*t)["mode"] = {[](RunConfig& c, std::string_view, std::string_view v) {
      c.model.mode = parse_mode(v);
    }};
    (*t)["lr"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.model.learning_rate = to_double(k, v);
    }};
    (*t)["init_scale"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.model.init_scale = to_double(k, v);
    }};
    (*t)["neg_power"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.model.negative_power = to_double(k, v);
    }};
    (*t)["seed"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.model.seed = c.ingest.seed = to_u64(k, v);
    }};
    (*t)["unit_mean"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.model.unit_mean = to_bool(k, v);
    }};
    (*t)["unit_training"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == "two_pass") c.model.unit_training = UnitTraining::kTwoPass;
      else if (v == "joint") c.model.unit_training = UnitTraining::kJoint;
      else bad_value(k, v);
    }};
    (*t)["strict_grid"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.model.strict_grid = to_bool(k, v);
    }};
    (*t)["parallel"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.model.parallel = c.ingest.parallel = to_bool(k, v);
    }};

    ingest_size("symbol_window", &IngestConfig::symbol_window);
    ingest_size("min_len", &IngestConfig::min_len);
    ingest_size("top_stop", &IngestConfig::top_stop);
    ingest_size("abbrev_top", &IngestConfig::abbrev_top);
    ingest_size("heldout_per_equation", &IngestConfig::heldout_per_equation);
    ingest_size("heldout_window", &IngestConfig::heldout_window);
    ingest_size("heldout_negatives", &IngestConfig::heldout_negatives);
    ingest_size("singleton_sample", &IngestConfig::singleton_sample);
    (*t)["unit_min_count"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.ingest.unit_min_count = to_u64(k, v);
    }};
    (*t)["min_tf"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.ingest.min_tf = to_u64(k, v);
    }};
    (*t)["lenient_math"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.ingest.lenient_math = to_bool(k, v);
    }};

    path("corpus_dir", &RunConfig::corpus_dir);
    path("bundle_dir", &RunConfig::bundle_dir);
    path("model_path", &RunConfig::model_path);
    path("report_path", &RunConfig::report_path);
    (*t)["grid_modes"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.grid.modes.clear();
      for (auto m : split_list(v)) c.grid.modes.push_back(parse_mode(m));
      if (c.grid.modes.empty()) bad_value(k, v);
    }};
    (*t)["grid_K"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.grid.dims = to_size_list(k, v);
    }};
    (*t)["grid_W"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.grid.word_windows = to_size_list(k, v);
    }};
    (*t)["grid_E"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      c.grid.eq_windows = to_size_list(k, v);
    }};
    (*t)["pseudo_ll"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == "bernoulli") c.pseudo_reading = PseudoReading::kBernoulli;
      else if (v == "softmax") c.pseudo_reading = PseudoReading::kSoftmax;
      else bad_value(k, v);
    }};
    (*t)["word2eq_vector"] = {[](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == "rho") c.word2eq_vector = EquationVectorKind::kRho;
      else if (v == "alpha") c.word2eq_vector = EquationVectorKind::kAlpha;
      else bad_value(k, v);
    }};
    return t;
  }();
  return *table;
}

bool even_positive(std::size_t x) { return x > 0 && x % 2 == 0; }

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInput, what); };
  if (dim == 0) fail("K must be positive");
  if (!even_positive(word_window)) fail("W must be even and positive");
  if (!even_positive(eq_window)) fail("E must be even and positive");
  if (eq_window < word_window) fail("E must be at least W");
  if (!even_positive(eq_context_window)) fail("c_m must be even and positive");
  if (!even_positive(unit_window)) fail("cs_u must be even and positive");
  if (n_negatives == 0) fail("n_neg must be positive");
  if (!(learning_rate > 0.0)) fail("lr must be positive");
  if (max_epochs == 0) fail("max_epochs must be positive");
  if (init_scale < 0.0) fail("init_scale must not be negative");
  if (!(negative_power >= 0.0)) fail("neg_power must not be negative");
  if (strict_grid) {
    auto in = [](std::size_t x, std::initializer_list<std::size_t> set) {
      return std::find(set.begin(), set.end(), x) != set.end();
    };
    if (!in(dim, {25, 50, 75, 100})) fail("K outside {25,50,75,100}");
    if (!in(word_window, {4, 8, 16})) fail("W outside {4,8,16}");
    if (!in(eq_window, {8, 16})) fail("E outside {8,16}");
  }
}

void ConfigValues::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInput, "cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  parse_text(text.str(), path);
}

void ConfigValues::parse_text(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string_view::npos) {
      throw Error(ErrorKind::kInput, std::string(origin) + ":" + std::to_string(line_no) +
                                         ": expected key=value");
    }
    set(line);
  }
}

void ConfigValues::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorKind::kInput, "expected key=value, got '" + std::string(assignment) + "'");
  }
  set(std::string(trim(assignment.substr(0, eq))),
      std::string(trim(assignment.substr(eq + 1))));
}

void ConfigValues::set(std::string key, std::string value) {
  if (!handlers().count(key)) throw Error(ErrorKind::kInput, "unknown config key: " + key);
  values_[std::move(key)] = std::move(value);
}

RunConfig resolve_config(const ConfigValues& values) {
  RunConfig config;
  for (const auto& [key, value] : values.values()) {
    auto it = handlers().find(key);
    if (it == handlers().end()) throw Error(ErrorKind::kInput, "unknown config key: " + key);
    it->second.apply(config, key, value);
  }
  config.model.validate();
  return config;
}

std::string model_config_echo(const ModelConfig& c) {
  std::map<std::string, std::string> kv = {
      {"mode", mode_name(c.mode)},
      {"K", std::to_string(c.dim)},
      {"W", std::to_string(c.word_window)},
      {"E", std::to_string(c.eq_window)},
      {"c_m", std::to_string(c.eq_context_window)},
      {"cs_u", std::to_string(c.unit_window)},
      {"n_neg", std::to_string(c.n_negatives)},
      {"lr", fmt_double(c.learning_rate)},
      {"max_epochs", std::to_string(c.max_epochs)},
      {"init_scale", fmt_double(c.effective_init_scale())},
      {"seed", std::to_string(c.seed)},
      {"neg_power", fmt_double(c.negative_power)},
      {"unit_mean", c.unit_mean ? "true" : "false"},
      {"unit_training", c.unit_training == UnitTraining::kJoint ? "joint" : "two_pass"},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string ingest_config_echo(const IngestConfig& c) {
  std::map<std::string, std::string> kv = {
      {"symbol_window", std::to_string(c.symbol_window)},
      {"unit_min_count", std::to_string(c.unit_min_count)},
      {"lenient_math", c.lenient_math ? "true" : "false"},
      {"min_tf", std::to_string(c.min_tf)},
      {"min_len", std::to_string(c.min_len)},
      {"top_stop", std::to_string(c.top_stop)},
      {"abbrev_top", std::to_string(c.abbrev_top)},
      {"heldout_per_equation", std::to_string(c.heldout_per_equation)},
      {"heldout_window", std::to_string(c.heldout_window)},
      {"heldout_negatives", std::to_string(c.heldout_negatives)},
      {"singleton_sample", std::to_string(c.singleton_sample)},
      {"seed", std::to_string(c.seed)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

ConfigValues parse_echo(std::string_view echo) {
  ConfigValues values;
  values.parse_text(echo, "<echo>");
  return values;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : handlers()) keys.push_back(k);
  return keys;
}

}  // namespace eqemb

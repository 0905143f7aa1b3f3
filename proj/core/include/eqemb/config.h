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
#include <string_view>
#include <vector>

#include "eqemb/embedding.h"

namespace eqemb {

enum class UnitTraining { kTwoPass, kJoint };
enum class PseudoReading { kBernoulli, kSoftmax };
enum class EquationVectorKind { kRho, kAlpha };

struct ModelConfig {
  Mode mode = Mode::kEqEmb;
  std::size_t dim = 25;
  std::size_t word_window = 4;
  std::size_t eq_window = 16;
  std::size_t eq_context_window = 16;
  std::size_t unit_window = 4;
  std::size_t n_negatives = 10;
  double learning_rate = 0.1;
  std::size_t max_epochs = 20;
  double init_scale = 0.0;  // 0 selects 0.5 / dim
  std::uint64_t seed = 1;
  double negative_power = 1.0;  // 0 samples negatives uniformly
  bool unit_mean = false;
  UnitTraining unit_training = UnitTraining::kTwoPass;
  bool strict_grid = false;  // K in {25,50,75,100}, W in {4,8,16}, E in {8,16}
  bool parallel = false;
  std::size_t threads = 0;  // 0 selects hardware concurrency

  double effective_init_scale() const {
    return init_scale > 0.0 ? init_scale : 0.5 / static_cast<double>(dim);
  }

  // Throws Error(kInput) on an inconsistent setting.
  void validate() const;
};

struct IngestConfig {
  std::size_t symbol_window = 1;
  std::uint64_t unit_min_count = 1;
  bool lenient_math = true;
  std::uint64_t min_tf = 10;
  std::size_t min_len = 4;
  std::size_t top_stop = 25;
  std::size_t abbrev_top = 50;
  std::size_t heldout_per_equation = 2;
  std::size_t heldout_window = 4;
  std::size_t heldout_negatives = 10;
  std::size_t singleton_sample = 2000;
  std::uint64_t seed = 1;
  bool parallel = false;
};

struct GridSpec {
  std::vector<Mode> modes = {Mode::kBaseline, Mode::kEqEmb, Mode::kEqEmbU};
  std::vector<std::size_t> dims = {25};
  std::vector<std::size_t> word_windows = {4, 8, 16};
  std::vector<std::size_t> eq_windows = {8, 16};
};

struct RunConfig {
  std::string corpus_dir;
  std::string bundle_dir = "bundle";
  std::string model_path = "model.bin";
  std::string report_path;
  ModelConfig model;
  IngestConfig ingest;
  GridSpec grid;
  PseudoReading pseudo_reading = PseudoReading::kBernoulli;
  EquationVectorKind word2eq_vector = EquationVectorKind::kRho;
};

// Flat key=value settings. Later assignments override earlier ones, so
// loading a file and then applying command-line overrides gives the
// CLI > file > defaults precedence.
class ConfigValues {
 public:
  // '#' starts a comment; blank lines are ignored. Throws Error(kInput).
  void load_file(const std::string& path);
  void parse_text(std::string_view text, std::string_view origin = "<text>");
  void set(std::string_view assignment);  // "key=value"
  void set(std::string key, std::string value);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Applies settings over the defaults. Unknown keys and malformed values
// throw Error(kInput).
RunConfig resolve_config(const ConfigValues& values);

// Every model-relevant key with its resolved value, one "key=value" per
// line in key order. Paths are left out so artifacts built from the same
// inputs in different places stay identical.
std::string model_config_echo(const ModelConfig& config);
std::string ingest_config_echo(const IngestConfig& config);

// Parses an echo back into settings.
ConfigValues parse_echo(std::string_view echo);

std::vector<std::string> config_keys();

}  // namespace eqemb

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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eqemb/config.h"
#include "eqemb/corpus.h"
#include "eqemb/embedding.h"

namespace eqemb {

// Everything the training passes read from a corpus bundle.
struct TrainingData {
  std::span<const TokenStream> streams;
  std::vector<double> word_freq;      // per word id
  std::vector<double> equation_freq;  // occurrence count per eq id
  std::vector<double> unit_freq;      // per unit id
  std::vector<std::vector<std::uint32_t>> eq_units;
  std::span<const HeldOutItem> validation;
  HeldOutMask mask;
  // Called with (doc, position) for every word target about to be trained.
  // Test hook; leave empty in normal use. Not safe with parallel training.
  std::function<void(std::uint32_t, std::uint32_t)> on_word_target;
};

// Where the equation vectors of a model come from.
enum class Provenance : std::uint32_t { kNone = 0, kTrained = 1, kUnitAverage = 2 };

struct EpochRecord {
  std::string pass;  // "words", "equations", "units" or "joint"
  std::size_t epoch = 0;
  double score = 0.0;  // NaN when there is no validation set
  double seconds = 0.0;
  std::size_t pairs = 0;
};

struct PassResult {
  std::vector<EpochRecord> epochs;
  std::size_t kept_epoch = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Allocates all tables and draws their initial values from the init stream:
// word rho, word alpha, equation rho, equation alpha, unit rho, unit alpha.
ModelTables init_tables(const TrainingData& data, const ModelConfig& config);

// First pass: words only, equations treated as gaps.
PassResult train_pass_words(const TrainingData& data, const ModelConfig& config,
                            ModelTables& tables, const EpochCallback& on_epoch = {});

// Second pass of EqEmb. The word table is frozen for the duration.
PassResult train_pass_equations(const TrainingData& data, const ModelConfig& config,
                                ModelTables& tables, const EpochCallback& on_epoch = {});

// Unit pass of EqEmb-U (frozen words), or the joint single pass when the
// config asks for it. Equation vectors are then set to unit averages.
PassResult train_eqemb_u(const TrainingData& data, const ModelConfig& config,
                         ModelTables& tables, const EpochCallback& on_epoch = {});

// Sets each equation's rho and alpha to the mean of its units; equations
// without units get zero vectors.
void derive_equation_vectors(ModelTables& tables);

struct TrainedModel {
  ModelConfig config;
  ModelTables tables;
  Provenance provenance = Provenance::kNone;
  std::vector<EpochRecord> trace;
};

// Runs the passes for config.mode. On divergence the tables hold the last
// good snapshot and DivergenceError propagates after `partial` is filled.
TrainedModel train_model(const TrainingData& data, const ModelConfig& config,
                         const EpochCallback& on_epoch = {},
                         TrainedModel* partial = nullptr);

}  // namespace eqemb

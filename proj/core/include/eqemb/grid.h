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

#include <span>
#include <string>
#include <vector>

#include "eqemb/config.h"
#include "eqemb/trainer.h"

namespace eqemb {

struct GridRun {
  ModelConfig config;
  bool ok = false;
  std::string error;
  double valid_pseudo = 0.0;
  double test_pseudo = 0.0;
  double valid_predictive = 0.0;
  std::size_t epochs = 0;
  bool selected = false;
};

// Every (mode, K, W, E) with E >= W. Baseline ignores E, so it gets one run
// per (K, W) with E pinned to W.
std::vector<ModelConfig> enumerate_grid(const GridSpec& grid, const ModelConfig& base);

// Trains and scores every config. A failing run is recorded and the rest
// continue. Within each (mode, K) the run with the best validation pseudo
// log-likelihood is marked selected; ties keep the earlier run.
std::vector<GridRun> grid_select(std::span<const ModelConfig> configs, const TrainingData& data,
                                 std::span<const HeldOutItem> test,
                                 PseudoReading reading = PseudoReading::kBernoulli);

// Columns: mode, K, W, E, valid_pseudo_ll, test_pseudo_ll, epochs, selected,
// status.
std::string grid_report_tsv(std::span<const GridRun> runs);

}  // namespace eqemb

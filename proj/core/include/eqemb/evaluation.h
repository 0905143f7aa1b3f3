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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqemb/config.h"
#include "eqemb/corpus.h"
#include "eqemb/embedding.h"

namespace eqemb {

// Read-only view used to score held-out items. Baseline scoring drops
// equations from contexts; EqEmb-U scoring replaces each equation with the
// alpha vectors of its units.
struct ScoringModel {
  const ModelTables* tables = nullptr;
  Mode mode = Mode::kEqEmb;
  bool unit_mean = false;
};

// Sum of the context's alpha vectors, or nullopt if an item has no vector.
std::optional<std::vector<double>> context_vector(std::span<const Item> context,
                                                  const ScoringModel& model);

// Softmax over the target and its negatives; nullopt when the item cannot
// be scored.
std::optional<double> predictive_log_likelihood(const HeldOutItem& item,
                                                const ScoringModel& model);

std::optional<double> pseudo_log_likelihood(
    const HeldOutItem& item, const ScoringModel& model,
    PseudoReading reading = PseudoReading::kBernoulli);

// Raw-score forms shared with the oracles in tests.
double softmax_log_likelihood(double target_score, std::span<const double> negative_scores);
double bernoulli_pseudo_log_likelihood(double target_score,
                                       std::span<const double> negative_scores);
double softmax_pseudo_log_likelihood(double target_score,
                                     std::span<const double> negative_scores);

// Compensated (Neumaier) sum, reduced in index order.
double compensated_sum(std::span<const double> values);

struct EvalReport {
  std::string split;
  double mean_predictive = 0.0;
  double mean_pseudo = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
  std::string config_echo;
};

EvalReport evaluate(std::string split, std::span<const HeldOutItem> items,
                    const ScoringModel& model,
                    PseudoReading reading = PseudoReading::kBernoulli);

// Mean predictive log-likelihood; empty or fully skipped sets give nullopt.
std::optional<double> validation_score(std::span<const HeldOutItem> items,
                                       const ScoringModel& model);

struct StopDecision {
  bool stop = false;
  std::size_t best_epoch = 0;  // 1-based; 0 when the trace is empty
};

// Stops at the first epoch whose score does not exceed its predecessor's
// (ties stop) and keeps the predecessor; otherwise keeps the last epoch and
// stops once max_epochs scores exist.
StopDecision early_stopping_controller(std::span<const double> trace,
                                       std::size_t max_epochs = 20);

}  // namespace eqemb

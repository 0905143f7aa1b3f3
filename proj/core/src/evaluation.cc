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

#include "eqemb/evaluation.h"

#include <algorithm>
#include <cmath>

#include "eqemb/error.h"
#include "eqemb/slt.h"

namespace eqemb {
namespace {

double clamp_probability(double p) {
  return std::clamp(p, kLogEpsilon, 1.0 - kLogEpsilon);
}

bool add_alpha(std::vector<double>& sum, const EmbeddingTable& table, std::uint32_t id,
               double weight) {
  if (id >= table.rows()) return false;
  const auto a = table.alpha(id);
  for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += weight * a[k];
  return true;
}

struct Scores {
  double target = 0.0;
  std::vector<double> negatives;
};

std::optional<Scores> item_scores(const HeldOutItem& item, const ScoringModel& model) {
  const auto& words = model.tables->words;
  auto ctx = context_vector(item.context, model);
  if (!ctx || item.target >= words.rows()) return std::nullopt;
  Scores s;
  s.target = dot(words.rho(item.target), *ctx);
  s.negatives.reserve(item.negatives.size());
  for (std::uint32_t n : item.negatives) {
    if (n >= words.rows()) return std::nullopt;
    s.negatives.push_back(dot(words.rho(n), *ctx));
  }
  return s;
}

}  // namespace

std::optional<std::vector<double>> context_vector(std::span<const Item> context,
                                                  const ScoringModel& model) {
  const ModelTables& t = *model.tables;
  std::vector<double> sum(t.dim, 0.0);
  for (Item item : context) {
    if (item.is_gap()) return std::nullopt;
    if (item.is_word()) {
      if (!add_alpha(sum, t.words, item.id(), 1.0)) return std::nullopt;
      continue;
    }
    switch (model.mode) {
      case Mode::kBaseline:
        break;
      case Mode::kEqEmb:
        if (!add_alpha(sum, t.equations, item.id(), 1.0)) return std::nullopt;
        break;
      case Mode::kEqEmbU: {
        if (item.id() >= t.eq_units.size()) return std::nullopt;
        const auto& units = t.eq_units[item.id()];
        std::size_t n = 0;
        for (std::uint32_t u : units) n += u != kUnitGap;
        for (std::uint32_t u : units) {
          if (u == kUnitGap) continue;
          if (!add_alpha(sum, t.units, u, model.unit_mean ? 1.0 / n : 1.0)) {
            return std::nullopt;
          }
        }
        break;
      }
    }
  }
  return sum;
}

double softmax_log_likelihood(double target_score, std::span<const double> negative_scores) {
  double m = target_score;
  for (double s : negative_scores) m = std::max(m, s);
  double total = 0.0;
  for (double s : negative_scores) total += std::exp(s - m);
  total += std::exp(target_score - m);
  // When the target holds the maximum its numerator is exactly 1, and the
  // quotient form keeps the uniform case exact.
  if (target_score == m) return std::log(1.0 / total);
  return target_score - m - std::log(total);
}

double bernoulli_pseudo_log_likelihood(double target_score,
                                       std::span<const double> negative_scores) {
  double out = std::log(clamp_probability(sigmoid(target_score)));
  if (negative_scores.empty()) return out;
  std::vector<double> terms;
  terms.reserve(negative_scores.size());
  for (double s : negative_scores) terms.push_back(std::log(clamp_probability(sigmoid(-s))));
  return out + compensated_sum(terms) / static_cast<double>(negative_scores.size());
}

double softmax_pseudo_log_likelihood(double target_score,
                                     std::span<const double> negative_scores) {
  double m = target_score;
  for (double s : negative_scores) m = std::max(m, s);
  double total = std::exp(target_score - m);
  for (double s : negative_scores) total += std::exp(s - m);
  double out = std::log(clamp_probability(std::exp(target_score - m) / total));
  if (negative_scores.empty()) return out;
  std::vector<double> terms;
  for (double s : negative_scores) {
    const double e = std::exp(s - m);
    terms.push_back(std::log(clamp_probability((total - e) / total)));
  }
  return out + compensated_sum(terms) / static_cast<double>(negative_scores.size());
}

std::optional<double> predictive_log_likelihood(const HeldOutItem& item,
                                                const ScoringModel& model) {
  auto s = item_scores(item, model);
  if (!s) return std::nullopt;
  return softmax_log_likelihood(s->target, s->negatives);
}

std::optional<double> pseudo_log_likelihood(const HeldOutItem& item,
                                            const ScoringModel& model,
                                            PseudoReading reading) {
  auto s = item_scores(item, model);
  if (!s) return std::nullopt;
  return reading == PseudoReading::kBernoulli
             ? bernoulli_pseudo_log_likelihood(s->target, s->negatives)
             : softmax_pseudo_log_likelihood(s->target, s->negatives);
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

EvalReport evaluate(std::string split, std::span<const HeldOutItem> items,
                    const ScoringModel& model, PseudoReading reading) {
  EvalReport report;
  report.split = std::move(split);
  std::vector<double> pred;
  std::vector<double> pseudo;
  for (const auto& item : items) {
    auto p = predictive_log_likelihood(item, model);
    auto q = pseudo_log_likelihood(item, model, reading);
    if (!p || !q) {
      ++report.skipped;
      continue;
    }
    pred.push_back(*p);
    pseudo.push_back(*q);
  }
  report.count = pred.size();
  if (report.count > 0) {
    report.mean_predictive = compensated_sum(pred) / static_cast<double>(report.count);
    report.mean_pseudo = compensated_sum(pseudo) / static_cast<double>(report.count);
  }
  return report;
}

std::optional<double> validation_score(std::span<const HeldOutItem> items,
                                       const ScoringModel& model) {
  std::vector<double> scores;
  for (const auto& item : items) {
    if (auto p = predictive_log_likelihood(item, model)) scores.push_back(*p);
  }
  if (scores.empty()) return std::nullopt;
  return compensated_sum(scores) / static_cast<double>(scores.size());
}

StopDecision early_stopping_controller(std::span<const double> trace,
                                       std::size_t max_epochs) {
  StopDecision d;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i > 0 && !(trace[i] > trace[i - 1])) {
      d.stop = true;
      d.best_epoch = i;
      return d;
    }
    d.best_epoch = i + 1;
    if (i + 1 >= max_epochs) {
      d.stop = true;
      return d;
    }
  }
  return d;
}

}  // namespace eqemb

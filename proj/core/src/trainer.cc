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

#include "eqemb/trainer.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "eqemb/context.h"
#include "eqemb/error.h"
#include "eqemb/evaluation.h"
#include "eqemb/rng.h"
#include "eqemb/slt.h"

namespace eqemb {
namespace {

constexpr std::uint64_t kInitStream = 10;
constexpr std::uint64_t kWordStream = 11;
constexpr std::uint64_t kEquationStream = 12;
constexpr std::uint64_t kUnitStream = 13;
constexpr std::uint64_t kJointStream = 14;

// Context under construction: weighted alpha rows with duplicates merged.
class ContextBuilder {
 public:
  void clear() { items_.clear(); }
  bool empty() const { return items_.empty(); }
  const std::vector<WeightedRef>& items() const { return items_; }

  void add(ItemRef ref, double weight = 1.0) {
    for (auto& it : items_) {
      if (it.ref == ref) {
        it.weight += weight;
        return;
      }
    }
    items_.push_back({ref, weight});
  }

  void add_units(std::span<const std::uint32_t> units, bool mean) {
    std::size_t n = 0;
    for (std::uint32_t u : units) n += u != kUnitGap;
    for (std::uint32_t u : units) {
      if (u != kUnitGap) add(ItemRef::unit(u), mean ? 1.0 / static_cast<double>(n) : 1.0);
    }
  }

 private:
  std::vector<WeightedRef> items_;
};

// One positive pair and its negatives, sharing a context. The context sum
// is formed once; each target's rho is updated as soon as its gradient is
// known, and the accumulated context gradient is applied to every distinct
// context row at the end. Frozen tables are read but never written.
class Stepper {
 public:
  Stepper(ModelTables& tables, double learning_rate, bool concurrent)
      : t_(tables),
        lr_(learning_rate),
        concurrent_(concurrent),
        ctx_(tables.dim),
        ctx_grad_(tables.dim),
        row_(tables.dim),
        grad_(tables.dim) {}

  void step(ItemRef positive, const ContextBuilder& context, const DiscreteSampler& sampler,
            std::size_t n_negatives, Rng& rng) {
    const std::size_t dim = t_.dim;
    std::fill(ctx_.begin(), ctx_.end(), 0.0);
    std::fill(ctx_grad_.begin(), ctx_grad_.end(), 0.0);
    for (const auto& [ref, w] : context.items()) {
      t_.table(ref.cls).load(Field::kAlpha, ref.id, row_, concurrent_);
      for (std::size_t k = 0; k < dim; ++k) ctx_[k] += w * row_[k];
    }
    EmbeddingTable& targets = t_.table(positive.cls);
    const bool trainable_target = !targets.frozen();
    auto update = [&](std::uint32_t id, int label) {
      targets.load(Field::kRho, id, row_, concurrent_);
      const double g = sigmoid(dot(row_, ctx_)) - label;
      for (std::size_t k = 0; k < dim; ++k) ctx_grad_[k] += g * row_[k];
      if (trainable_target) {
        for (std::size_t k = 0; k < dim; ++k) grad_[k] = g * ctx_[k];
        targets.apply_adagrad(Field::kRho, id, grad_, lr_, concurrent_);
      }
    };
    update(positive.id, 1);
    for (std::size_t n = 0; n < n_negatives; ++n) {
      const std::uint32_t neg = sampler.sample(rng);
      if (neg != positive.id) update(neg, 0);
    }
    for (const auto& [ref, w] : context.items()) {
      EmbeddingTable& table = t_.table(ref.cls);
      if (table.frozen()) continue;
      for (std::size_t k = 0; k < dim; ++k) grad_[k] = w * ctx_grad_[k];
      table.apply_adagrad(Field::kAlpha, ref.id, grad_, lr_, concurrent_);
    }
  }

 private:
  ModelTables& t_;
  double lr_;
  bool concurrent_;
  std::vector<double> ctx_;
  std::vector<double> ctx_grad_;
  std::vector<double> row_;
  std::vector<double> grad_;
};

struct Samplers {
  DiscreteSampler words;
  DiscreteSampler equations;
  DiscreteSampler units;
};

Samplers make_samplers(const TrainingData& data, const ModelConfig& config) {
  return {DiscreteSampler(data.word_freq, config.negative_power),
          DiscreteSampler(data.equation_freq, config.negative_power),
          DiscreteSampler(data.unit_freq, config.negative_power)};
}

using Sequences = std::vector<std::vector<EffectiveItem>>;

Sequences effective_sequences(const TrainingData& data, bool keep_equations) {
  Sequences seqs;
  seqs.reserve(data.streams.size());
  for (const auto& s : data.streams) seqs.push_back(effective_sequence(s, keep_equations));
  return seqs;
}

// Calls fn(doc, stepper, rng) for every document, either in order on one
// thread or sharded across threads with lock-free shared updates.
template <typename Fn>
std::size_t for_each_document(std::size_t n_docs, ModelTables& tables,
                              const ModelConfig& config, Rng& rng, Fn&& fn) {
  if (!config.parallel) {
    Stepper stepper(tables, config.learning_rate, false);
    std::size_t pairs = 0;
    for (std::size_t d = 0; d < n_docs; ++d) pairs += fn(d, stepper, rng);
    return pairs;
  }
  std::size_t n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  n_threads = std::max<std::size_t>(1, std::min(n_threads, n_docs));
  const std::uint64_t base = rng.next();
  std::vector<std::size_t> pairs(n_threads, 0);
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < n_threads; ++w) {
    workers.emplace_back([&, w] {
      Rng local(derive_seed(base, w));
      Stepper stepper(tables, config.learning_rate, true);
      for (std::size_t d = w; d < n_docs; d += n_threads) pairs[w] += fn(d, stepper, local);
    });
  }
  for (auto& t : workers) t.join();
  std::size_t total = 0;
  for (std::size_t p : pairs) total += p;
  return total;
}

// Freezes a table for the lifetime of the guard.
class FreezeGuard {
 public:
  explicit FreezeGuard(EmbeddingTable& table) : table_(table), was_(table.frozen()) {
    table_.set_frozen(true);
  }
  ~FreezeGuard() { table_.set_frozen(was_); }
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  EmbeddingTable& table_;
  bool was_;
};

// Shared epoch loop with early stopping on validation predictive
// log-likelihood. `epoch` runs one sweep and returns the pair count.
template <typename EpochFn>
PassResult run_epochs(const char* pass, const TrainingData& data, const ModelConfig& config,
                      ModelTables& tables, std::vector<ObjectClass> trainable,
                      Mode scoring_mode, std::uint64_t stream, const EpochCallback& on_epoch,
                      EpochFn&& epoch) {
  Rng rng(derive_seed(config.seed, stream));
  const ScoringModel scorer{&tables, scoring_mode, config.unit_mean};
  const bool has_validation = validation_score(data.validation, scorer).has_value();
  PassResult result;
  std::vector<double> trace;
  for (std::size_t e = 1; e <= config.max_epochs; ++e) {
    std::vector<EmbeddingTable> snapshot;
    for (ObjectClass cls : trainable) snapshot.push_back(tables.table(cls));
    auto restore = [&] {
      for (std::size_t i = 0; i < trainable.size(); ++i) {
        tables.table(trainable[i]) = snapshot[i];
      }
    };

    const auto start = std::chrono::steady_clock::now();
    EpochRecord rec;
    rec.pass = pass;
    rec.epoch = e;
    rec.pairs = epoch(rng);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto score = validation_score(data.validation, scorer);
    rec.score = score.value_or(std::numeric_limits<double>::quiet_NaN());
    result.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (has_validation) {
      if (!score || !std::isfinite(*score)) {
        restore();
        result.kept_epoch = e - 1;
        throw DivergenceError(std::string("validation score is not finite in pass ") + pass +
                              " at epoch " + std::to_string(e));
      }
      trace.push_back(*score);
      const StopDecision d = early_stopping_controller(trace, config.max_epochs);
      if (d.stop) {
        if (d.best_epoch < e) restore();
        result.kept_epoch = d.best_epoch;
        return result;
      }
    }
    result.kept_epoch = e;
  }
  return result;
}

// Words within `radius` of j, plus equations within `eq_radius` when
// eq_radius is nonzero. Returns whether any equation was added.
bool gather_word_context(const std::vector<EffectiveItem>& seq, std::size_t j,
                         std::size_t radius, std::size_t eq_radius, const ModelTables& tables,
                         bool expand_units, bool unit_mean, ContextBuilder& ctx) {
  ctx.clear();
  for_each_in_window(j, radius, seq.size(), [&](std::size_t i) {
    if (seq[i].item.is_word()) ctx.add(ItemRef::word(seq[i].item.id()));
  });
  bool any_equation = false;
  if (eq_radius == 0) return false;
  for_each_in_window(j, eq_radius, seq.size(), [&](std::size_t i) {
    if (!seq[i].item.is_equation()) return;
    any_equation = true;
    const std::uint32_t eq = seq[i].item.id();
    if (expand_units) {
      ctx.add_units(tables.eq_units.at(eq), unit_mean);
    } else {
      ctx.add(ItemRef::equation(eq));
    }
  });
  return any_equation;
}

std::size_t unit_pairs(std::uint32_t eq, const ModelTables& tables, const ModelConfig& config,
                       const DiscreteSampler& sampler, Stepper& stepper, Rng& rng,
                       ContextBuilder& ctx) {
  const auto& units = tables.eq_units.at(eq);
  std::size_t pairs = 0;
  for (std::size_t p = 0; p < units.size(); ++p) {
    if (units[p] == kUnitGap) continue;
    ctx.clear();
    for (std::uint32_t u : unit_context(units, p, config.unit_window)) ctx.add(ItemRef::unit(u));
    if (ctx.empty()) continue;
    stepper.step(ItemRef::unit(units[p]), ctx, sampler, config.n_negatives, rng);
    ++pairs;
  }
  return pairs;
}

}  // namespace

ModelTables init_tables(const TrainingData& data, const ModelConfig& config) {
  config.validate();
  ModelTables t;
  t.dim = config.dim;
  t.words = EmbeddingTable(ObjectClass::kWord, data.word_freq.size(), config.dim);
  t.equations = EmbeddingTable(ObjectClass::kEquation, data.equation_freq.size(), config.dim);
  t.units = EmbeddingTable(ObjectClass::kUnit, data.unit_freq.size(), config.dim);
  t.eq_units = data.eq_units;
  t.eq_units.resize(data.equation_freq.size());
  Rng rng(derive_seed(config.seed, kInitStream));
  const double scale = config.effective_init_scale();
  t.words.initialize(rng, scale);
  t.equations.initialize(rng, scale);
  t.units.initialize(rng, scale);
  return t;
}

PassResult train_pass_words(const TrainingData& data, const ModelConfig& config,
                            ModelTables& tables, const EpochCallback& on_epoch) {
  const Sequences seqs = effective_sequences(data, /*keep_equations=*/false);
  const Samplers samplers = make_samplers(data, config);
  const std::size_t radius = config.word_window / 2;
  return run_epochs(
      "words", data, config, tables, {ObjectClass::kWord}, Mode::kBaseline, kWordStream,
      on_epoch, [&](Rng& rng) {
        return for_each_document(seqs.size(), tables, config, rng,
                                 [&](std::size_t d, Stepper& stepper, Rng& r) {
          const auto& seq = seqs[d];
          ContextBuilder ctx;
          std::size_t pairs = 0;
          for (std::size_t j = 0; j < seq.size(); ++j) {
            if (data.mask.contains(static_cast<std::uint32_t>(d), seq[j].position)) continue;
            gather_word_context(seq, j, radius, 0, tables, false, false, ctx);
            if (ctx.empty()) continue;
            if (data.on_word_target) {
              data.on_word_target(static_cast<std::uint32_t>(d), seq[j].position);
            }
            stepper.step(ItemRef::word(seq[j].item.id()), ctx, samplers.words,
                         config.n_negatives, r);
            ++pairs;
          }
          return pairs;
        });
      });
}

PassResult train_pass_equations(const TrainingData& data, const ModelConfig& config,
                                ModelTables& tables, const EpochCallback& on_epoch) {
  FreezeGuard freeze(tables.words);
  const Sequences seqs = effective_sequences(data, /*keep_equations=*/true);
  const Samplers samplers = make_samplers(data, config);
  const std::size_t radius = config.word_window / 2;
  const std::size_t eq_radius = config.eq_window / 2;
  const std::size_t eq_ctx_radius = config.eq_context_window / 2;
  return run_epochs(
      "equations", data, config, tables, {ObjectClass::kEquation}, Mode::kEqEmb,
      kEquationStream, on_epoch, [&](Rng& rng) {
        return for_each_document(seqs.size(), tables, config, rng,
                                 [&](std::size_t d, Stepper& stepper, Rng& r) {
          const auto& seq = seqs[d];
          ContextBuilder ctx;
          std::size_t pairs = 0;
          for (std::size_t j = 0; j < seq.size(); ++j) {
            const Item item = seq[j].item;
            if (item.is_equation()) {
              gather_word_context(seq, j, eq_ctx_radius, 0, tables, false, false, ctx);
              if (ctx.empty()) continue;
              stepper.step(ItemRef::equation(item.id()), ctx, samplers.equations,
                           config.n_negatives, r);
              ++pairs;
              continue;
            }
            if (data.mask.contains(static_cast<std::uint32_t>(d), seq[j].position)) continue;
            if (!gather_word_context(seq, j, radius, eq_radius, tables, false, false, ctx)) {
              continue;
            }
            if (data.on_word_target) {
              data.on_word_target(static_cast<std::uint32_t>(d), seq[j].position);
            }
            stepper.step(ItemRef::word(item.id()), ctx, samplers.words, config.n_negatives, r);
            ++pairs;
          }
          return pairs;
        });
      });
}

PassResult train_eqemb_u(const TrainingData& data, const ModelConfig& config,
                         ModelTables& tables, const EpochCallback& on_epoch) {
  const bool joint = config.unit_training == UnitTraining::kJoint;
  std::optional<FreezeGuard> freeze;
  if (!joint) freeze.emplace(tables.words);
  const Sequences seqs = effective_sequences(data, /*keep_equations=*/true);
  const Samplers samplers = make_samplers(data, config);
  const std::size_t radius = config.word_window / 2;
  const std::size_t eq_radius = config.eq_window / 2;
  std::vector<ObjectClass> trainable = {ObjectClass::kUnit};
  if (joint) trainable.insert(trainable.begin(), ObjectClass::kWord);
  PassResult result = run_epochs(
      joint ? "joint" : "units", data, config, tables, trainable, Mode::kEqEmbU,
      joint ? kJointStream : kUnitStream, on_epoch, [&](Rng& rng) {
        return for_each_document(seqs.size(), tables, config, rng,
                                 [&](std::size_t d, Stepper& stepper, Rng& r) {
          const auto& seq = seqs[d];
          ContextBuilder ctx;
          std::size_t pairs = 0;
          for (std::size_t j = 0; j < seq.size(); ++j) {
            const Item item = seq[j].item;
            if (item.is_equation()) {
              pairs += unit_pairs(item.id(), tables, config, samplers.units, stepper, r, ctx);
              continue;
            }
            if (data.mask.contains(static_cast<std::uint32_t>(d), seq[j].position)) continue;
            const bool any_eq = gather_word_context(seq, j, radius, eq_radius, tables, true,
                                                    config.unit_mean, ctx);
            if ((!joint && !any_eq) || ctx.empty()) continue;
            if (data.on_word_target) {
              data.on_word_target(static_cast<std::uint32_t>(d), seq[j].position);
            }
            stepper.step(ItemRef::word(item.id()), ctx, samplers.words, config.n_negatives, r);
            ++pairs;
          }
          return pairs;
        });
      });
  freeze.reset();
  derive_equation_vectors(tables);
  return result;
}

void derive_equation_vectors(ModelTables& tables) {
  for (std::uint32_t e = 0; e < tables.equations.rows(); ++e) {
    auto alpha = tables.equations.mutable_alpha(e);
    auto rho = tables.equations.mutable_rho(e);
    bool any = false;
    if (e < tables.eq_units.size()) {
      for (std::uint32_t u : tables.eq_units[e]) any |= u != kUnitGap;
    }
    if (!any) {
      std::fill(alpha.begin(), alpha.end(), 0.0);
      std::fill(rho.begin(), rho.end(), 0.0);
      continue;
    }
    const auto v = equation_vector_from_units(tables.eq_units[e], tables.units);
    std::copy(v.alpha.begin(), v.alpha.end(), alpha.begin());
    std::copy(v.rho.begin(), v.rho.end(), rho.begin());
  }
}

TrainedModel train_model(const TrainingData& data, const ModelConfig& config,
                         const EpochCallback& on_epoch, TrainedModel* partial) {
  TrainedModel model;
  model.config = config;
  model.tables = init_tables(data, config);
  auto record = [&](const EpochRecord& rec) {
    model.trace.push_back(rec);
    if (on_epoch) on_epoch(rec);
  };
  try {
    const bool joint_u =
        config.mode == Mode::kEqEmbU && config.unit_training == UnitTraining::kJoint;
    if (!joint_u) train_pass_words(data, config, model.tables, record);
    switch (config.mode) {
      case Mode::kBaseline:
        model.provenance = Provenance::kNone;
        break;
      case Mode::kEqEmb:
        train_pass_equations(data, config, model.tables, record);
        model.provenance = Provenance::kTrained;
        break;
      case Mode::kEqEmbU:
        train_eqemb_u(data, config, model.tables, record);
        model.provenance = Provenance::kUnitAverage;
        break;
    }
  } catch (const DivergenceError&) {
    if (partial) *partial = std::move(model);
    throw;
  }
  return model;
}

}  // namespace eqemb

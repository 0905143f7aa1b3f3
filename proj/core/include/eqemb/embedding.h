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

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "eqemb/corpus.h"
#include "eqemb/rng.h"

namespace eqemb {

enum class ObjectClass : std::uint8_t { kWord = 0, kEquation = 1, kUnit = 2 };

struct ItemRef {
  ObjectClass cls = ObjectClass::kWord;
  std::uint32_t id = 0;

  static ItemRef word(std::uint32_t id) { return {ObjectClass::kWord, id}; }
  static ItemRef equation(std::uint32_t id) { return {ObjectClass::kEquation, id}; }
  static ItemRef unit(std::uint32_t id) { return {ObjectClass::kUnit, id}; }
  static ItemRef from_item(Item item) {
    return item.is_equation() ? equation(item.id()) : word(item.id());
  }

  friend auto operator<=>(const ItemRef&, const ItemRef&) = default;
};

enum class Mode : std::uint32_t { kBaseline = 0, kEqEmb = 1, kEqEmbU = 2 };

const char* mode_name(Mode mode);
Mode parse_mode(std::string_view name);

enum class Field { kRho, kAlpha };

inline constexpr double kAdagradFloor = 1e-8;
inline constexpr double kLogEpsilon = 1e-12;

// Interaction (rho) and feature (alpha) vectors for one object class, with
// per-cell Adagrad accumulators. Row-major V x K.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(ObjectClass cls, std::size_t rows, std::size_t dim);

  // Draws rho then alpha, row-major, uniform on [-scale, scale].
  void initialize(Rng& rng, double scale);

  ObjectClass object_class() const { return cls_; }
  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<const double> rho(std::uint32_t id) const { return row(rho_, id); }
  std::span<const double> alpha(std::uint32_t id) const { return row(alpha_, id); }
  std::span<const double> vec(Field f, std::uint32_t id) const {
    return f == Field::kRho ? rho(id) : alpha(id);
  }

  // Direct writes, e.g. for test fixtures or loading. Throw when frozen.
  std::span<double> mutable_rho(std::uint32_t id);
  std::span<double> mutable_alpha(std::uint32_t id);

  // One Adagrad step on a row. Throws Error(kInvalidArgument) if frozen.
  // With `concurrent`, cells are read and written through relaxed atomics.
  void apply_adagrad(Field field, std::uint32_t id, std::span<const double> grad,
                     double learning_rate, bool concurrent = false);

  // Copies a row; `concurrent` reads through relaxed atomics.
  void load(Field field, std::uint32_t id, std::span<double> out,
            bool concurrent = false) const;

  void set_frozen(bool frozen) { frozen_ = frozen; }
  bool frozen() const { return frozen_; }

  const std::vector<double>& rho_data() const { return rho_; }
  const std::vector<double>& alpha_data() const { return alpha_; }
  std::vector<double>& rho_storage();
  std::vector<double>& alpha_storage();

  // FNV-1a over the bytes of rho then alpha.
  std::uint64_t checksum() const;

  // Copies parameters (not accumulators) from another table of equal shape.
  void assign_parameters(const EmbeddingTable& other);

 private:
  std::span<const double> row(const std::vector<double>& v, std::uint32_t id) const;
  void check_writable() const;

  ObjectClass cls_ = ObjectClass::kWord;
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> rho_;
  std::vector<double> alpha_;
  std::vector<double> rho_acc_;
  std::vector<double> alpha_acc_;
  bool frozen_ = false;
};

// Elementwise Adagrad: accumulator += g^2; cell -= lr * g / sqrt(accumulator).
void adagrad_step(std::span<double> cells, std::span<double> accumulators,
                  std::span<const double> grads, double learning_rate);

struct ModelTables {
  std::size_t dim = 0;
  EmbeddingTable words;
  EmbeddingTable equations;
  EmbeddingTable units;
  // Unit ids of each equation (EqEmb-U); kUnitGap entries are skipped.
  std::vector<std::vector<std::uint32_t>> eq_units;

  const EmbeddingTable& table(ObjectClass cls) const;
  EmbeddingTable& table(ObjectClass cls);
};

// Numerically stable logistic function.
double sigmoid(double x);

double dot(std::span<const double> a, std::span<const double> b);

// Sum of the alpha vectors of word and equation context items.
std::vector<double> word_context_sum(std::span<const Item> context,
                                     const EmbeddingTable& words,
                                     const EmbeddingTable& equations);

double bernoulli_param_word(std::uint32_t target, std::span<const Item> context,
                            const EmbeddingTable& words,
                            const EmbeddingTable& equations);

// The equation's context must hold only words.
double bernoulli_param_equation(std::uint32_t target_eq, std::span<const Item> context,
                                const EmbeddingTable& words,
                                const EmbeddingTable& equations);

// Positions j - cs_u/2 .. j + cs_u/2 of one equation's unit sequence, minus
// j itself and dropped units, truncated at the sequence ends.
std::vector<std::uint32_t> unit_context(std::span<const std::uint32_t> sequence,
                                        std::size_t position, std::size_t window);

double bernoulli_param_unit(std::uint32_t target, std::span<const std::uint32_t> context,
                            const EmbeddingTable& units);

// Word target whose context adds every unit alpha of each in-window equation.
// With unit_mean the units of each equation are averaged instead of summed.
double bernoulli_param_word_units(
    std::uint32_t target, std::span<const std::uint32_t> word_context,
    std::span<const std::vector<std::uint32_t>> equation_units,
    const EmbeddingTable& words, const EmbeddingTable& units, bool unit_mean = false);

struct TrainingPair {
  ItemRef target;
  std::vector<ItemRef> context;
  int label = 1;
};

struct WeightedRef {
  ItemRef ref;
  double weight = 1.0;
};

// Resolves a context into weighted alpha rows for the given mode: baseline
// drops equations, EqEmb-U replaces each equation with its units. Duplicate
// rows are merged by adding weights; order follows first appearance.
std::vector<WeightedRef> expand_context(std::span<const ItemRef> context, Mode mode,
                                        const ModelTables& tables, bool unit_mean = false);

struct PairGradients {
  double loss = 0.0;
  double probability = 0.0;
  std::map<ItemRef, std::vector<double>> rho;
  std::map<ItemRef, std::vector<double>> alpha;
};

// Loss -[y log b + (1-y) log(1-b)] with b clamped to [1e-12, 1-1e-12] inside
// the logs, and its gradient with respect to the target rho and every
// context alpha.
PairGradients pair_loss_and_grads(const TrainingPair& pair, Mode mode,
                                  const ModelTables& tables, bool unit_mean = false);

// Mean of the member units' alpha and rho vectors.
struct EquationVectors {
  std::vector<double> alpha;
  std::vector<double> rho;
};
EquationVectors equation_vector_from_units(std::span<const std::uint32_t> units,
                                           const EmbeddingTable& unit_table);

}  // namespace eqemb

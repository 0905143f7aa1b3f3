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

#include "eqemb/embedding.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>

#include "eqemb/context.h"
#include "eqemb/error.h"
#include "eqemb/slt.h"

namespace eqemb {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kBaseline: return "baseline";
    case Mode::kEqEmb: return "eqemb";
    case Mode::kEqEmbU: return "eqemb_u";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "baseline") return Mode::kBaseline;
  if (name == "eqemb") return Mode::kEqEmb;
  if (name == "eqemb_u" || name == "eqemb-u") return Mode::kEqEmbU;
  throw Error(ErrorKind::kInput, "unknown mode: " + std::string(name));
}

EmbeddingTable::EmbeddingTable(ObjectClass cls, std::size_t rows, std::size_t dim)
    : cls_(cls),
      rows_(rows),
      dim_(dim),
      rho_(rows * dim, 0.0),
      alpha_(rows * dim, 0.0),
      rho_acc_(rows * dim, kAdagradFloor),
      alpha_acc_(rows * dim, kAdagradFloor) {
  if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "embedding dimension must be positive");
}

void EmbeddingTable::initialize(Rng& rng, double scale) {
  check_writable();
  for (double& x : rho_) x = rng.uniform(-scale, scale);
  for (double& x : alpha_) x = rng.uniform(-scale, scale);
  std::fill(rho_acc_.begin(), rho_acc_.end(), kAdagradFloor);
  std::fill(alpha_acc_.begin(), alpha_acc_.end(), kAdagradFloor);
}

std::span<const double> EmbeddingTable::row(const std::vector<double>& v,
                                            std::uint32_t id) const {
  if (id >= rows_) {
    throw Error(ErrorKind::kInvalidArgument,
                "embedding id " + std::to_string(id) + " out of range");
  }
  return {v.data() + static_cast<std::size_t>(id) * dim_, dim_};
}

void EmbeddingTable::check_writable() const {
  if (frozen_) throw Error(ErrorKind::kInvalidArgument, "write to a frozen embedding table");
}

std::span<double> EmbeddingTable::mutable_rho(std::uint32_t id) {
  check_writable();
  auto r = row(rho_, id);
  return {const_cast<double*>(r.data()), r.size()};
}

std::span<double> EmbeddingTable::mutable_alpha(std::uint32_t id) {
  check_writable();
  auto r = row(alpha_, id);
  return {const_cast<double*>(r.data()), r.size()};
}

std::vector<double>& EmbeddingTable::rho_storage() {
  check_writable();
  return rho_;
}

std::vector<double>& EmbeddingTable::alpha_storage() {
  check_writable();
  return alpha_;
}

void EmbeddingTable::apply_adagrad(Field field, std::uint32_t id,
                                   std::span<const double> grad, double learning_rate,
                                   bool concurrent) {
  check_writable();
  if (grad.size() != dim_) throw Error(ErrorKind::kInvalidArgument, "gradient size mismatch");
  (void)row(rho_, id);
  const std::size_t off = static_cast<std::size_t>(id) * dim_;
  double* cells = (field == Field::kRho ? rho_.data() : alpha_.data()) + off;
  double* acc = (field == Field::kRho ? rho_acc_.data() : alpha_acc_.data()) + off;
  if (!concurrent) {
    adagrad_step({cells, dim_}, {acc, dim_}, grad, learning_rate);
    return;
  }
  for (std::size_t k = 0; k < dim_; ++k) {
    std::atomic_ref<double> a(acc[k]);
    std::atomic_ref<double> c(cells[k]);
    const double next_acc = a.load(std::memory_order_relaxed) + grad[k] * grad[k];
    a.store(next_acc, std::memory_order_relaxed);
    if (grad[k] != 0.0) {
      c.store(c.load(std::memory_order_relaxed) - learning_rate * grad[k] / std::sqrt(next_acc),
              std::memory_order_relaxed);
    }
  }
}

void EmbeddingTable::load(Field field, std::uint32_t id, std::span<double> out,
                          bool concurrent) const {
  auto r = vec(field, id);
  if (!concurrent) {
    std::copy(r.begin(), r.end(), out.begin());
    return;
  }
  for (std::size_t k = 0; k < dim_; ++k) {
    std::atomic_ref<double> c(const_cast<double&>(r[k]));
    out[k] = c.load(std::memory_order_relaxed);
  }
}

std::uint64_t EmbeddingTable::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::vector<double>& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(rho_);
  mix(alpha_);
  return h;
}

void EmbeddingTable::assign_parameters(const EmbeddingTable& other) {
  check_writable();
  if (other.rows_ != rows_ || other.dim_ != dim_) {
    throw Error(ErrorKind::kInvalidArgument, "table shape mismatch");
  }
  rho_ = other.rho_;
  alpha_ = other.alpha_;
}

void adagrad_step(std::span<double> cells, std::span<double> accumulators,
                  std::span<const double> grads, double learning_rate) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double g = grads[k];
    if (g == 0.0) continue;
    accumulators[k] += g * g;
    cells[k] -= learning_rate * g / std::sqrt(accumulators[k]);
  }
}

const EmbeddingTable& ModelTables::table(ObjectClass cls) const {
  switch (cls) {
    case ObjectClass::kWord: return words;
    case ObjectClass::kEquation: return equations;
    case ObjectClass::kUnit: return units;
  }
  return words;
}

EmbeddingTable& ModelTables::table(ObjectClass cls) {
  return const_cast<EmbeddingTable&>(std::as_const(*this).table(cls));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

namespace {

void add_into(std::vector<double>& acc, std::span<const double> v, double w = 1.0) {
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * v[k];
}

// Correctly rounded sum via non-overlapping partials (Shewchuk).
class ExactSum {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    std::size_t n = partials_.size() - 1;
    double hi = partials_[n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

}  // namespace

std::vector<double> word_context_sum(std::span<const Item> context,
                                     const EmbeddingTable& words,
                                     const EmbeddingTable& equations) {
  std::vector<double> sum(words.dim(), 0.0);
  for (Item item : context) {
    if (item.is_gap()) throw Error(ErrorKind::kInvalidArgument, "gap in a context");
    add_into(sum, item.is_equation() ? equations.alpha(item.id()) : words.alpha(item.id()));
  }
  return sum;
}

double bernoulli_param_word(std::uint32_t target, std::span<const Item> context,
                            const EmbeddingTable& words, const EmbeddingTable& equations) {
  return sigmoid(dot(words.rho(target), word_context_sum(context, words, equations)));
}

double bernoulli_param_equation(std::uint32_t target_eq, std::span<const Item> context,
                                const EmbeddingTable& words,
                                const EmbeddingTable& equations) {
  for (Item item : context) {
    if (!item.is_word()) {
      throw Error(ErrorKind::kInvalidArgument, "equation contexts hold words only");
    }
  }
  return sigmoid(dot(equations.rho(target_eq), word_context_sum(context, words, equations)));
}

std::vector<std::uint32_t> unit_context(std::span<const std::uint32_t> sequence,
                                        std::size_t position, std::size_t window) {
  std::vector<std::uint32_t> ctx;
  for_each_in_window(position, window / 2, sequence.size(), [&](std::size_t j) {
    if (sequence[j] != kUnitGap) ctx.push_back(sequence[j]);
  });
  return ctx;
}

double bernoulli_param_unit(std::uint32_t target, std::span<const std::uint32_t> context,
                            const EmbeddingTable& units) {
  std::vector<double> sum(units.dim(), 0.0);
  for (std::uint32_t u : context) add_into(sum, units.alpha(u));
  return sigmoid(dot(units.rho(target), sum));
}

double bernoulli_param_word_units(std::uint32_t target,
                                  std::span<const std::uint32_t> word_context,
                                  std::span<const std::vector<std::uint32_t>> equation_units,
                                  const EmbeddingTable& words, const EmbeddingTable& units,
                                  bool unit_mean) {
  std::vector<double> sum(words.dim(), 0.0);
  for (std::uint32_t w : word_context) add_into(sum, words.alpha(w));
  for (const auto& eq : equation_units) {
    std::size_t n = 0;
    for (std::uint32_t u : eq) n += u != kUnitGap;
    for (std::uint32_t u : eq) {
      if (u != kUnitGap) add_into(sum, units.alpha(u), unit_mean ? 1.0 / n : 1.0);
    }
  }
  return sigmoid(dot(words.rho(target), sum));
}

std::vector<WeightedRef> expand_context(std::span<const ItemRef> context, Mode mode,
                                        const ModelTables& tables, bool unit_mean) {
  std::vector<WeightedRef> out;
  std::map<ItemRef, std::size_t> slot;
  auto add = [&](ItemRef ref, double w) {
    auto [it, inserted] = slot.emplace(ref, out.size());
    if (inserted) {
      out.push_back({ref, w});
    } else {
      out[it->second].weight += w;
    }
  };
  for (const ItemRef& ref : context) {
    if (ref.cls != ObjectClass::kEquation) {
      add(ref, 1.0);
      continue;
    }
    if (mode == Mode::kBaseline) continue;
    if (mode == Mode::kEqEmb) {
      add(ref, 1.0);
      continue;
    }
    if (ref.id >= tables.eq_units.size()) {
      throw Error(ErrorKind::kInvalidArgument, "equation without a unit list");
    }
    const auto& list = tables.eq_units[ref.id];
    std::size_t n = 0;
    for (std::uint32_t u : list) n += u != kUnitGap;
    for (std::uint32_t u : list) {
      if (u != kUnitGap) add(ItemRef::unit(u), unit_mean ? 1.0 / n : 1.0);
    }
  }
  return out;
}

PairGradients pair_loss_and_grads(const TrainingPair& pair, Mode mode,
                                  const ModelTables& tables, bool unit_mean) {
  if (pair.label != 0 && pair.label != 1) {
    throw Error(ErrorKind::kInvalidArgument, "label must be 0 or 1");
  }
  const std::size_t dim = tables.dim;
  const auto ctx = expand_context(pair.context, mode, tables, unit_mean);
  std::vector<double> sum(dim, 0.0);
  for (const auto& [ref, w] : ctx) add_into(sum, tables.table(ref.cls).alpha(ref.id), w);
  const auto rho = tables.table(pair.target.cls).rho(pair.target.id);

  PairGradients out;
  const double b = sigmoid(dot(rho, sum));
  out.probability = b;
  out.loss = pair.label == 1 ? -std::log(std::max(b, kLogEpsilon))
                             : -std::log(std::max(1.0 - b, kLogEpsilon));
  const double g = b - pair.label;

  std::vector<double> grad_rho(dim);
  for (std::size_t k = 0; k < dim; ++k) grad_rho[k] = g * sum[k];
  out.rho.emplace(pair.target, std::move(grad_rho));
  for (const auto& [ref, w] : ctx) {
    std::vector<double> ga(dim);
    for (std::size_t k = 0; k < dim; ++k) ga[k] = g * w * rho[k];
    out.alpha.emplace(ref, std::move(ga));
  }
  return out;
}

EquationVectors equation_vector_from_units(std::span<const std::uint32_t> units,
                                           const EmbeddingTable& unit_table) {
  std::size_t n = 0;
  for (std::uint32_t u : units) n += u != kUnitGap;
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "untokenizable equation");
  const std::size_t dim = unit_table.dim();
  std::vector<ExactSum> alpha(dim);
  std::vector<ExactSum> rho(dim);
  for (std::uint32_t u : units) {
    if (u == kUnitGap) continue;
    const auto a = unit_table.alpha(u);
    const auto r = unit_table.rho(u);
    for (std::size_t k = 0; k < dim; ++k) {
      alpha[k].add(a[k]);
      rho[k].add(r[k]);
    }
  }
  EquationVectors v{std::vector<double>(dim), std::vector<double>(dim)};
  for (std::size_t k = 0; k < dim; ++k) {
    v.alpha[k] = alpha[k].value() / static_cast<double>(n);
    v.rho[k] = rho[k].value() / static_cast<double>(n);
  }
  return v;
}

}  // namespace eqemb

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

#include "eqemb/retrieval.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eqemb/error.h"

namespace eqemb {

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0.0 || bb == 0.0) return -std::numeric_limits<double>::infinity();
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

std::vector<Hit> rank_rows(std::span<const double> query, std::span<const double> rows,
                           std::size_t dim, Metric metric, std::size_t k,
                           std::uint32_t exclude) {
  const std::size_t n = dim ? rows.size() / dim : 0;
  std::vector<Hit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == exclude) continue;
    const auto row = rows.subspan(i * dim, dim);
    const double s = metric == Metric::kCosine ? cosine(query, row)
                                               : squared_distance(query, row);
    hits.push_back({static_cast<std::uint32_t>(i), s});
  }
  auto better = [metric](const Hit& a, const Hit& b) {
    if (a.score != b.score) {
      return metric == Metric::kCosine ? a.score > b.score : a.score < b.score;
    }
    return a.id < b.id;
  };
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    better);
  hits.resize(keep);
  if (metric == Metric::kEuclidean) {
    for (auto& h : hits) h.score = std::sqrt(h.score);
  }
  return hits;
}

namespace {

void check_equation(const ModelTables& t, std::uint32_t eq_id) {
  if (eq_id >= t.equations.rows()) {
    throw Error(ErrorKind::kInput, "unknown equation id " + std::to_string(eq_id));
  }
}

}  // namespace

Ranking nearest_equations(const ModelTables& tables, std::uint32_t eq_id, std::size_t k,
                          Metric metric) {
  check_equation(tables, eq_id);
  Ranking r{"eq2eq:" + std::to_string(eq_id), metric, {}};
  r.hits = rank_rows(tables.equations.alpha(eq_id), tables.equations.alpha_data(), tables.dim,
                     metric, k, eq_id);
  return r;
}

Ranking nearest_words(const ModelTables& tables, std::uint32_t eq_id, std::size_t k,
                      Metric metric) {
  check_equation(tables, eq_id);
  Ranking r{"eq2word:" + std::to_string(eq_id), metric, {}};
  r.hits = rank_rows(tables.equations.rho(eq_id), tables.words.alpha_data(), tables.dim, metric,
                     k);
  return r;
}

Ranking equations_for_words(const ModelTables& tables, std::span<const std::uint32_t> words,
                            std::size_t k, Field equation_field, Metric metric) {
  if (words.empty()) throw Error(ErrorKind::kInput, "empty word query");
  std::vector<double> query(tables.dim, 0.0);
  std::string desc = "word2eq:";
  for (std::uint32_t w : words) {
    if (w >= tables.words.rows()) {
      throw Error(ErrorKind::kInput, "unknown word id " + std::to_string(w));
    }
    const auto rho = tables.words.rho(w);
    for (std::size_t i = 0; i < tables.dim; ++i) query[i] += rho[i];
    desc += std::to_string(w) + (&w == &words.back() ? "" : ",");
  }
  for (double& x : query) x /= static_cast<double>(words.size());
  Ranking r{desc, metric, {}};
  const auto& rows = equation_field == Field::kRho ? tables.equations.rho_data()
                                                   : tables.equations.alpha_data();
  r.hits = rank_rows(query, rows, tables.dim, metric, k);
  return r;
}

const char* metric_name(Metric metric) {
  return metric == Metric::kCosine ? "cosine" : "euclidean";
}

Metric parse_metric(std::string_view name) {
  if (name == "cosine") return Metric::kCosine;
  if (name == "euclidean") return Metric::kEuclidean;
  throw Error(ErrorKind::kInput, "unknown metric: " + std::string(name));
}

}  // namespace eqemb

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
#include <span>
#include <string>
#include <vector>

#include "eqemb/embedding.h"

namespace eqemb {

enum class Metric { kCosine, kEuclidean };

struct Hit {
  std::uint32_t id = 0;
  double score = 0.0;  // cosine similarity, or Euclidean distance

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct Ranking {
  std::string query;
  Metric metric = Metric::kCosine;
  std::vector<Hit> hits;
};

// Cosine similarity; a zero-norm operand gives -infinity.
double cosine(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Scores every row of `rows` (row-major, dim columns) against `query` and
// keeps the best k. Cosine ranks descending, Euclidean ascending; ties go to
// the smaller id. `exclude` (if in range) never appears.
std::vector<Hit> rank_rows(std::span<const double> query, std::span<const double> rows,
                           std::size_t dim, Metric metric, std::size_t k,
                           std::uint32_t exclude = UINT32_MAX);

// Nearest equations to an equation over equation alpha vectors.
Ranking nearest_equations(const ModelTables& tables, std::uint32_t eq_id, std::size_t k,
                          Metric metric = Metric::kEuclidean);

// Nearest words to an equation: equation rho against word alpha vectors.
Ranking nearest_words(const ModelTables& tables, std::uint32_t eq_id, std::size_t k,
                      Metric metric = Metric::kCosine);

// Mean of the word rho vectors against equation rho (or alpha) vectors.
// Throws Error(kInput) on an empty query.
Ranking equations_for_words(const ModelTables& tables, std::span<const std::uint32_t> words,
                            std::size_t k, Field equation_field = Field::kRho,
                            Metric metric = Metric::kCosine);

const char* metric_name(Metric metric);
Metric parse_metric(std::string_view name);

}  // namespace eqemb

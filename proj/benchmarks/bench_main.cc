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

#include <benchmark/benchmark.h>

#include "eqemb/bundle.h"
#include "eqemb/retrieval.h"
#include "eqemb/slt.h"
#include "eqemb/synthetic.h"
#include "eqemb/trainer.h"

namespace eqemb {
namespace {

void BM_TokenizeEquation(benchmark::State& state) {
  const std::string latex =
      "\\sum_{i=1}^{n} \\frac{x_i^{2}}{\\sqrt{y_i + \\lambda}} = \\int_0^1 f(t) dt";
  for (auto _ : state) {
    benchmark::DoNotOptimize(tokenize_equation(0, latex));
  }
}
BENCHMARK(BM_TokenizeEquation);

const CorpusBundle& bench_bundle() {
  static const CorpusBundle b = [] {
    SyntheticParams p;
    p.documents = 100;
    return ingest_documents(generate_synthetic_corpus(p).documents, IngestConfig{});
  }();
  return b;
}

void BM_TrainEpoch(benchmark::State& state) {
  const TrainingData d = training_data(bench_bundle());
  ModelConfig c;
  c.mode = static_cast<Mode>(state.range(0));
  c.max_epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_model(d, c));
  }
  state.SetLabel(mode_name(c.mode));
}
BENCHMARK(BM_TrainEpoch)
    ->Arg(static_cast<int>(Mode::kBaseline))
    ->Arg(static_cast<int>(Mode::kEqEmb))
    ->Arg(static_cast<int>(Mode::kEqEmbU))
    ->Unit(benchmark::kMillisecond);

void BM_NearestEquations(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 25;
  Rng rng(1);
  ModelTables t;
  t.dim = dim;
  t.words = EmbeddingTable(ObjectClass::kWord, 1, dim);
  t.equations = EmbeddingTable(ObjectClass::kEquation, n, dim);
  t.equations.initialize(rng, 1.0);
  std::uint32_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nearest_equations(t, q, 5));
    q = (q + 1) % static_cast<std::uint32_t>(n);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NearestEquations)->Arg(1000)->Arg(100000);

}  // namespace
}  // namespace eqemb

BENCHMARK_MAIN();

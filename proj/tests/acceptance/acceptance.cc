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

// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eqemb/bundle.h"
#include "eqemb/evaluation.h"
#include "eqemb/model_io.h"
#include "eqemb/retrieval.h"
#include "eqemb/slt.h"
#include "eqemb/synthetic.h"
#include "eqemb/trainer.h"
#include "oracles.h"
#include "support.h"

namespace eqemb {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome gradients() {
  const auto t0 = Clock::now();
  Rng rng(20240101);
  const oracle::Shape shapes[] = {oracle::Shape::kWordTarget, oracle::Shape::kEquationTarget,
                                  oracle::Shape::kUnitTarget, oracle::Shape::kWordUnitContext,
                                  oracle::Shape::kBaselineWord};
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto shape : shapes) {
    for (int i = 0; i < 200; ++i) {
      oracle::Instance in = oracle::random_instance(shape, rng);
      worst = std::max(worst, oracle::gradient_relative_error(in));
      ++n;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-5 && secs < 10.0,
          std::to_string(n) + " instances, worst relative error " + fmt("%.2e", worst) + ", " +
              fmt("%.2f", secs) + " s"};
}

Outcome frozen_words() {
  const CorpusBundle b = testing::small_bundle(60);
  const TrainingData d = training_data(b);
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    ModelConfig c;
    c.mode = Mode::kEqEmb;
    c.max_epochs = 3;
    c.seed = seed;
    ModelTables t = init_tables(d, c);
    train_pass_words(d, c, t);
    const std::uint64_t before = t.words.checksum();
    const std::uint64_t eq_before = t.equations.checksum();
    train_pass_equations(d, c, t);
    ok &= t.words.checksum() == before && t.equations.checksum() != eq_before;
  }
  detail = "word checksum unchanged across the equation pass for 3 seeds";
  return {ok, detail};
}

Outcome unit_means() {
  Rng rng(12);
  std::size_t exact = 0, checked = 0;
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + rng.below(8);
    const std::size_t n_units = 1 + rng.below(40);
    EmbeddingTable units(ObjectClass::kUnit, n_units, dim);
    // Wide dynamic range so naive summation would lose bits.
    for (double* data : {units.rho_storage().data(), units.alpha_storage().data()}) {
      for (std::size_t i = 0; i < n_units * dim; ++i) {
        data[i] = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.below(60)) - 30);
      }
    }
    std::vector<std::uint32_t> set(1 + rng.below(60));
    for (auto& u : set) u = static_cast<std::uint32_t>(rng.below(n_units));
    const EquationVectors v = equation_vector_from_units(set, units);
    for (std::size_t k = 0; k < dim; ++k) {
      std::vector<double> a, r;
      for (auto u : set) {
        a.push_back(units.alpha(u)[k]);
        r.push_back(units.rho(u)[k]);
      }
      const double ea = oracle::wide_mean(a), er = oracle::wide_mean(r);
      if (!oracle::within_one_ulp(v.alpha[k], ea) || !oracle::within_one_ulp(v.rho[k], er)) {
        ok = false;
      }
      exact += (v.alpha[k] == ea) + (v.rho[k] == er);
      checked += 2;
    }
  }
  return {ok, "1000 unit sets, " + std::to_string(checked) + " components within 1 ulp, " +
                  std::to_string(exact) + " exact"};
}

// ---------------------------------------------------------------------------
// Planted corpus shared by criteria 4, 5 and 10.

struct Planted {
  SyntheticCorpus corpus;
  CorpusBundle bundle;
  std::vector<std::size_t> eq_class;              // per eq_id
  std::map<std::uint32_t, std::size_t> word_class;  // topic words in the vocabulary
};

const Planted& planted() {
  static const Planted p = [] {
    Planted p;
    p.corpus = generate_synthetic_corpus(SyntheticParams{});
    p.bundle = ingest_documents(p.corpus.documents, IngestConfig{});
    for (const auto& r : p.bundle.equations.records()) {
      p.eq_class.push_back(p.corpus.equation_class.at(r.latex));
    }
    for (std::size_t c = 0; c < p.corpus.topic_words.size(); ++c) {
      for (const auto& w : p.corpus.topic_words[c]) {
        if (const auto id = p.bundle.words.find(w)) p.word_class[*id] = c;
      }
    }
    return p;
  }();
  return p;
}

ModelConfig planted_config(Mode mode, std::uint64_t seed) {
  ModelConfig c;
  c.mode = mode;
  c.dim = 25;
  c.word_window = 4;
  c.eq_window = 16;
  c.learning_rate = 0.01;
  c.seed = seed;
  return c;
}

const TrainedModel& planted_eqemb() {
  static const TrainedModel m =
      train_model(training_data(planted().bundle), planted_config(Mode::kEqEmb, 1));
  return m;
}

Outcome planted_retrieval() {
  const auto t0 = Clock::now();
  const Planted& p = planted();
  const TrainedModel& m = planted_eqemb();
  double same = 0, topical = 0, slots = 0;
  for (std::uint32_t e = 0; e < p.bundle.equations.size(); ++e) {
    for (const Hit& h : nearest_equations(m.tables, e, 5).hits) same += p.eq_class[h.id] == p.eq_class[e];
    for (const Hit& h : nearest_words(m.tables, e, 5).hits) {
      const auto it = p.word_class.find(h.id);
      topical += it != p.word_class.end() && it->second == p.eq_class[e];
    }
    slots += 5;
  }
  const double purity = same / slots, precision = topical / slots;
  const double secs = seconds_since(t0);
  return {purity >= 0.9 && precision >= 0.8 && secs < 300.0,
          std::to_string(p.bundle.equations.size()) + " equations, eq2eq purity " +
              fmt("%.3f", purity) + ", eq2word precision " + fmt("%.3f", precision) + ", " +
              fmt("%.1f", secs) + " s"};
}

struct SeedStats {
  double mean = 0, sd = 0;
  double softmax_mean = 0;
};

SeedStats test_pseudo_over_seeds(Mode mode) {
  const Planted& p = planted();
  const TrainingData d = training_data(p.bundle);
  std::vector<double> bern, soft;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TrainedModel m = train_model(d, planted_config(mode, seed));
    const ScoringModel s{&m.tables, mode, m.config.unit_mean};
    bern.push_back(evaluate("test", p.bundle.heldout.test, s).mean_pseudo);
    soft.push_back(evaluate("test", p.bundle.heldout.test, s, PseudoReading::kSoftmax).mean_pseudo);
  }
  SeedStats st;
  st.mean = std::accumulate(bern.begin(), bern.end(), 0.0) / 5.0;
  double ss = 0;
  for (double x : bern) ss += (x - st.mean) * (x - st.mean);
  st.sd = std::sqrt(ss / 4.0);
  st.softmax_mean = std::accumulate(soft.begin(), soft.end(), 0.0) / 5.0;
  return st;
}

Outcome ordering() {
  const SeedStats base = test_pseudo_over_seeds(Mode::kBaseline);
  const SeedStats eq = test_pseudo_over_seeds(Mode::kEqEmb);
  const SeedStats u = test_pseudo_over_seeds(Mode::kEqEmbU);
  const double m1 = eq.mean - base.mean, m2 = u.mean - eq.mean;
  const bool ok = m1 > std::max(eq.sd, base.sd) && m2 > std::max(u.sd, eq.sd);
  std::string d = "test pseudo-LL baseline " + fmt("%.4f", base.mean) + "+-" + fmt("%.4f", base.sd) +
                  ", eqemb " + fmt("%.4f", eq.mean) + "+-" + fmt("%.4f", eq.sd) + ", eqemb_u " +
                  fmt("%.4f", u.mean) + "+-" + fmt("%.4f", u.sd) + "; softmax reading " +
                  fmt("%.4f", base.softmax_mean) + " / " + fmt("%.4f", eq.softmax_mean) + " / " +
                  fmt("%.4f", u.softmax_mean);
  return {ok, d};
}

Outcome early_stopping() {
  struct Case {
    std::vector<double> trace;
    bool stop;
    std::size_t keep;
  };
  std::vector<double> improving20, improving25;
  for (int i = 0; i < 25; ++i) {
    if (i < 20) improving20.push_back(-3.0 + 0.1 * i);
    improving25.push_back(-3.0 + 0.1 * i);
  }
  const std::vector<Case> cases = {
      {{-3, -2, -2.5}, true, 2},
      {improving20, true, 20},
      {{-3, -3}, true, 1},
      {{-3, -2}, false, 2},
      {improving25, true, 20},
      {{-1, -2, -0.5}, true, 1},
  };
  std::size_t ok = 0;
  for (const auto& c : cases) {
    const StopDecision d = early_stopping_controller(c.trace, 20);
    ok += d.stop == c.stop && d.best_epoch == c.keep;
  }
  return {ok == cases.size(), std::to_string(ok) + "/" + std::to_string(cases.size()) +
                                  " trace fixtures reproduced"};
}

Outcome score_oracles() {
  ModelTables t;
  t.dim = 2;
  t.words = EmbeddingTable(ObjectClass::kWord, 4, 2);
  t.equations = EmbeddingTable(ObjectClass::kEquation, 1, 2);
  t.units = EmbeddingTable(ObjectClass::kUnit, 2, 2);
  testing::set_row(t.words.mutable_rho(0), {0.5, -1.0});
  testing::set_row(t.words.mutable_rho(1), {1.5, 0.25});
  testing::set_row(t.words.mutable_rho(2), {-0.75, 2.0});
  testing::set_row(t.words.mutable_alpha(3), {0.3, 0.2});
  testing::set_row(t.equations.mutable_alpha(0), {-0.1, -0.6});
  testing::set_row(t.units.mutable_alpha(0), {0.4, 0.0});
  testing::set_row(t.units.mutable_alpha(1), {0.0, -0.9});
  t.eq_units = {{0, 1, 1}};
  HeldOutItem item;
  item.target = 0;
  item.context = {Item::word(3), Item::equation(0)};
  item.negatives = {1, 2};

  double worst = 0;
  for (Mode mode : {Mode::kBaseline, Mode::kEqEmb, Mode::kEqEmbU}) {
    // Context sums by hand.
    const double cx = mode == Mode::kBaseline ? 0.3 : mode == Mode::kEqEmb ? 0.2 : 0.7;
    const double cy = mode == Mode::kBaseline ? 0.2 : mode == Mode::kEqEmb ? -0.4 : -1.6;
    const double st = 0.5 * cx - 1.0 * cy, s1 = 1.5 * cx + 0.25 * cy, s2 = -0.75 * cx + 2.0 * cy;
    const ScoringModel m{&t, mode};
    worst = std::max(worst, std::abs(*predictive_log_likelihood(item, m) -
                                     oracle::softmax_ll(st, {s1, s2})));
    worst = std::max(worst, std::abs(*pseudo_log_likelihood(item, m) -
                                     oracle::bernoulli_pseudo_ll(st, {s1, s2})));
  }
  bool exact = true;
  for (std::size_t n : {1, 2, 5, 10, 20, 50}) {
    const std::vector<double> negs(n, -0.8);
    exact &= softmax_log_likelihood(-0.8, negs) == std::log(1.0 / static_cast<double>(n + 1));
  }
  // Same through the model: identical target and negative rows.
  ModelTables u = t;
  for (std::uint32_t w = 0; w < 3; ++w) testing::set_row(u.words.mutable_rho(w), {0.2, 0.1});
  HeldOutItem ui = item;
  ui.negatives.assign(10, 1);
  exact &= *predictive_log_likelihood(ui, {&u, Mode::kEqEmb}) == std::log(1.0 / 11.0);
  return {worst <= 1e-12 && exact, "max oracle deviation " + fmt("%.1e", worst) +
                                       ", uniform case exact: " + (exact ? "yes" : "no")};
}

Outcome slt_golden() {
  std::ifstream in(std::string(EQEMB_TEST_DATA_DIR) + "/slt_golden.tsv");
  std::size_t rows = 0, matched = 0;
  std::set<char> relations;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    ++rows;
    const auto tab = line.find('\t');
    std::vector<std::string> expected;
    std::istringstream ss(line.substr(tab + 1));
    for (std::string u; ss >> u;) {
      expected.push_back(u);
      relations.insert(static_cast<char>(parse_unit_string(u).relation));
    }
    matched += tokenize_equation(0, line.substr(0, tab)).units == expected;
  }
  const std::set<char> allowed = {'n', 'a', 'u', 'o', 'w'};
  const bool rel_ok = std::includes(allowed.begin(), allowed.end(), relations.begin(), relations.end());
  return {rows == 30 && matched == rows && rel_ok,
          std::to_string(matched) + "/" + std::to_string(rows) + " equations bit-exact"};
}

std::string full_run(const std::string& root) {
  SyntheticParams sp;
  sp.documents = 80;
  write_corpus_dir(generate_synthetic_corpus(sp), root + "/corpus");
  const CorpusBundle b = ingest_documents(read_corpus_dir(root + "/corpus"), IngestConfig{});
  write_bundle(b, root + "/bundle");
  const CorpusBundle r = read_bundle(root + "/bundle");
  ModelConfig c = planted_config(Mode::kEqEmbU, 7);
  c.max_epochs = 4;
  save_model(train_model(training_data(r), c), root + "/model.bin");
  return read_file(root + "/model.bin");
}

Outcome determinism() {
  testing::TempDir a, b;
  const std::string x = full_run(a.str()), y = full_run(b.str());
  return {!x.empty() && x == y, "two ingest->train runs, " + std::to_string(x.size()) +
                                    " byte model files " + (x == y ? "identical" : "differ")};
}

Outcome retrieval_exactness() {
  std::size_t checks = 0, equal = 0;
  auto check = [&](const std::vector<Hit>& got, const std::vector<Hit>& want) {
    ++checks;
    equal += got == want;
  };
  // Tie-heavy random fixtures.
  Rng rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 1 + rng.below(5), n = 1 + rng.below(30);
    std::vector<double> rows(n * dim), q(dim);
    for (double& x : rows) x = static_cast<double>(static_cast<int>(rng.below(3)) - 1);
    for (double& x : q) x = static_cast<double>(static_cast<int>(rng.below(3)) - 1);
    const std::size_t k = 1 + rng.below(n + 2);
    for (Metric m : {Metric::kEuclidean, Metric::kCosine}) {
      check(rank_rows(q, rows, dim, m, k), oracle::brute_force_rank(q, rows, dim, m, k));
    }
  }
  // Every query type over the trained planted model.
  const TrainedModel& model = planted_eqemb();
  const ModelTables& t = model.tables;
  for (std::uint32_t e = 0; e < t.equations.rows(); ++e) {
    check(nearest_equations(t, e, 5).hits,
          oracle::brute_force_rank(t.equations.alpha(e), t.equations.alpha_data(), t.dim,
                                   Metric::kEuclidean, 5, e));
    check(nearest_words(t, e, 5).hits,
          oracle::brute_force_rank(t.equations.rho(e), t.words.alpha_data(), t.dim,
                                   Metric::kCosine, 5));
  }
  for (std::uint32_t w = 0; w < t.words.rows(); ++w) {
    const std::vector<std::uint32_t> q = {w};
    check(equations_for_words(t, q, 5).hits,
          oracle::brute_force_rank(t.words.rho(w), t.equations.rho_data(), t.dim,
                                   Metric::kCosine, 5));
  }
  return {checks == equal,
          std::to_string(equal) + "/" + std::to_string(checks) + " rankings equal brute force"};
}

}  // namespace
}  // namespace eqemb

int main() {
  using namespace eqemb;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient suite", gradients},
      {"frozen word table", frozen_words},
      {"unit-mean exactness", unit_means},
      {"planted-signal retrieval", planted_retrieval},
      {"relative ordering", ordering},
      {"early stopping", early_stopping},
      {"held-out score oracles", score_oracles},
      {"SLT golden", slt_golden},
      {"determinism", determinism},
      {"retrieval exactness", retrieval_exactness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

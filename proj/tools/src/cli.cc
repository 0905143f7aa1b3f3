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

#include "eqemb_cli/cli.h"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eqemb/bundle.h"
#include "eqemb/config.h"
#include "eqemb/error.h"
#include "eqemb/evaluation.h"
#include "eqemb/grid.h"
#include "eqemb/model_io.h"
#include "eqemb/retrieval.h"
#include "eqemb/synthetic.h"
#include "eqemb/trainer.h"

namespace eqemb::cli {
namespace {

constexpr int kReportFormatVersion = 1;

struct Settings {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string corpus;
  std::string bundle;
  std::string model;
  std::string report;
  std::string mode;
  std::optional<std::uint64_t> seed;
  bool parallel = false;
};

void add_settings(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config_file, "key=value config file");
  cmd->add_option("--set", s.overrides, "override one setting (key=value); repeatable");
  cmd->add_option("--corpus", s.corpus, "directory of .tex files");
  cmd->add_option("--bundle", s.bundle, "corpus bundle directory");
  cmd->add_option("--model", s.model, "model file");
  cmd->add_option("--report", s.report, "write the report here instead of stdout");
  cmd->add_option("--mode", s.mode, "baseline | eqemb | eqemb_u");
  cmd->add_option("--seed", s.seed, "seed for ingest and training");
  cmd->add_flag("--parallel", s.parallel, "use worker threads");
}

// File first, then the dedicated flags, then --set, so later wins.
RunConfig resolve(const Settings& s) {
  ConfigValues values;
  if (!s.config_file.empty()) values.load_file(s.config_file);
  if (!s.corpus.empty()) values.set("corpus_dir", s.corpus);
  if (!s.bundle.empty()) values.set("bundle_dir", s.bundle);
  if (!s.model.empty()) values.set("model_path", s.model);
  if (!s.report.empty()) values.set("report_path", s.report);
  if (!s.mode.empty()) values.set("mode", s.mode);
  if (s.seed) values.set("seed", std::to_string(*s.seed));
  if (s.parallel) values.set("parallel", "true");
  for (const auto& o : s.overrides) values.set(o);
  return resolve_config(values);
}

std::string one_line(std::string echo) {
  while (!echo.empty() && echo.back() == '\n') echo.pop_back();
  for (char& c : echo) {
    if (c == '\n') c = ' ';
  }
  return echo;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.corpus_dir.empty()) throw Error(ErrorKind::kInput, "no corpus directory given");
  std::vector<std::string> warnings;
  auto docs = read_corpus_dir(config.corpus_dir, &warnings);
  IngestStats stats;
  const CorpusBundle bundle = ingest_documents(std::move(docs), config.ingest, &stats);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  for (const auto& w : stats.warnings) err << "warning: " << w << "\n";
  write_bundle(bundle, config.bundle_dir);
  out << bundle_summary(bundle);
  return kExitOk;
}

nlohmann::json epoch_json(const EpochRecord& r) {
  nlohmann::json j = {{"pass", r.pass}, {"epoch", r.epoch}, {"seconds", r.seconds},
                      {"pairs", r.pairs}};
  j["validation_score"] = std::isfinite(r.score) ? nlohmann::json(r.score) : nlohmann::json();
  return j;
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const CorpusBundle bundle = read_bundle(config.bundle_dir);
  const TrainingData data = training_data(bundle);

  std::string trace;
  trace += nlohmann::json{{"format", kModelFormatVersion},
                          {"config", one_line(model_config_echo(config.model))}}
               .dump() +
           "\n";
  auto on_epoch = [&](const EpochRecord& r) {
    trace += epoch_json(r).dump() + "\n";
    out << r.pass << " epoch " << r.epoch << " score " << r.score << "\n";
  };
  const std::string sidecar = config.model_path + ".trace.jsonl";

  TrainedModel partial;
  try {
    const TrainedModel model = train_model(data, config.model, on_epoch, &partial);
    save_model(model, config.model_path);
    write_file_atomic(sidecar, trace);
  } catch (const DivergenceError& e) {
    save_model(partial, config.model_path);
    trace += nlohmann::json{{"diverged", e.what()}}.dump() + "\n";
    write_file_atomic(sidecar, trace);
    err << "error: " << e.what() << "; kept the last good snapshot in " << config.model_path
        << "\n";
    return kExitRuntime;
  }
  out << "wrote " << config.model_path << "\n";
  return kExitOk;
}

void check_matches(const ModelHeader& h, const CorpusBundle& b) {
  if (h.n_words != b.words.size() || h.n_equations != b.equations.size()) {
    throw Error(ErrorKind::kInput, "model does not match the bundle's vocabularies");
  }
}

int cmd_eval(const RunConfig& config, bool use_model, std::ostream& out) {
  const CorpusBundle bundle = read_bundle(config.bundle_dir);
  const TrainingData data = training_data(bundle);
  std::string report;

  if (!use_model) {
    const auto configs = enumerate_grid(config.grid, config.model);
    const auto runs = grid_select(configs, data, bundle.heldout.test, config.pseudo_reading);
    report = "# eqemb-report format=" + std::to_string(kReportFormatVersion) + " " +
             one_line(model_config_echo(config.model)) + "\n" + grid_report_tsv(runs);
  } else {
    const ModelFile file = load_model(config.model_path);
    check_matches(file.header, bundle);
    const RunConfig trained = resolve_config(parse_echo(file.header.config_echo));
    const ScoringModel scorer{&file.tables, file.header.mode, trained.model.unit_mean};
    const EvalReport valid =
        evaluate("validation", bundle.heldout.validation, scorer, config.pseudo_reading);
    const EvalReport test = evaluate("test", bundle.heldout.test, scorer, config.pseudo_reading);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\t%.6f", valid.mean_pseudo,
                  test.mean_pseudo, valid.mean_predictive, test.mean_predictive);
    const ModelConfig& m = trained.model;
    report = "# eqemb-report format=" + std::to_string(kReportFormatVersion) + " " +
             one_line(file.header.config_echo) + "\n" +
             "mode\tK\tW\tE\tvalid_pseudo_ll\ttest_pseudo_ll\tvalid_predictive_ll\t"
             "test_predictive_ll\tscored\n" +
             mode_name(m.mode) + "\t" + std::to_string(m.dim) + "\t" +
             std::to_string(m.word_window) + "\t" +
             (m.mode == Mode::kBaseline ? std::string("-") : std::to_string(m.eq_window)) +
             "\t" + buf + "\t" + std::to_string(valid.count + test.count) + "\n";
  }
  emit(report, config.report_path, out);
  return kExitOk;
}

struct QueryArgs {
  std::string kind;
  std::optional<std::uint32_t> id;
  std::string words;
  std::size_t k = 5;
  std::string metric;
};

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      const auto b = cur.find_first_not_of(" \t");
      if (b != std::string::npos) words.push_back(cur.substr(b, cur.find_last_not_of(" \t") - b + 1));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return words;
}

int cmd_query(const RunConfig& config, const QueryArgs& q, std::ostream& out,
              std::ostream& err) {
  const CorpusBundle bundle = read_bundle(config.bundle_dir);
  const ModelFile file = load_model(config.model_path);
  check_matches(file.header, bundle);

  auto need_id = [&]() {
    if (!q.id) throw Error(ErrorKind::kInput, "query " + q.kind + " needs --id");
    if (*q.id >= bundle.equations.size()) {
      throw Error(ErrorKind::kInput, "equation id " + std::to_string(*q.id) + " out of range");
    }
    return *q.id;
  };

  Ranking ranking;
  bool words_out = false;
  if (q.kind == "eq2eq") {
    const Metric m = q.metric.empty() ? Metric::kEuclidean : parse_metric(q.metric);
    ranking = nearest_equations(file.tables, need_id(), q.k, m);
  } else if (q.kind == "eq2word") {
    const Metric m = q.metric.empty() ? Metric::kCosine : parse_metric(q.metric);
    ranking = nearest_words(file.tables, need_id(), q.k, m);
    words_out = true;
  } else {
    std::vector<std::uint32_t> ids;
    for (const auto& w : split_words(q.words)) {
      if (const auto id = bundle.words.find(w)) {
        ids.push_back(*id);
      } else {
        err << "warning: dropping unknown word '" << w << "'\n";
      }
    }
    const Metric m = q.metric.empty() ? Metric::kCosine : parse_metric(q.metric);
    const Field f =
        config.word2eq_vector == EquationVectorKind::kAlpha ? Field::kAlpha : Field::kRho;
    ranking = equations_for_words(file.tables, ids, q.k, f, m);
  }

  out << "rank\tid\t" << metric_name(ranking.metric) << "\t" << (words_out ? "word" : "latex")
      << "\n";
  char buf[32];
  for (std::size_t i = 0; i < ranking.hits.size(); ++i) {
    const Hit& h = ranking.hits[i];
    std::snprintf(buf, sizeof buf, "%.6f", h.score);
    out << (i + 1) << "\t" << h.id << "\t" << buf << "\t"
        << (words_out ? bundle.words.form(h.id) : bundle.equations.at(h.id).latex) << "\n";
  }
  return kExitOk;
}

int cmd_inspect(const std::string& path, std::ostream& out) {
  out << describe_header(load_model(path).header);
  return kExitOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kInput: return kExitUsage;
    case ErrorKind::kCorrupt: return kExitCorrupt;
    case ErrorKind::kRuntime: return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equation and word embeddings for LaTeX corpora", "eqemb"};
  app.require_subcommand(1);

  Settings ingest_s, train_s, eval_s, query_s;
  auto* ingest = app.add_subcommand("ingest", "extract, tokenize and write a corpus bundle");
  add_settings(ingest, ingest_s);
  auto* train = app.add_subcommand("train", "train a model from a bundle");
  add_settings(train, train_s);
  auto* eval = app.add_subcommand("eval", "grid search report, or score one --model");
  add_settings(eval, eval_s);

  auto* query = app.add_subcommand("query", "nearest neighbours");
  add_settings(query, query_s);
  QueryArgs q;
  query->add_option("kind", q.kind, "eq2eq | eq2word | word2eq")
      ->required()
      ->check(CLI::IsMember({"eq2eq", "eq2word", "word2eq"}));
  query->add_option("--id", q.id, "equation id");
  query->add_option("--words", q.words, "comma-separated query words");
  query->add_option("-k", q.k, "number of results")->check(CLI::PositiveNumber);
  query->add_option("--metric", q.metric, "cosine | euclidean");

  auto* inspect = app.add_subcommand("inspect", "print a model file's header");
  std::string inspect_path;
  inspect->add_option("model", inspect_path, "model file")->required();

  auto* synth = app.add_subcommand("synth", "write a synthetic corpus with planted classes");
  SyntheticParams sp;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--documents", sp.documents);
  synth->add_option("--classes", sp.classes);
  synth->add_option("--topic-words", sp.topic_words);
  synth->add_option("--equations", sp.equations_per_document);
  synth->add_option("--seed", sp.seed);

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest) return cmd_ingest(resolve(ingest_s), out, err);
    if (*train) return cmd_train(resolve(train_s), out, err);
    if (*eval) return cmd_eval(resolve(eval_s), !eval_s.model.empty(), out);
    if (*query) return cmd_query(resolve(query_s), q, out, err);
    if (*inspect) return cmd_inspect(inspect_path, out);
    if (*synth) {
      write_corpus_dir(generate_synthetic_corpus(sp), synth_out);
      out << "wrote " << sp.documents << " documents to " << synth_out << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace eqemb::cli

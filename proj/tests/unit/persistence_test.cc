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

#include <filesystem>

#include <gtest/gtest.h>

#include "eqemb/bundle.h"
#include "eqemb/config.h"
#include "eqemb/error.h"
#include "eqemb/model_io.h"
#include "support.h"

namespace eqemb {
namespace {

using testing::TempDir;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorKind::kRuntime;
}

class ModelFileTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    bundle_ = new CorpusBundle(testing::small_bundle(30));
    model_ = new TrainedModel(
        train_model(training_data(*bundle_), testing::quick_config(Mode::kEqEmbU, 1)));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete bundle_;
  }
  static CorpusBundle* bundle_;
  static TrainedModel* model_;
};

CorpusBundle* ModelFileTest::bundle_ = nullptr;
TrainedModel* ModelFileTest::model_ = nullptr;

void expect_rounded_equal(std::span<const double> stored, std::span<const double> original) {
  ASSERT_EQ(stored.size(), original.size());
  for (std::size_t i = 0; i < stored.size(); ++i) {
    ASSERT_EQ(stored[i], static_cast<double>(static_cast<float>(original[i]))) << i;
  }
}

TEST_F(ModelFileTest, RoundTripKeepsHeaderAndFloatRoundedTables) {
  TempDir dir;
  const std::string path = dir.file("model.bin");
  save_model(*model_, path);
  const ModelFile f = load_model(path);
  EXPECT_EQ(f.header.mode, Mode::kEqEmbU);
  EXPECT_EQ(f.header.dim, 8u);
  EXPECT_EQ(f.header.n_words, model_->tables.words.rows());
  EXPECT_EQ(f.header.n_equations, model_->tables.equations.rows());
  EXPECT_EQ(f.header.n_units, model_->tables.units.rows());
  EXPECT_EQ(f.header.provenance, Provenance::kUnitAverage);
  EXPECT_EQ(f.header.config_echo, model_config_echo(model_->config));
  expect_rounded_equal(f.tables.words.rho_data(), model_->tables.words.rho_data());
  expect_rounded_equal(f.tables.equations.alpha_data(), model_->tables.equations.alpha_data());
  expect_rounded_equal(f.tables.units.alpha_data(), model_->tables.units.alpha_data());
  EXPECT_EQ(f.tables.eq_units, model_->tables.eq_units);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_F(ModelFileTest, EveryTruncationIsCorrupt) {
  const std::string bytes = serialize_model(*model_);
  for (std::size_t n : {std::size_t{0}, std::size_t{4}, std::size_t{20}, bytes.size() / 2,
                        bytes.size() - 1}) {
    EXPECT_EQ(kind_of([&] { deserialize_model(bytes.substr(0, n)); }), ErrorKind::kCorrupt) << n;
  }
}

TEST_F(ModelFileTest, FlippedByteIsCorrupt) {
  std::string bytes = serialize_model(*model_);
  for (std::size_t pos : {std::size_t{3}, std::size_t{12}, bytes.size() / 2, bytes.size() - 2}) {
    std::string bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x10);
    EXPECT_EQ(kind_of([&] { deserialize_model(bad); }), ErrorKind::kCorrupt) << pos;
  }
}

TEST_F(ModelFileTest, MissingFileIsInputError) {
  EXPECT_EQ(kind_of([] { load_model("/nonexistent/model.bin"); }), ErrorKind::kInput);
}

TEST_F(ModelFileTest, HeaderDescriptionListsTheEssentials) {
  const ModelFile f = deserialize_model(serialize_model(*model_));
  const std::string d = describe_header(f.header);
  EXPECT_NE(d.find("format_version\t1\n"), std::string::npos);
  EXPECT_NE(d.find("mode\teqemb_u\n"), std::string::npos);
  EXPECT_NE(d.find("K\t8\n"), std::string::npos);
  EXPECT_NE(d.find("config\tlr="), std::string::npos);
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a("", 0), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a", 1), 0xaf63dc4c8601ec8cULL);
}

// ---------------------------------------------------------------------------
// Bundles

TEST(BundleFile, RoundTripPreservesEveryPart) {
  const CorpusBundle b = testing::small_bundle(30);
  TempDir dir;
  const std::string path = dir.file("bundle");
  write_bundle(b, path);
  const CorpusBundle r = read_bundle(path);
  EXPECT_EQ(bundle_summary(r), bundle_summary(b));
  ASSERT_EQ(r.words.size(), b.words.size());
  for (std::uint32_t i = 0; i < b.words.size(); ++i) EXPECT_EQ(r.words.form(i), b.words.form(i));
  ASSERT_EQ(r.equations.size(), b.equations.size());
  for (std::size_t i = 0; i < b.equations.size(); ++i) {
    EXPECT_EQ(r.equations.records()[i].latex, b.equations.records()[i].latex);
    EXPECT_EQ(r.equations.records()[i].occurrence_count,
              b.equations.records()[i].occurrence_count);
  }
  EXPECT_EQ(r.eq_units, b.eq_units);
  EXPECT_EQ(r.streams, b.streams);
  EXPECT_EQ(r.heldout.validation, b.heldout.validation);
  EXPECT_EQ(r.heldout.test, b.heldout.test);
}

TEST(BundleFile, RewriteIsByteIdentical) {
  const CorpusBundle b = testing::small_bundle(30);
  TempDir dir;
  write_bundle(b, dir.file("a"));
  write_bundle(read_bundle(dir.file("a")), dir.file("b"));
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir.file("a"))) {
    ++files;
    const auto name = entry.path().filename().string();
    EXPECT_EQ(testing::read_text(entry.path().string()),
              testing::read_text(dir.file("b") + "/" + name))
        << name;
  }
  EXPECT_GT(files, 0u);
}

TEST(BundleFile, MissingIsInputAndGarbageIsCorrupt) {
  TempDir dir;
  EXPECT_EQ(kind_of([&] { read_bundle(dir.file("nope")); }), ErrorKind::kInput);
  const CorpusBundle b = testing::small_bundle(30);
  write_bundle(b, dir.file("bundle"));
  for (const auto& entry : std::filesystem::directory_iterator(dir.file("bundle"))) {
    testing::write_text(entry.path().string(), "garbage\x01\x02");
  }
  EXPECT_EQ(kind_of([&] { read_bundle(dir.file("bundle")); }), ErrorKind::kCorrupt);
}

TEST(BundleFile, RefusesToReplaceAForeignDirectory) {
  TempDir dir;
  std::filesystem::create_directories(dir.file("mine"));
  testing::write_text(dir.file("mine") + "/notes.txt", "keep me");
  EXPECT_THROW(write_bundle(testing::small_bundle(30), dir.file("mine")), Error);
  EXPECT_EQ(testing::read_text(dir.file("mine") + "/notes.txt"), "keep me");
}

// ---------------------------------------------------------------------------
// Configuration

TEST(Config, LaterAssignmentsWin) {
  TempDir dir;
  testing::write_text(dir.file("run.cfg"),
                      "# comment\n\nK = 10\nlr=0.2\nmode=baseline\n");
  ConfigValues v;
  v.load_file(dir.file("run.cfg"));
  v.set("K=12");
  const RunConfig c = resolve_config(v);
  EXPECT_EQ(c.model.dim, 12u);
  EXPECT_EQ(c.model.learning_rate, 0.2);
  EXPECT_EQ(c.model.mode, Mode::kBaseline);
  EXPECT_EQ(c.model.word_window, ModelConfig{}.word_window);
}

TEST(Config, UnknownKeyAndBadValueAreInputErrors) {
  EXPECT_EQ(kind_of([] {
              ConfigValues unknown;
              unknown.set("no_such_key=1");
              resolve_config(unknown);
            }),
            ErrorKind::kInput);
  ConfigValues bad;
  bad.set("K=ten");
  EXPECT_EQ(kind_of([&] { resolve_config(bad); }), ErrorKind::kInput);
  ConfigValues missing;
  EXPECT_EQ(kind_of([&] { missing.load_file("/nonexistent.cfg"); }), ErrorKind::kInput);
}

TEST(Config, EchoParsesBackToTheSameSettings) {
  ModelConfig m;
  m.mode = Mode::kEqEmbU;
  m.dim = 17;
  m.learning_rate = 0.0123456789;
  m.seed = 99;
  m.unit_training = UnitTraining::kJoint;
  const std::string echo = model_config_echo(m);
  const RunConfig r = resolve_config(parse_echo(echo));
  EXPECT_EQ(model_config_echo(r.model), echo);
  EXPECT_EQ(r.model.learning_rate, m.learning_rate);

  IngestConfig i;
  i.min_tf = 3;
  i.symbol_window = 2;
  EXPECT_EQ(ingest_config_echo(resolve_config(parse_echo(ingest_config_echo(i))).ingest),
            ingest_config_echo(i));
}

TEST(Config, EveryKeyIsAccepted) {
  const RunConfig defaults = resolve_config(ConfigValues{});
  const std::string echo = model_config_echo(defaults.model) + ingest_config_echo(defaults.ingest);
  EXPECT_EQ(echo.find("corpus_dir"), std::string::npos);
  EXPECT_FALSE(config_keys().empty());
}

}  // namespace
}  // namespace eqemb

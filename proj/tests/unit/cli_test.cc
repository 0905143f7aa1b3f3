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

#include <sstream>

#include <gtest/gtest.h>

#include "eqemb_cli/cli.h"
#include "support.h"

namespace eqemb {
namespace {

using testing::TempDir;

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "eqemb");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// One synthetic corpus, ingested and trained once for the whole suite.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    ASSERT_EQ(run({"synth", "--out", corpus(), "--documents", "40"}).code, 0);
    const Result ing = run({"ingest", "--corpus", corpus(), "--bundle", bundle()});
    ASSERT_EQ(ing.code, 0) << ing.err;
    ingest_out_ = new std::string(ing.out);
    const Result tr = run({"train", "--bundle", bundle(), "--model", model(), "--set", "K=8",
                           "--set", "max_epochs=2"});
    ASSERT_EQ(tr.code, 0) << tr.err;
    word_ = new std::string(read_bundle(bundle()).words.form(0));
  }
  static void TearDownTestSuite() {
    delete word_;
    delete ingest_out_;
    delete dir_;
  }
  static std::string corpus() { return dir_->file("corpus"); }
  static std::string bundle() { return dir_->file("bundle"); }
  static std::string model() { return dir_->file("model.bin"); }

  static TempDir* dir_;
  static std::string* ingest_out_;
  static std::string* word_;  // some in-vocabulary word
};

TempDir* CliTest::dir_ = nullptr;
std::string* CliTest::ingest_out_ = nullptr;
std::string* CliTest::word_ = nullptr;

TEST_F(CliTest, IngestPrintsFourCounts) {
  std::istringstream in(*ingest_out_);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "documents\twords\tequations\tunits");
  EXPECT_EQ(std::count(row.begin(), row.end(), '\t'), 3);
  EXPECT_EQ(row.substr(0, 3), "40\t");
}

TEST_F(CliTest, MissingCorpusDirectoryIsUsageError) {
  TempDir d;
  const Result r = run({"ingest", "--corpus", d.file("absent"), "--bundle", d.file("b")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, UnknownSubcommandAndBadOptionAreUsageErrors) {
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"query", "eq2eq", "-k", "0", "--bundle", bundle(), "--model", model()}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"train", "--bundle", bundle(), "--set", "nonsense=1"}).code, cli::kExitUsage);
}

TEST_F(CliTest, InspectPrintsHeaderAndRejectsTruncation) {
  const Result ok = run({"inspect", model()});
  ASSERT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("mode\teqemb\n"), std::string::npos);
  EXPECT_NE(ok.out.find("K\t8\n"), std::string::npos);

  TempDir d;
  const std::string bytes = testing::read_text(model());
  testing::write_text(d.file("cut.bin"), bytes.substr(0, bytes.size() / 3));
  const Result bad = run({"inspect", d.file("cut.bin")});
  EXPECT_EQ(bad.code, cli::kExitCorrupt);
}

TEST_F(CliTest, WordQueryGivesHeaderAndFiveRows) {
  const Result r = run({"query", "word2eq", "--words", *word_, "--bundle", bundle(), "--model",
                        model()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 6u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "rank\tid\tcosine\tlatex");
}

TEST_F(CliTest, UnknownQueryWordIsDroppedWithAWarning) {
  const Result r = run({"query", "word2eq", "--words", *word_ + ", qqqunknown", "--bundle", bundle(),
                        "--model", model()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning: dropping unknown word 'qqqunknown'"), std::string::npos);
  const Result only = run({"query", "word2eq", "--words", *word_, "--bundle", bundle(),
                           "--model", model()});
  EXPECT_EQ(r.out, only.out);

  const Result none = run({"query", "word2eq", "--words", "qqqunknown", "--bundle", bundle(),
                           "--model", model()});
  EXPECT_EQ(none.code, cli::kExitUsage);
}

TEST_F(CliTest, EquationQueriesHonourKAndRange) {
  const Result r = run({"query", "eq2eq", "--id", "0", "-k", "3", "--bundle", bundle(),
                        "--model", model()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 4u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "rank\tid\teuclidean\tlatex");
  const Result w = run({"query", "eq2word", "--id", "0", "--bundle", bundle(), "--model",
                        model()});
  ASSERT_EQ(w.code, 0);
  EXPECT_EQ(w.out.substr(0, w.out.find('\n')), "rank\tid\tcosine\tword");
  EXPECT_EQ(run({"query", "eq2eq", "--id", "999999", "--bundle", bundle(), "--model", model()})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(run({"query", "eq2eq", "--bundle", bundle(), "--model", model()}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, GridReportHasOneRowPerRun) {
  TempDir d;
  const Result r = run({"eval", "--bundle", bundle(), "--report", d.file("grid.tsv"), "--set",
                        "K=8", "--set", "max_epochs=1", "--set", "grid_K=8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string report = testing::read_text(d.file("grid.tsv"));
  // Format line, column header, then 3 baseline runs and 5 each for the others.
  EXPECT_EQ(lines(report), 2u + 3u + 5u + 5u);
  EXPECT_EQ(report.rfind("# eqemb-report format=", 0), 0u);
}

TEST_F(CliTest, ModelEvalReportsOneRow) {
  const Result r = run({"eval", "--bundle", bundle(), "--model", model()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out), 3u);
  EXPECT_NE(r.out.find("\neqemb\t8\t"), std::string::npos);
}

TEST_F(CliTest, RerunGivesByteIdenticalModelAndReport) {
  TempDir d;
  for (const char* name : {"a", "b"}) {
    const std::string m = d.file(std::string(name) + ".bin");
    ASSERT_EQ(run({"train", "--bundle", bundle(), "--model", m, "--set", "K=8", "--set",
                   "max_epochs=2"})
                  .code,
              0);
    ASSERT_EQ(run({"eval", "--bundle", bundle(), "--model", m, "--report",
                   d.file(std::string(name) + ".tsv")})
                  .code,
              0);
  }
  EXPECT_EQ(testing::read_text(d.file("a.bin")), testing::read_text(d.file("b.bin")));
  EXPECT_EQ(testing::read_text(d.file("a.tsv")), testing::read_text(d.file("b.tsv")));
  EXPECT_EQ(testing::read_text(d.file("a.bin")), testing::read_text(model()));
}

TEST_F(CliTest, TrainingTraceSidecarIsWritten) {
  const std::string trace = testing::read_text(model() + ".trace.jsonl");
  EXPECT_EQ(trace.rfind("{\"config\":", 0), 0u);
  EXPECT_NE(trace.find("\"pass\":\"words\""), std::string::npos);
}

TEST_F(CliTest, ConfigFileIsOverriddenByFlags) {
  TempDir d;
  testing::write_text(d.file("run.cfg"), "K=6\nmax_epochs=1\nmode=baseline\n");
  const Result r = run({"train", "--config", d.file("run.cfg"), "--bundle", bundle(), "--model",
                        d.file("m.bin"), "--mode", "eqemb", "--set", "K=5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Result i = run({"inspect", d.file("m.bin")});
  EXPECT_NE(i.out.find("mode\teqemb\n"), std::string::npos);
  EXPECT_NE(i.out.find("K\t5\n"), std::string::npos);
  EXPECT_NE(i.out.find("config\tmax_epochs=1\n"), std::string::npos);
}

}  // namespace
}  // namespace eqemb

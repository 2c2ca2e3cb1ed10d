/*
 * Copyright 2026 The fgml Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fgml/cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fgml/common.h"
#include "fgml/workloadgen.h"

namespace fgml {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fgml");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fgml_cli_test_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, SelectKeepsTopK) {
  WriteFile(Path("m.csv"),
            "count_a,count_b,count_c,label,task\n"
            "1,1,1,1,x\n"
            "1,1,0,1,x\n"
            "0,1,0,0,y\n"
            "0,1,0,0,y\n");
  CliRun r = Cli({"select", "--matrix", Path("m.csv"), "--k", "2", "--out",
               Path("s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = ReadFile(Path("s.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "name,score,p_value");
  EXPECT_NE(csv.find("\ncount_a,2,"), std::string::npos);
  EXPECT_NE(csv.find("\ncount_c,1,"), std::string::npos);
  EXPECT_EQ(csv.find("count_b"), std::string::npos);
  EXPECT_EQ(r.out, "select: kept 2 of 3 columns by chi2\n");
}

TEST_F(CliTest, PipelineEndToEnd) {
  std::string corpus = Path("corpus");
  CliRun gen = Cli({"gen", "--profiles", "default2", "--count", "20", "--seed", "3",
                 "--out", corpus});
  ASSERT_EQ(gen.code, 0) << gen.err;
  EXPECT_TRUE(fs::exists(fs::path(corpus) / "manifest.json"));

  CliRun feat = Cli({"--strict", "features", "--corpus", corpus, "--out",
                  Path("f.csv"), "--vocab-out", Path("v.json"), "--scale",
                  "minmax"});
  ASSERT_EQ(feat.code, 0) << feat.err;
  CliRun sel = Cli({"select", "--matrix", Path("f.csv"), "--vocab", Path("v.json"),
                 "--k", "10", "--out", Path("s.csv")});
  ASSERT_EQ(sel.code, 0) << sel.err;
  CliRun train = Cli({"train", "--matrix", Path("f.csv"), "--vocab", Path("v.json"),
                   "--columns", Path("s.csv"), "--seed", "1", "--out",
                   Path("model.json"), "--learner", "tree"});
  ASSERT_EQ(train.code, 0) << train.err;
  CliRun eval = Cli({"eval", "--model", Path("model.json"), "--matrix", Path("f.csv"),
                  "--vocab", Path("v.json"), "--out", Path("metrics.json")});
  ASSERT_EQ(eval.code, 0) << eval.err;
  EXPECT_EQ(eval.out.rfind("eval: accuracy ", 0), 0u);

  CliRun ovr = Cli({"train", "--matrix", Path("f.csv"), "--target", "task", "--seed",
                 "1", "--out", Path("ovr.json"), "--learner", "tree"});
  ASSERT_EQ(ovr.code, 0) << ovr.err;
  CliRun eval2 = Cli({"eval", "--model", Path("ovr.json"), "--matrix", Path("f.csv"),
                   "--out", Path("m2.json")});
  ASSERT_EQ(eval2.code, 0) << eval2.err;
  EXPECT_EQ(eval2.out.rfind("eval: F1-micro ", 0), 0u);

  CorpusManifest manifest =
      ParseManifestJson(ReadFile((fs::path(corpus) / "manifest.json").string()));
  fs::path trace = fs::path(corpus) / manifest.entries[0].trace;
  CliRun parse = Cli({"parse", "--trace", trace.string(), "--out",
                   Path("records.json"), "--edges", Path("edges.txt")});
  EXPECT_EQ(parse.code, 0) << parse.err;
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli({"gen", "--bogus-flag"}).code, kExitValidation);
  EXPECT_EQ(Cli({"exp1", "--corpus", dir_.string(), "--out", Path("o")}).code,
            kExitValidation);  // --seed missing
  EXPECT_EQ(Cli({}).code, kExitValidation);
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  // An empty directory has no manifest: runtime (I/O) failure.
  CliRun r = Cli({"features", "--corpus", dir_.string(), "--out", Path("f.csv")});
  EXPECT_EQ(r.code, kExitRuntime) << r.err;
  WriteFile(Path("neg.csv"), "count_a,label,task\n-1,1,x\n2,0,y\n");
  EXPECT_EQ(Cli({"select", "--matrix", Path("neg.csv"), "--k", "1", "--out",
                 Path("s.csv")})
                .code,
            kExitValidation);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kIoError), kExitRuntime);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kMalformedLine), kExitValidation);
}

}  // namespace
}  // namespace fgml

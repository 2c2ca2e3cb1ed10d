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

#include "fgml/workloadgen.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>

namespace fgml {
namespace {

namespace fs = std::filesystem;

ParserOptions Strict() {
  ParserOptions o;
  o.strict = true;
  return o;
}

std::map<std::string, int64_t> CountCalls(const TraceSample& s) {
  std::map<std::string, int64_t> counts;
  s.ForEachRecord([&](const CallRecord& r) { ++counts[r.name]; });
  return counts;
}

TEST(GenerateTrace, ZeroRootCallsHasNoRecords) {
  GeneratedTrace g = GenerateTrace(ProfileSet("default2")[1], 1, 0);
  TraceSample s = ParseTraceText(g.text, Strict());
  EXPECT_EQ(s.record_count(), 0u);
  EXPECT_EQ(g.bookkeeping.total_calls, 0);
}

TEST(GenerateTrace, Deterministic) {
  WorkloadProfile p = ProfileSet("default2")[0];
  EXPECT_EQ(GenerateTrace(p, 5).text, GenerateTrace(p, 5).text);
  EXPECT_NE(GenerateTrace(p, 5).text, GenerateTrace(p, 6).text);
}

TEST(GenerateTrace, BookkeepingMatchesParse) {
  for (const std::string& set : ProfileSetNames()) {
    for (const auto& p : ProfileSet(set)) {
      for (int cpus : {1, 4}) {
        GeneratorOptions o;
        o.n_cpus = cpus;
        o.comm_pid = cpus > 1;
        GeneratedTrace g = GenerateTrace(p, 17, o);
        TraceSample s = ParseTraceText(g.text, Strict());
        EXPECT_TRUE(s.warnings.empty()) << p.name;
        EXPECT_EQ(static_cast<int64_t>(s.record_count()), g.bookkeeping.total_calls);
        EXPECT_EQ(CountCalls(s), g.bookkeeping.calls) << p.name;
      }
    }
  }
}

TEST(GenerateTrace, NoAbstime) {
  GeneratorOptions o;
  o.abstime = false;
  GeneratedTrace g = GenerateTrace(ProfileSet("default2")[0], 3, 5, o);
  TraceSample s = ParseTraceText(g.text, Strict());
  s.ForEachRecord([](const CallRecord& r) { EXPECT_FALSE(r.start_time.has_value()); });
}

TEST(ProfileSet, Names) {
  EXPECT_EQ(ProfileSet("tasks6").size(), 6u);
  auto d = ProfileSet("default2");
  EXPECT_EQ(d[0].label() + d[1].label(), 1);
  EXPECT_THROW(ProfileSet("nope"), Error);
}

TEST(GenerateCorpus, FilesManifestAndLabels) {
  fs::path dir = fs::temp_directory_path() / "fgml_workloadgen_test";
  fs::remove_all(dir);
  CorpusManifest m =
      GenerateCorpus(ProfileSet("default2"), 50, 7, dir.string(), {}, "default2");
  ASSERT_EQ(m.entries.size(), 100u);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  int positives = 0;
  for (const auto& e : m.entries) {
    EXPECT_TRUE(fs::exists(dir / e.trace));
    EXPECT_TRUE(fs::exists(dir / e.sidecar));
    positives += e.label;
  }
  EXPECT_EQ(positives, 50);
  EXPECT_EQ(ManifestJson(ParseManifestJson(ReadFile((dir / "manifest.json").string()))),
            ManifestJson(m));
  std::vector<TraceSample> corpus = LoadCorpus(dir.string(), Strict());
  ASSERT_EQ(corpus.size(), 100u);
  for (size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(*corpus[i].label, m.entries[i].label);
    EXPECT_EQ(*corpus[i].task, m.entries[i].task);
    EXPECT_TRUE(corpus[i].io.has_value());
    EXPECT_EQ(static_cast<int64_t>(corpus[i].record_count()),
              m.entries[i].total_calls);
  }
  auto mem = GenerateCorpusInMemory(ProfileSet("default2"), 50, 7);
  ASSERT_EQ(mem.size(), 100u);
  EXPECT_EQ(mem[3].entry.digest, m.entries[3].digest);
  fs::remove_all(dir);
}

TEST(LoadCorpus, MissingManifestIsIoError) {
  try {
    LoadCorpus("/nonexistent/corpus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

}  // namespace
}  // namespace fgml

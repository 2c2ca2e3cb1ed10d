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

// Deterministic synthetic function_graph traces for encryption-like and
// plain I/O workloads.
//
// Call trees are drawn from a fixed kernel-flavoured call table. A profile
// picks root functions, re-weights callees, and sets tree shape, duration and
// I/O models. Encryption profiles route part of their root calls through the
// crypto sub-table, whose functions call each other densely (triangles in the
// undirected call graph) and run longer.

#ifndef FGML_WORKLOADGEN_H_
#define FGML_WORKLOADGEN_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fgml/trace_parser.h"

namespace fgml {

using WeightedNames = std::vector<std::pair<std::string, double>>;

struct IoModel {
  double read_ops_median = 100.0;
  double write_ops_median = 100.0;
  double bytes_per_op = 4096.0;
  double sigma = 0.3;
};

enum class TraceStructure {
  kCallTable,
  // Graph-signal-only pair: a pool of functions is shuffled per trace into
  // disjoint cycles; each root call is `a() { b(); }` for a cycle edge a->b.
  // Every function is called equally often in both variants, so only the call
  // graph shape differs.
  kTriangles,
  kHexagons,
};

struct WorkloadProfile {
  std::string name;
  WeightedNames roots;
  WeightedNames crypto_roots;
  // Share of root calls drawn from crypto_roots; > 0 marks the profile as an
  // encryption workload (label 1).
  double crypto_intensity = 0.0;
  // Multipliers on call-table edge weights by callee name (0 disables).
  std::map<std::string, double> callee_weights;
  int max_depth = 5;
  int min_children = 1;
  int max_children = 3;
  double duration_scale = 1.0;
  double duration_sigma = 0.5;
  double gap_median_us = 2.0;
  int min_root_calls = 40;
  int max_root_calls = 60;
  IoModel io;
  TraceStructure structure = TraceStructure::kCallTable;
  std::vector<std::string> cycle_pool;

  int label() const { return crypto_intensity > 0.0 ? 1 : 0; }
};

struct GeneratorOptions {
  bool abstime = true;
  bool comm_pid = false;
  // 1 = single-CPU emission; > 1 spreads root calls over CPUs and interleaves
  // their lines by timestamp.
  int n_cpus = 1;
};

struct GeneratorBookkeeping {
  std::map<std::string, int64_t> calls;
  int64_t total_calls = 0;
  IoMeta io;
};

struct GeneratedTrace {
  std::string text;
  std::string sidecar_json;
  IoMeta io;
  GeneratorBookkeeping bookkeeping;
};

GeneratedTrace GenerateTrace(const WorkloadProfile& profile, uint64_t seed,
                             int n_root_calls,
                             const GeneratorOptions& options = {});

// Draws n_root_calls from the profile's [min_root_calls, max_root_calls].
GeneratedTrace GenerateTrace(const WorkloadProfile& profile, uint64_t seed,
                             const GeneratorOptions& options = {});

// Named profile sets:
//   default2     crypto, plain
//   graphsignal2 triangles (label 1), hexagons (label 0)
//   tasks6       aes_encrypt, chacha_encrypt, sha_hash, file_copy, file_read,
//                mmap_churn
std::vector<WorkloadProfile> ProfileSet(const std::string& name);
std::vector<std::string> ProfileSetNames();

// Every function name the call table can emit.
std::vector<std::string> CallTableFunctions();

struct ManifestEntry {
  std::string trace;    // relative to the corpus root
  std::string sidecar;  // relative to the corpus root
  std::string task;
  int label = 0;
  uint64_t seed = 0;
  std::string digest;
  int64_t total_calls = 0;
};

struct CorpusManifest {
  uint64_t seed = 0;
  std::string profile_set;
  std::vector<ManifestEntry> entries;
};

// Writes `<dir>/<task>/<seed>.trace`, `<seed>.io.json` and
// `<dir>/manifest.json`. `per_profile_count` traces per profile, seeds derived
// from `seed`, profile name and index.
CorpusManifest GenerateCorpus(const std::vector<WorkloadProfile>& profiles,
                              int per_profile_count, uint64_t seed,
                              const std::string& dir,
                              const GeneratorOptions& options = {},
                              const std::string& profile_set = "custom");

// In-memory variant of GenerateCorpus that skips the filesystem.
struct GeneratedSample {
  ManifestEntry entry;
  GeneratedTrace trace;
};
std::vector<GeneratedSample> GenerateCorpusInMemory(
    const std::vector<WorkloadProfile>& profiles, int per_profile_count,
    uint64_t seed, const GeneratorOptions& options = {});

std::string ManifestJson(const CorpusManifest& manifest);
CorpusManifest ParseManifestJson(std::string_view text);

// Loads and parses every manifest entry (trace + sidecar), in manifest order.
std::vector<TraceSample> LoadCorpus(const std::string& dir,
                                    const ParserOptions& options = {});

}  // namespace fgml

#endif  // FGML_WORKLOADGEN_H_

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

// Parser for the text output of the ftrace `function_graph` tracer.
//
// A data line has the shape
//
//   [ABSTIME |] CPU) [COMM-PID |] [MARK] [DURATION us] |  BODY
//
// where BODY is indented by two spaces per call depth and is one of
//
//   name();              leaf call (entry and return in one line)
//   name() {             entry of a call with children
//   } [/* name */]       return of the innermost open call
//
// Lines starting with '#' are header comments. Context-switch arrows,
// separator rules and interrupt markers are boundaries and carry no call data.

#ifndef FGML_TRACE_PARSER_H_
#define FGML_TRACE_PARSER_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgml/common.h"

namespace fgml {

enum class BodyKind { kLeaf, kEntry, kExit, kComment, kBoundary };

std::string_view BodyKindName(BodyKind kind);

struct RawLine {
  BodyKind kind = BodyKind::kComment;
  std::optional<double> abstime;  // seconds
  std::optional<std::string> comm_pid;
  int cpu = 0;
  std::optional<char> overhead_marker;
  std::optional<double> duration_us;
  // Function name for leaf and entry lines; the `/* name */` tail for exits
  // (empty when the tail is absent).
  std::string name;
  int depth = 0;
  // Set in tolerant mode when a malformed line was downgraded to a comment.
  std::optional<std::string> warning;
};

struct ParserOptions {
  bool strict = false;
  int indent_width = 2;
  // Spaces between the '|' column separator and a depth-0 body.
  int body_margin = 2;
  // nullopt means auto-detect from the first data line.
  std::optional<bool> expect_abstime;
  std::optional<bool> expect_comm_pid;
};

struct CallRecord {
  std::string name;
  int cpu = 0;
  int depth = 0;
  std::optional<double> duration_us;  // nullopt: unknown (truncated trace)
  std::optional<double> start_time;
  std::optional<double> end_time;
  std::vector<CallRecord> children;
  std::optional<std::string> parent_name;

  bool operator==(const CallRecord&) const = default;
};

struct IoMeta {
  int64_t read_count = 0;
  int64_t write_count = 0;
  int64_t read_bytes = 0;
  int64_t write_bytes = 0;

  bool operator==(const IoMeta&) const = default;
};

struct TraceSample {
  // Per-CPU forests of root calls, in stream order.
  std::map<int, std::vector<CallRecord>> cpus;
  std::optional<IoMeta> io;
  std::optional<int> label;
  std::optional<std::string> task;
  std::vector<std::string> warnings;
  bool has_abstime = false;
  bool has_comm_pid = false;

  size_t record_count() const;
  // Visits every record depth-first, parents before children.
  void ForEachRecord(const std::function<void(const CallRecord&)>& fn) const;
};

// Classifies one physical line. Throws Error(kMalformedLine) in strict mode;
// in tolerant mode a malformed line comes back as a kComment with `warning`
// set. `line_no` is only used in messages.
RawLine ParseLine(std::string_view line, const ParserOptions& options,
                  size_t line_no = 0);

TraceSample ParseTrace(std::istream& input, const ParserOptions& options = {});
TraceSample ParseTraceText(std::string_view text,
                           const ParserOptions& options = {});
TraceSample ParseTraceFile(const std::string& path,
                           const ParserOptions& options = {});

// Sidecar `<trace>.io.json`: {"label", "task", "read_count", "write_count",
// "read_bytes", "write_bytes"}. Fills io/label/task on the sample.
void ApplySidecar(std::string_view json_text, TraceSample& sample);
std::string SidecarJson(const IoMeta& io, std::optional<int> label,
                        const std::optional<std::string>& task);

// Removes every record whose name fails `keep`; children of removed records
// are promoted into the removed record's place.
struct FilterResult {
  TraceSample sample;
  size_t removed = 0;
};
FilterResult FilterRecords(const TraceSample& sample,
                           const std::function<bool(std::string_view)>& keep);

struct LineFormat {
  bool abstime = false;
  bool comm_pid = false;
  std::string comm = "task-1";
};

// Renders one data line in kernel layout. Only Leaf, Entry and Exit kinds are
// supported.
std::string FormatLine(const RawLine& line, const LineFormat& format);

// Pretty-prints a sample CPU by CPU (no interleaving). Unknown durations on
// closed calls are printed as unclosed entries, so they parse back as unknown.
std::string FormatTrace(const TraceSample& sample);

// Records serialized as JSON for `fgml parse`.
std::string RecordsJson(const TraceSample& sample);

}  // namespace fgml

#endif  // FGML_TRACE_PARSER_H_

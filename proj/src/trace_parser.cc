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

#include "fgml/trace_parser.h"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace fgml {

std::string_view BodyKindName(BodyKind kind) {
  switch (kind) {
    case BodyKind::kLeaf: return "leaf";
    case BodyKind::kEntry: return "entry";
    case BodyKind::kExit: return "exit";
    case BodyKind::kComment: return "comment";
    case BodyKind::kBoundary: return "boundary";
  }
  return "unknown";
}

namespace {

constexpr std::string_view kOverheadMarkers = "+!#*@$";

class LineError {
 public:
  LineError(size_t column, std::string message)
      : column(column), message(std::move(message)) {}
  size_t column;
  std::string message;
};

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

size_t SkipSpaces(std::string_view s, size_t pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  return pos;
}

std::string_view Trim(std::string_view s) {
  size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  size_t e = s.size();
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' ||
                   s[e - 1] == '\n')) {
    --e;
  }
  return s.substr(b, e - b);
}

// Parses a non-negative decimal ("12", "12.500") at the start of `s`.
// Returns the number of characters consumed, 0 when there is no number.
size_t ParseDecimal(std::string_view s, double* out) {
  size_t i = 0;
  while (i < s.size() && IsDigit(s[i])) ++i;
  if (i == 0) return 0;
  if (i < s.size() && s[i] == '.') {
    size_t j = i + 1;
    while (j < s.size() && IsDigit(s[j])) ++j;
    if (j == i + 1) return 0;
    i = j;
  }
  auto res = std::from_chars(s.data(), s.data() + i, *out);
  if (res.ec != std::errc()) return 0;
  return i;
}

bool IsBoundaryText(std::string_view s) {
  std::string_view t = Trim(s);
  if (t.empty()) return false;
  if (t.find("=>") != std::string_view::npos) return true;
  if (t.find("==========") != std::string_view::npos) return true;
  if (t.find("[LOST") != std::string_view::npos) return true;
  if (t.starts_with("CPU") && t.find("is empty") != std::string_view::npos) {
    return true;
  }
  return t.find_first_not_of('-') == std::string_view::npos;
}

// comm-pid tokens look like "bash-1234" (comm may itself contain '-').
bool LooksLikeCommPid(std::string_view s) {
  size_t dash = s.rfind('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 >= s.size()) {
    return false;
  }
  for (size_t i = dash + 1; i < s.size(); ++i) {
    if (!IsDigit(s[i])) return false;
  }
  return true;
}

// Parses the duration column ("  ", "0.462 us", "+ 12.500 us").
void ParseDurationField(std::string_view field, size_t base_column,
                        RawLine* out) {
  size_t pos = SkipSpaces(field, 0);
  if (pos == field.size()) return;
  if (kOverheadMarkers.find(field[pos]) != std::string_view::npos &&
      pos + 1 < field.size() && field[pos + 1] == ' ') {
    out->overhead_marker = field[pos];
    pos = SkipSpaces(field, pos + 1);
  }
  double value = 0.0;
  size_t used = ParseDecimal(field.substr(pos), &value);
  if (used == 0) {
    throw LineError(base_column + pos, "expected duration");
  }
  pos = SkipSpaces(field, pos + used);
  if (field.substr(pos, 2) != "us") {
    throw LineError(base_column + pos, "expected 'us' after duration");
  }
  pos = SkipSpaces(field, pos + 2);
  if (pos != field.size()) {
    throw LineError(base_column + pos, "trailing text in duration column");
  }
  out->duration_us = value;
}

void ParseBody(std::string_view rest, size_t base_column,
               const ParserOptions& options, RawLine* out) {
  size_t spaces = 0;
  while (spaces < rest.size() && rest[spaces] == ' ') ++spaces;
  std::string_view body = Trim(rest.substr(spaces));
  size_t body_column = base_column + spaces;

  if (body.empty()) throw LineError(body_column, "empty function body");
  if (body.find("==========") != std::string_view::npos) {
    out->kind = BodyKind::kBoundary;
    return;
  }
  if (body.starts_with("/*")) {
    // trace_printk() style annotations.
    out->kind = BodyKind::kComment;
    return;
  }

  int margin = options.body_margin;
  int indent = options.indent_width > 0 ? options.indent_width : 2;
  int extra = static_cast<int>(spaces) - margin;
  if (extra < 0 || extra % indent != 0) {
    throw LineError(base_column,
                    "indentation of " + std::to_string(spaces) +
                        " spaces is not a multiple of " +
                        std::to_string(indent) + " after the margin");
  }
  out->depth = extra / indent;

  if (body[0] == '}') {
    out->kind = BodyKind::kExit;
    std::string_view tail = Trim(body.substr(1));
    if (!tail.empty()) {
      if (!tail.starts_with("/*") || !tail.ends_with("*/")) {
        throw LineError(body_column + 1, "malformed exit tail");
      }
      std::string_view name = Trim(tail.substr(2, tail.size() - 4));
      if (name.ends_with("()")) name.remove_suffix(2);
      out->name = std::string(name);
    }
    return;
  }
  if (body.ends_with("() {")) {
    out->kind = BodyKind::kEntry;
    out->name = std::string(Trim(body.substr(0, body.size() - 4)));
  } else if (body.ends_with("();")) {
    out->kind = BodyKind::kLeaf;
    out->name = std::string(Trim(body.substr(0, body.size() - 3)));
  } else {
    throw LineError(body_column, "unrecognized function body");
  }
  if (out->name.empty()) throw LineError(body_column, "empty function name");
}

RawLine ParseLineOrThrow(std::string_view line, const ParserOptions& options) {
  RawLine out;
  std::string_view trimmed = Trim(line);
  if (trimmed.empty() || trimmed[0] == '#') {
    out.kind = BodyKind::kComment;
    return out;
  }
  if (IsBoundaryText(trimmed) && trimmed.find(')') == std::string_view::npos) {
    out.kind = BodyKind::kBoundary;
    return out;
  }

  size_t pos = SkipSpaces(line, 0);

  // Optional absolute timestamp column: "3615.123456 |".
  {
    double value = 0.0;
    size_t used = ParseDecimal(line.substr(pos), &value);
    if (used > 0 && line.substr(pos, used).find('.') != std::string_view::npos) {
      size_t after = SkipSpaces(line, pos + used);
      if (after < line.size() && line[after] == '|') {
        out.abstime = value;
        pos = SkipSpaces(line, after + 1);
      }
    }
  }

  // CPU column: "0)".
  {
    size_t start = pos;
    int cpu = 0;
    auto res = std::from_chars(line.data() + pos, line.data() + line.size(), cpu);
    if (res.ec != std::errc() || res.ptr == line.data() + pos) {
      throw LineError(start, "expected CPU number");
    }
    pos = static_cast<size_t>(res.ptr - line.data());
    if (pos >= line.size() || line[pos] != ')') {
      throw LineError(pos, "expected ')' after CPU number");
    }
    out.cpu = cpu;
    ++pos;
  }

  size_t bar = line.find('|', pos);
  if (bar == std::string_view::npos) {
    if (IsBoundaryText(line.substr(pos))) {
      out.kind = BodyKind::kBoundary;
      return out;
    }
    throw LineError(pos, "missing '|' column separator");
  }
  std::string_view field = line.substr(pos, bar - pos);
  if (IsBoundaryText(field)) {
    out.kind = BodyKind::kBoundary;
    return out;
  }

  std::string_view field_trimmed = Trim(field);
  bool field_is_duration =
      field_trimmed.empty() || field_trimmed.ends_with("us");
  if (!field_is_duration && LooksLikeCommPid(field_trimmed)) {
    out.comm_pid = std::string(field_trimmed);
    pos = bar + 1;
    bar = line.find('|', pos);
    if (bar == std::string_view::npos) {
      throw LineError(pos, "missing '|' after duration column");
    }
    field = line.substr(pos, bar - pos);
  }
  ParseDurationField(field, pos, &out);
  ParseBody(line.substr(bar + 1), bar + 1, options, &out);

  if (out.kind == BodyKind::kEntry && out.duration_us) {
    throw LineError(pos, "entry line carries a duration");
  }
  if ((out.kind == BodyKind::kLeaf || out.kind == BodyKind::kExit) &&
      !out.duration_us && options.strict) {
    throw LineError(pos, "missing duration on " +
                             std::string(BodyKindName(out.kind)) + " line");
  }
  return out;
}

std::string Location(size_t line_no, size_t column) {
  return "line " + std::to_string(line_no) + ", column " +
         std::to_string(column + 1);
}

// Builds the per-CPU forests from classified lines.
class ForestBuilder {
 public:
  ForestBuilder(const ParserOptions& options, TraceSample* sample)
      : options_(options), sample_(sample) {}

  void Add(const RawLine& line, size_t line_no) {
    CpuState& st = cpus_[line.cpu];
    if (st.stack.empty() &&
        (line.kind == BodyKind::kEntry || line.kind == BodyKind::kLeaf)) {
      // A trace that starts mid-call begins deeper than 0; re-base so the
      // partial forest still nests.
      if (line.depth > 0 && line.depth != st.offset) {
        Problem(ErrorCode::kNestingError, line_no,
                "call at depth " + std::to_string(line.depth) +
                    " without an enclosing entry on cpu " +
                    std::to_string(line.cpu));
      }
      st.offset = line.depth;
    }
    int depth = line.depth - st.offset;
    switch (line.kind) {
      case BodyKind::kEntry: {
        CloseDeeperThan(st, depth, line_no);
        depth = ClampDepth(st, depth, line_no);
        CallRecord rec;
        rec.name = line.name;
        rec.cpu = line.cpu;
        rec.depth = depth;
        rec.start_time = line.abstime;
        st.stack.push_back(std::move(rec));
        break;
      }
      case BodyKind::kLeaf: {
        CloseDeeperThan(st, depth, line_no);
        depth = ClampDepth(st, depth, line_no);
        CallRecord rec;
        rec.name = line.name;
        rec.cpu = line.cpu;
        rec.depth = depth;
        rec.duration_us = line.duration_us;
        if (!line.duration_us) {
          Problem(ErrorCode::kNestingError, line_no,
                  "leaf " + line.name + " has no duration");
        }
        rec.start_time = line.abstime;
        if (line.abstime && line.duration_us) {
          rec.end_time = *line.abstime + *line.duration_us * 1e-6;
        }
        Attach(st, line.cpu, std::move(rec));
        break;
      }
      case BodyKind::kExit: {
        if (st.stack.empty() || depth < 0 ||
            depth >= static_cast<int>(st.stack.size())) {
          Problem(ErrorCode::kNestingError, line_no,
                  "unmatched exit at depth " + std::to_string(line.depth) +
                      " on cpu " + std::to_string(line.cpu) + " dropped");
          return;
        }
        CloseDeeperThan(st, depth + 1, line_no);
        CallRecord rec = std::move(st.stack.back());
        st.stack.pop_back();
        if (!line.name.empty() && line.name != rec.name) {
          Problem(ErrorCode::kNestingError, line_no,
                  "exit tail '" + line.name + "' does not match open entry '" +
                      rec.name + "'");
        }
        rec.duration_us = line.duration_us;
        rec.end_time = line.abstime;
        Attach(st, line.cpu, std::move(rec));
        break;
      }
      case BodyKind::kComment:
      case BodyKind::kBoundary:
        break;
    }
  }

  void Finish() {
    for (auto& [cpu, st] : cpus_) {
      while (!st.stack.empty()) {
        sample_->warnings.push_back("unclosed entry '" + st.stack.back().name +
                                    "' on cpu " + std::to_string(cpu) +
                                    " at end of stream; duration unknown");
        PopUnknown(st, cpu);
      }
    }
  }

 private:
  struct CpuState {
    std::vector<CallRecord> stack;
    int offset = 0;
  };

  void Problem(ErrorCode code, size_t line_no, const std::string& message) {
    if (options_.strict) {
      throw Error(code, "line " + std::to_string(line_no) + ": " + message);
    }
    sample_->warnings.push_back("line " + std::to_string(line_no) + ": " +
                                message);
  }

  // Closes open entries at stack positions >= depth (missing exits).
  void CloseDeeperThan(CpuState& st, int depth, size_t line_no) {
    if (depth < 0) depth = 0;
    while (static_cast<int>(st.stack.size()) > depth) {
      Problem(ErrorCode::kNestingError, line_no,
              "entry '" + st.stack.back().name +
                  "' closed without an exit; duration unknown");
      PopUnknown(st, st.stack.back().cpu);
    }
  }

  int ClampDepth(CpuState& st, int depth, size_t line_no) {
    int expected = static_cast<int>(st.stack.size());
    if (depth != expected) {
      Problem(ErrorCode::kNestingError, line_no,
              "depth " + std::to_string(depth) + " skips levels (expected " +
                  std::to_string(expected) + ")");
    }
    return expected;
  }

  void PopUnknown(CpuState& st, int cpu) {
    CallRecord rec = std::move(st.stack.back());
    st.stack.pop_back();
    rec.duration_us.reset();
    Attach(st, cpu, std::move(rec));
  }

  void Attach(CpuState& st, int cpu, CallRecord rec) {
    if (st.stack.empty()) {
      sample_->cpus[cpu].push_back(std::move(rec));
    } else {
      rec.parent_name = st.stack.back().name;
      st.stack.back().children.push_back(std::move(rec));
    }
  }

  const ParserOptions& options_;
  TraceSample* sample_;
  std::map<int, CpuState> cpus_;
};

void Visit(const CallRecord& rec,
           const std::function<void(const CallRecord&)>& fn) {
  fn(rec);
  for (const auto& child : rec.children) Visit(child, fn);
}

}  // namespace

size_t TraceSample::record_count() const {
  size_t n = 0;
  ForEachRecord([&](const CallRecord&) { ++n; });
  return n;
}

void TraceSample::ForEachRecord(
    const std::function<void(const CallRecord&)>& fn) const {
  for (const auto& [cpu, roots] : cpus) {
    for (const auto& root : roots) Visit(root, fn);
  }
}

RawLine ParseLine(std::string_view line, const ParserOptions& options,
                  size_t line_no) {
  try {
    return ParseLineOrThrow(line, options);
  } catch (const LineError& e) {
    std::string message = Location(line_no, e.column) + ": " + e.message;
    if (options.strict) throw Error(ErrorCode::kMalformedLine, message);
    RawLine skipped;
    skipped.kind = BodyKind::kComment;
    skipped.warning = "malformed line skipped (" + message + ")";
    return skipped;
  }
}

TraceSample ParseTrace(std::istream& input, const ParserOptions& options) {
  TraceSample sample;
  ForestBuilder builder(options, &sample);
  std::optional<bool> saw_abstime;
  std::optional<bool> saw_comm;
  std::string line;
  size_t line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    RawLine raw = ParseLine(line, options, line_no);
    if (raw.warning) {
      sample.warnings.push_back(*raw.warning);
      continue;
    }
    if (raw.kind == BodyKind::kComment || raw.kind == BodyKind::kBoundary) {
      continue;
    }
    bool has_abstime = raw.abstime.has_value();
    bool has_comm = raw.comm_pid.has_value();
    if (!saw_abstime) {
      saw_abstime = options.expect_abstime.value_or(has_abstime);
      saw_comm = options.expect_comm_pid.value_or(has_comm);
    }
    if (has_abstime != *saw_abstime || has_comm != *saw_comm) {
      std::string message = "line " + std::to_string(line_no) +
                            ": column layout differs from the detected layout";
      if (options.strict) throw Error(ErrorCode::kMalformedLine, message);
      sample.warnings.push_back(message);
    }
    builder.Add(raw, line_no);
  }
  if (input.bad()) throw Error(ErrorCode::kIoError, "read failure");
  builder.Finish();
  sample.has_abstime = saw_abstime.value_or(false);
  sample.has_comm_pid = saw_comm.value_or(false);
  return sample;
}

TraceSample ParseTraceText(std::string_view text, const ParserOptions& options) {
  std::istringstream in{std::string(text)};
  return ParseTrace(in, options);
}

TraceSample ParseTraceFile(const std::string& path,
                           const ParserOptions& options) {
  std::string text = ReadFile(path);
  try {
    return ParseTraceText(text, options);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void ApplySidecar(std::string_view json_text, TraceSample& sample) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("bad sidecar: ") + e.what());
  }
  IoMeta io;
  auto field = [&](const char* key) -> int64_t {
    if (!j.contains(key)) return 0;
    int64_t v = j.at(key).get<int64_t>();
    if (v < 0) {
      throw Error(ErrorCode::kIoError,
                  std::string("negative sidecar field ") + key);
    }
    return v;
  };
  io.read_count = field("read_count");
  io.write_count = field("write_count");
  io.read_bytes = field("read_bytes");
  io.write_bytes = field("write_bytes");
  sample.io = io;
  if (j.contains("label") && !j["label"].is_null()) {
    sample.label = j["label"].get<int>();
  }
  if (j.contains("task") && !j["task"].is_null()) {
    sample.task = j["task"].get<std::string>();
  }
}

std::string SidecarJson(const IoMeta& io, std::optional<int> label,
                        const std::optional<std::string>& task) {
  nlohmann::ordered_json j;
  j["label"] = label ? nlohmann::ordered_json(*label) : nullptr;
  j["task"] = task ? nlohmann::ordered_json(*task) : nullptr;
  j["read_count"] = io.read_count;
  j["write_count"] = io.write_count;
  j["read_bytes"] = io.read_bytes;
  j["write_bytes"] = io.write_bytes;
  return j.dump(2) + "\n";
}

namespace {

void FilterInto(const CallRecord& rec,
                const std::function<bool(std::string_view)>& keep,
                const std::optional<std::string>& parent, int depth,
                std::vector<CallRecord>* out, size_t* removed) {
  if (keep(rec.name)) {
    CallRecord copy;
    copy.name = rec.name;
    copy.cpu = rec.cpu;
    copy.depth = depth;
    copy.duration_us = rec.duration_us;
    copy.start_time = rec.start_time;
    copy.end_time = rec.end_time;
    copy.parent_name = parent;
    for (const auto& child : rec.children) {
      FilterInto(child, keep, rec.name, depth + 1, &copy.children, removed);
    }
    out->push_back(std::move(copy));
  } else {
    ++*removed;
    for (const auto& child : rec.children) {
      FilterInto(child, keep, parent, depth, out, removed);
    }
  }
}

}  // namespace

FilterResult FilterRecords(const TraceSample& sample,
                           const std::function<bool(std::string_view)>& keep) {
  FilterResult result;
  result.sample.io = sample.io;
  result.sample.label = sample.label;
  result.sample.task = sample.task;
  result.sample.warnings = sample.warnings;
  result.sample.has_abstime = sample.has_abstime;
  result.sample.has_comm_pid = sample.has_comm_pid;
  for (const auto& [cpu, roots] : sample.cpus) {
    std::vector<CallRecord> kept;
    for (const auto& root : roots) {
      FilterInto(root, keep, std::nullopt, 0, &kept, &result.removed);
    }
    if (!kept.empty()) result.sample.cpus[cpu] = std::move(kept);
  }
  return result;
}

std::string FormatLine(const RawLine& line, const LineFormat& format) {
  std::string out;
  char buf[64];
  if (format.abstime) {
    std::snprintf(buf, sizeof buf, "%12.6f |  ", line.abstime.value_or(0.0));
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%2d) ", line.cpu);
  out += buf;
  if (format.comm_pid) {
    std::snprintf(buf, sizeof buf, " %-13s|",
                  line.comm_pid.value_or(format.comm).c_str());
    out += buf;
  }
  if (line.duration_us) {
    char marker = line.overhead_marker.value_or(' ');
    std::snprintf(buf, sizeof buf, "%c %8.3f us   |", marker, *line.duration_us);
  } else {
    std::snprintf(buf, sizeof buf, "%15s|", "");
  }
  out += buf;
  out.append(2 + 2 * static_cast<size_t>(line.depth), ' ');
  switch (line.kind) {
    case BodyKind::kLeaf:
      out += line.name + "();";
      break;
    case BodyKind::kEntry:
      out += line.name + "() {";
      break;
    case BodyKind::kExit:
      out += "}";
      if (!line.name.empty()) out += " /* " + line.name + " */";
      break;
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "FormatLine supports leaf/entry/exit only");
  }
  return out;
}

namespace {

void FormatRecord(const CallRecord& rec, const LineFormat& format,
                  std::string* out) {
  RawLine line;
  line.cpu = rec.cpu;
  line.depth = rec.depth;
  line.name = rec.name;
  if (rec.children.empty() && rec.duration_us) {
    line.kind = BodyKind::kLeaf;
    line.duration_us = rec.duration_us;
    line.abstime = rec.start_time;
    *out += FormatLine(line, format) + "\n";
    return;
  }
  line.kind = BodyKind::kEntry;
  line.abstime = rec.start_time;
  *out += FormatLine(line, format) + "\n";
  for (const auto& child : rec.children) FormatRecord(child, format, out);
  if (rec.duration_us) {
    RawLine exit;
    exit.kind = BodyKind::kExit;
    exit.cpu = rec.cpu;
    exit.depth = rec.depth;
    exit.duration_us = rec.duration_us;
    exit.abstime = rec.end_time;
    exit.name = rec.name;
    *out += FormatLine(exit, format) + "\n";
  }
}

nlohmann::ordered_json RecordToJson(const CallRecord& rec) {
  nlohmann::ordered_json j;
  j["name"] = rec.name;
  j["cpu"] = rec.cpu;
  j["depth"] = rec.depth;
  j["duration_us"] =
      rec.duration_us ? nlohmann::ordered_json(*rec.duration_us) : nullptr;
  if (rec.start_time) j["start_time"] = *rec.start_time;
  if (rec.end_time) j["end_time"] = *rec.end_time;
  if (rec.parent_name) j["parent"] = *rec.parent_name;
  auto children = nlohmann::ordered_json::array();
  for (const auto& child : rec.children) children.push_back(RecordToJson(child));
  j["children"] = std::move(children);
  return j;
}

}  // namespace

std::string FormatTrace(const TraceSample& sample) {
  LineFormat format;
  format.abstime = sample.has_abstime;
  format.comm_pid = sample.has_comm_pid;
  std::string out = "# tracer: function_graph\n#\n";
  for (const auto& [cpu, roots] : sample.cpus) {
    for (const auto& root : roots) FormatRecord(root, format, &out);
  }
  return out;
}

std::string RecordsJson(const TraceSample& sample) {
  nlohmann::ordered_json j;
  j["has_abstime"] = sample.has_abstime;
  j["has_comm_pid"] = sample.has_comm_pid;
  j["record_count"] = sample.record_count();
  j["warnings"] = sample.warnings;
  auto cpus = nlohmann::ordered_json::array();
  for (const auto& [cpu, roots] : sample.cpus) {
    nlohmann::ordered_json c;
    c["cpu"] = cpu;
    auto records = nlohmann::ordered_json::array();
    for (const auto& root : roots) records.push_back(RecordToJson(root));
    c["records"] = std::move(records);
    cpus.push_back(std::move(c));
  }
  j["cpus"] = std::move(cpus);
  return j.dump(2) + "\n";
}

}  // namespace fgml

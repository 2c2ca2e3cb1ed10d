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

#include "fgml/features.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "fgml/call_graph.h"
#include "json.hpp"

namespace fgml {

std::string_view FeatureGroupName(FeatureGroup group) {
  switch (group) {
    case FeatureGroup::kGraph: return "graph";
    case FeatureGroup::kTemporal: return "temporal";
    case FeatureGroup::kSystem: return "system";
  }
  return "unknown";
}

FeatureGroup ParseFeatureGroup(std::string_view name) {
  if (name == "graph") return FeatureGroup::kGraph;
  if (name == "temporal") return FeatureGroup::kTemporal;
  if (name == "system") return FeatureGroup::kSystem;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown feature group '" + std::string(name) + "'");
}

namespace {

const char* const kGraphColumns[kGraphColumnCount] = {
    "betweenness_mean", "betweenness_max", "eigenvector_mean",
    "eigenvector_max",  "clustering_mean", "clustering_max",
    "avg_nbr_deg_mean", "avg_nbr_deg_max"};
const char* const kTemporalColumns[kTemporalGlobalCount] = {
    "mean_call_duration", "std_call_duration", "mean_intercall_interval"};
const char* const kSystemColumns[kSystemGlobalCount] = {
    "read_count", "write_count", "read_bytes", "write_bytes", "total_calls"};

}  // namespace

FeatureGroup GroupForColumnName(std::string_view name) {
  if (name.starts_with("count_")) return FeatureGroup::kSystem;
  if (name.starts_with("total_dur_")) return FeatureGroup::kTemporal;
  for (const char* c : kGraphColumns) {
    if (name == c) return FeatureGroup::kGraph;
  }
  for (const char* c : kTemporalColumns) {
    if (name == c) return FeatureGroup::kTemporal;
  }
  return FeatureGroup::kSystem;
}

FeatureVocabulary VocabularyFromFunctions(std::vector<std::string> functions) {
  std::sort(functions.begin(), functions.end());
  functions.erase(std::unique(functions.begin(), functions.end()),
                  functions.end());
  FeatureVocabulary vocab;
  vocab.function_names = std::move(functions);
  for (const auto& f : vocab.function_names) {
    vocab.columns.push_back({"count_" + f, FeatureGroup::kSystem});
    vocab.columns.push_back({"total_dur_" + f, FeatureGroup::kTemporal});
  }
  for (const char* c : kGraphColumns) {
    vocab.columns.push_back({c, FeatureGroup::kGraph});
  }
  for (const char* c : kTemporalColumns) {
    vocab.columns.push_back({c, FeatureGroup::kTemporal});
  }
  for (const char* c : kSystemColumns) {
    vocab.columns.push_back({c, FeatureGroup::kSystem});
  }
  return vocab;
}

FeatureVocabulary BuildVocabulary(std::span<const TraceSample> corpus) {
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot build a vocabulary");
  }
  std::set<std::string> names;
  for (const auto& sample : corpus) {
    sample.ForEachRecord([&](const CallRecord& r) { names.insert(r.name); });
  }
  return VocabularyFromFunctions({names.begin(), names.end()});
}

namespace {

void MeanMax(const std::vector<double>& values, double* mean, double* max) {
  *mean = 0.0;
  *max = 0.0;
  if (values.empty()) return;
  double total = 0.0;
  double best = values[0];
  for (double v : values) {
    total += v;
    best = std::max(best, v);
  }
  *mean = total / static_cast<double>(values.size());
  *max = best;
}

}  // namespace

FeatureRow Extract(const TraceSample& sample, const FeatureVocabulary& vocab) {
  FeatureRow row;
  row.values.assign(vocab.columns.size(), 0.0);
  const size_t n_funcs = vocab.function_names.size();

  CallGraph graph = BuildGraph(sample);
  for (const auto& [name, stats] : graph.node_stats) {
    auto it = std::lower_bound(vocab.function_names.begin(),
                               vocab.function_names.end(), name);
    if (it == vocab.function_names.end() || *it != name) {
      ++row.unseen_functions;
      continue;
    }
    size_t f = static_cast<size_t>(it - vocab.function_names.begin());
    row.values[2 * f] = static_cast<double>(stats.total_calls);
    row.values[2 * f + 1] = stats.total_duration_us;
  }

  size_t col = 2 * n_funcs;
  UndirectedGraph view = UndirectedView(graph);
  const std::vector<double> metrics[4] = {
      Betweenness(view), Eigenvector(view).values, Clustering(view),
      AverageNeighborDegree(view)};
  for (const auto& m : metrics) {
    MeanMax(m, &row.values[col], &row.values[col + 1]);
    col += 2;
  }

  std::vector<double> durations;
  std::vector<double> starts;
  sample.ForEachRecord([&](const CallRecord& r) {
    if (!r.duration_us) ++row.unknown_durations;
    durations.push_back(r.duration_us.value_or(0.0));
    if (r.start_time) starts.push_back(*r.start_time);
  });
  if (!durations.empty()) {
    double mean = 0.0;
    for (double d : durations) mean += d;
    mean /= static_cast<double>(durations.size());
    double var = 0.0;
    for (double d : durations) var += (d - mean) * (d - mean);
    var /= static_cast<double>(durations.size());
    row.values[col] = mean;
    row.values[col + 1] = std::sqrt(var);
  }
  row.abstime_missing = !sample.has_abstime;
  if (sample.has_abstime && starts.size() >= 2) {
    std::sort(starts.begin(), starts.end());
    // Seconds to microseconds, matching the duration columns.
    row.values[col + 2] = (starts.back() - starts.front()) * 1e6 /
                          static_cast<double>(starts.size() - 1);
  }
  col += kTemporalGlobalCount;

  if (sample.io) {
    row.values[col] = static_cast<double>(sample.io->read_count);
    row.values[col + 1] = static_cast<double>(sample.io->write_count);
    row.values[col + 2] = static_cast<double>(sample.io->read_bytes);
    row.values[col + 3] = static_cast<double>(sample.io->write_bytes);
  } else {
    row.io_missing = true;
  }
  row.values[col + 4] = static_cast<double>(durations.size());
  return row;
}

std::vector<std::string> FeatureMatrix::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

int FeatureMatrix::ColumnIndex(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const size_t> indices) const {
  FeatureMatrix out;
  out.columns = columns;
  out.values = values.SelectRows(indices);
  out.scaling = scaling;
  for (size_t i : indices) {
    out.labels.push_back(labels.empty() ? -1 : labels[i]);
    out.tasks.push_back(tasks.empty() ? std::string() : tasks[i]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::SelectColumns(
    std::span<const size_t> indices) const {
  FeatureMatrix out;
  for (size_t i : indices) out.columns.push_back(columns[i]);
  out.values = values.SelectCols(indices);
  out.labels = labels;
  out.tasks = tasks;
  out.scaling.kind = scaling.kind;
  if (scaling.kind != ScalingState::Kind::kNone) {
    for (size_t i : indices) {
      out.scaling.first.push_back(scaling.first[i]);
      out.scaling.second.push_back(scaling.second[i]);
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::SelectColumns(
    std::span<const std::string> names) const {
  std::vector<size_t> indices;
  for (const auto& name : names) {
    int idx = ColumnIndex(name);
    if (idx < 0) {
      throw Error(ErrorCode::kInvalidArgument, "no column named " + name);
    }
    indices.push_back(static_cast<size_t>(idx));
  }
  return SelectColumns(std::span<const size_t>(indices));
}

CorpusMatrix BuildMatrix(std::span<const TraceSample> corpus,
                         const FeatureVocabulary& vocab) {
  CorpusMatrix out;
  out.matrix.columns = vocab.columns;
  out.matrix.values = Matrix(0, vocab.columns.size());
  for (const auto& sample : corpus) {
    FeatureRow row = Extract(sample, vocab);
    out.matrix.values.AppendRow(row.values);
    out.matrix.labels.push_back(sample.label.value_or(-1));
    out.matrix.tasks.push_back(sample.task.value_or(""));
    if (row.unseen_functions > 0) ++out.unseen_function_rows;
    if (row.io_missing) ++out.io_missing_rows;
    if (row.abstime_missing) ++out.abstime_missing_rows;
  }
  return out;
}

ScalingState MinMaxFit(const Matrix& train) {
  ScalingState state;
  state.kind = ScalingState::Kind::kMinMax;
  state.first.assign(train.cols(), 0.0);
  state.second.assign(train.cols(), 0.0);
  for (size_t c = 0; c < train.cols(); ++c) {
    if (train.rows() == 0) continue;
    double lo = train.at(0, c);
    double hi = lo;
    for (size_t r = 1; r < train.rows(); ++r) {
      lo = std::min(lo, train.at(r, c));
      hi = std::max(hi, train.at(r, c));
    }
    state.first[c] = lo;
    state.second[c] = hi;
  }
  return state;
}

ScalingState ZScoreFit(const Matrix& train) {
  ScalingState state;
  state.kind = ScalingState::Kind::kZScore;
  state.first.assign(train.cols(), 0.0);
  state.second.assign(train.cols(), 0.0);
  const double n = static_cast<double>(train.rows());
  for (size_t c = 0; c < train.cols(); ++c) {
    if (train.rows() == 0) continue;
    double mean = 0.0;
    for (size_t r = 0; r < train.rows(); ++r) mean += train.at(r, c);
    mean /= n;
    double var = 0.0;
    for (size_t r = 0; r < train.rows(); ++r) {
      double d = train.at(r, c) - mean;
      var += d * d;
    }
    state.first[c] = mean;
    state.second[c] = std::sqrt(var / n);
  }
  return state;
}

Matrix ApplyScaling(const Matrix& m, const ScalingState& state) {
  if (state.kind == ScalingState::Kind::kNone) return m;
  if (state.first.size() != m.cols()) {
    throw Error(ErrorCode::kWidthMismatch,
                "scaling state has " + std::to_string(state.first.size()) +
                    " columns, matrix has " + std::to_string(m.cols()));
  }
  Matrix out(m.rows(), m.cols());
  for (size_t c = 0; c < m.cols(); ++c) {
    const double a = state.first[c];
    const double b = state.second[c];
    for (size_t r = 0; r < m.rows(); ++r) {
      const double x = m.at(r, c);
      double y = 0.0;
      if (state.kind == ScalingState::Kind::kMinMax) {
        if (b > a) y = std::clamp((x - a) / (b - a), 0.0, 1.0);
      } else if (b > 0.0) {
        y = (x - a) / b;
      }
      out.at(r, c) = y;
    }
  }
  return out;
}

namespace {

FeatureMatrix WithValues(const FeatureMatrix& m, Matrix values,
                         ScalingState state) {
  FeatureMatrix out;
  out.columns = m.columns;
  out.values = std::move(values);
  out.labels = m.labels;
  out.tasks = m.tasks;
  out.scaling = std::move(state);
  return out;
}

}  // namespace

FeatureMatrix MinMaxFitTransform(const FeatureMatrix& train) {
  ScalingState state = MinMaxFit(train.values);
  return WithValues(train, ApplyScaling(train.values, state), state);
}

FeatureMatrix ZScoreFitTransform(const FeatureMatrix& train) {
  ScalingState state = ZScoreFit(train.values);
  return WithValues(train, ApplyScaling(train.values, state), state);
}

FeatureMatrix ApplyScaling(const FeatureMatrix& m, const ScalingState& state) {
  return WithValues(m, ApplyScaling(m.values, state), state);
}

namespace {

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

double ParseCell(const std::string& cell, size_t line_no) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::kIoError, "line " + std::to_string(line_no) +
                                         ": bad numeric cell '" + cell + "'");
  }
  return v;
}

}  // namespace

std::string MatrixCsv(const FeatureMatrix& m) {
  std::string out;
  for (const auto& c : m.columns) out += CsvEscape(c.name) + ",";
  out += "label,task\n";
  for (size_t r = 0; r < m.rows(); ++r) {
    for (double v : m.values.row(r)) out += FormatDecimal(v) + ",";
    int label = m.labels.empty() ? -1 : m.labels[r];
    if (label >= 0) out += std::to_string(label);
    out += ",";
    if (!m.tasks.empty()) out += CsvEscape(m.tasks[r]);
    out += "\n";
  }
  return out;
}

FeatureMatrix ParseMatrixCsv(std::string_view text,
                             const FeatureVocabulary* vocab) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kIoError, "empty feature CSV");
  }
  std::vector<std::string> header = SplitCsvLine(line);
  if (header.size() < 2 || header[header.size() - 2] != "label" ||
      header.back() != "task") {
    throw Error(ErrorCode::kIoError,
                "feature CSV header must end with label,task");
  }
  FeatureMatrix m;
  const size_t width = header.size() - 2;
  for (size_t i = 0; i < width; ++i) {
    FeatureGroup group = GroupForColumnName(header[i]);
    if (vocab) {
      for (const auto& c : vocab->columns) {
        if (c.name == header[i]) group = c.group;
      }
    }
    m.columns.push_back({header[i], group});
  }
  m.values = Matrix(0, width);
  size_t line_no = 1;
  std::vector<double> row(width);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kWidthMismatch,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    for (size_t i = 0; i < width; ++i) row[i] = ParseCell(cells[i], line_no);
    m.values.AppendRow(row);
    const std::string& label = cells[width];
    m.labels.push_back(label.empty()
                           ? -1
                           : static_cast<int>(ParseCell(label, line_no)));
    m.tasks.push_back(cells[width + 1]);
  }
  return m;
}

std::string VocabularyJson(const FeatureVocabulary& vocab) {
  nlohmann::ordered_json j;
  j["functions"] = vocab.function_names;
  auto cols = nlohmann::ordered_json::array();
  for (const auto& c : vocab.columns) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["group"] = std::string(FeatureGroupName(c.group));
    cols.push_back(std::move(e));
  }
  j["columns"] = std::move(cols);
  return j.dump(2) + "\n";
}

FeatureVocabulary ParseVocabularyJson(std::string_view text) {
  FeatureVocabulary vocab;
  try {
    auto j = nlohmann::json::parse(text);
    vocab.function_names = j.at("functions").get<std::vector<std::string>>();
    for (const auto& e : j.at("columns")) {
      vocab.columns.push_back({e.at("name").get<std::string>(),
                               ParseFeatureGroup(e.at("group").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("bad vocabulary: ") + e.what());
  }
  return vocab;
}

}  // namespace fgml

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

#ifndef FGML_FEATURES_H_
#define FGML_FEATURES_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgml/common.h"
#include "fgml/trace_parser.h"

namespace fgml {

enum class FeatureGroup { kGraph, kTemporal, kSystem };

std::string_view FeatureGroupName(FeatureGroup group);
FeatureGroup ParseFeatureGroup(std::string_view name);

struct FeatureColumn {
  std::string name;
  FeatureGroup group;

  bool operator==(const FeatureColumn&) const = default;
};

// Column layout:
//   count_<f> (system), total_dur_<f> (temporal)  for each function f, sorted
//   betweenness_{mean,max} .. avg_nbr_deg_{mean,max}                   (graph)
//   mean_call_duration, std_call_duration, mean_intercall_interval (temporal)
//   read_count, write_count, read_bytes, write_bytes, total_calls     (system)
struct FeatureVocabulary {
  std::vector<std::string> function_names;
  std::vector<FeatureColumn> columns;

  bool operator==(const FeatureVocabulary&) const = default;
};

inline constexpr size_t kGraphColumnCount = 8;
inline constexpr size_t kTemporalGlobalCount = 3;
inline constexpr size_t kSystemGlobalCount = 5;

FeatureVocabulary BuildVocabulary(std::span<const TraceSample> corpus);
FeatureVocabulary VocabularyFromFunctions(std::vector<std::string> functions);

struct FeatureRow {
  std::vector<double> values;
  size_t unseen_functions = 0;  // distinct names not in the vocabulary
  bool io_missing = false;
  bool abstime_missing = false;
  size_t unknown_durations = 0;
};

FeatureRow Extract(const TraceSample& sample, const FeatureVocabulary& vocab);

struct ScalingState {
  enum class Kind { kNone, kMinMax, kZScore };
  Kind kind = Kind::kNone;
  // min/max for kMinMax, mean/std for kZScore.
  std::vector<double> first;
  std::vector<double> second;
};

struct FeatureMatrix {
  std::vector<FeatureColumn> columns;
  Matrix values;
  std::vector<int> labels;          // -1 when unlabeled
  std::vector<std::string> tasks;   // empty string when absent
  ScalingState scaling;

  size_t rows() const { return values.rows(); }
  std::vector<std::string> column_names() const;
  // Index of the named column, or -1.
  int ColumnIndex(std::string_view name) const;
  FeatureMatrix SelectRows(std::span<const size_t> indices) const;
  FeatureMatrix SelectColumns(std::span<const size_t> indices) const;
  FeatureMatrix SelectColumns(std::span<const std::string> names) const;
};

struct CorpusMatrix {
  FeatureMatrix matrix;
  size_t unseen_function_rows = 0;
  size_t io_missing_rows = 0;
  size_t abstime_missing_rows = 0;
};

CorpusMatrix BuildMatrix(std::span<const TraceSample> corpus,
                         const FeatureVocabulary& vocab);

ScalingState MinMaxFit(const Matrix& train);
ScalingState ZScoreFit(const Matrix& train);
// Applies a fitted state. Min-max output is clipped to [0, 1]; constant
// columns (max == min, or std == 0) map to 0.
Matrix ApplyScaling(const Matrix& m, const ScalingState& state);

FeatureMatrix MinMaxFitTransform(const FeatureMatrix& train);
FeatureMatrix ZScoreFitTransform(const FeatureMatrix& train);
FeatureMatrix ApplyScaling(const FeatureMatrix& m, const ScalingState& state);

// CSV with a header of column names followed by `label,task`; cells use up
// to 9 significant digits.
std::string MatrixCsv(const FeatureMatrix& m);
// Column groups are not stored in the CSV; pass the vocabulary to restore
// them, otherwise every column is tagged by name pattern.
FeatureMatrix ParseMatrixCsv(std::string_view text,
                             const FeatureVocabulary* vocab = nullptr);

std::string VocabularyJson(const FeatureVocabulary& vocab);
FeatureVocabulary ParseVocabularyJson(std::string_view text);

// Group inferred from the column naming scheme above.
FeatureGroup GroupForColumnName(std::string_view name);

}  // namespace fgml

#endif  // FGML_FEATURES_H_

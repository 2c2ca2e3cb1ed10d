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

#ifndef FGML_METRICS_H_
#define FGML_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fgml/common.h"
#include "fgml/learners.h"

namespace fgml {

struct Metrics {
  double accuracy = 0.0;
  // Positive class 1 for binary problems, macro averages otherwise.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.5;
  // confusion[true][predicted]
  std::vector<std::vector<int64_t>> confusion;
};

struct MultiLabelMetrics {
  double f1_macro = 0.0;
  double f1_micro = 0.0;
  // Fraction of rows whose whole label vector is predicted exactly.
  double subset_accuracy = 0.0;
  std::vector<double> per_label_f1;
};

// Probability that a random positive outranks a random negative, ties
// counting 1/2 (Mann-Whitney). Returns 0.5 when either class is absent.
double RocAuc(std::span<const int> labels, std::span<const double> scores);

// F1 from counts; 0 when the denominator is 0.
double F1FromCounts(int64_t tp, int64_t fp, int64_t fn);

Metrics ClassificationMetrics(std::span<const int> truth,
                              std::span<const int> predicted,
                              std::span<const double> scores, int n_classes = 2);

MultiLabelMetrics MultiLabelScores(const std::vector<std::vector<int>>& truth,
                                   const std::vector<std::vector<int>>& predicted);

// Throws Error(kWidthMismatch) when the matrix width differs from the model.
Metrics Evaluate(const Model& model, const Matrix& x, std::span<const int> y);
MultiLabelMetrics Evaluate(const OneVsRestModel& model, const Matrix& x,
                           std::span<const std::string> tasks);

std::string MetricsJson(const Metrics& m);

}  // namespace fgml

#endif  // FGML_METRICS_H_

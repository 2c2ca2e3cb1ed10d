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

#include "fgml/metrics.h"

#include <algorithm>
#include <numeric>

#include "json.hpp"

namespace fgml {

double RocAuc(std::span<const int> labels, std::span<const double> scores) {
  const size_t n = labels.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Sum of mid-ranks of the positives.
  double rank_sum = 0.0;
  double positives = 0.0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mid_rank;
        positives += 1.0;
      }
    }
    i = j;
  }
  double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) return 0.5;
  return (rank_sum - positives * (positives + 1.0) / 2.0) /
         (positives * negatives);
}

double F1FromCounts(int64_t tp, int64_t fp, int64_t fn) {
  int64_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

namespace {

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics ClassificationMetrics(std::span<const int> truth,
                              std::span<const int> predicted,
                              std::span<const double> scores, int n_classes) {
  Metrics m;
  m.confusion.assign(n_classes, std::vector<int64_t>(n_classes, 0));
  for (size_t i = 0; i < truth.size(); ++i) {
    ++m.confusion[truth[i]][predicted[i]];
  }
  int64_t correct = 0;
  for (int k = 0; k < n_classes; ++k) correct += m.confusion[k][k];
  m.accuracy = Ratio(correct, static_cast<int64_t>(truth.size()));

  if (n_classes == 2) {
    int64_t tp = m.confusion[1][1];
    int64_t fp = m.confusion[0][1];
    int64_t fn = m.confusion[1][0];
    m.precision = Ratio(tp, tp + fp);
    m.recall = Ratio(tp, tp + fn);
    m.f1 = F1FromCounts(tp, fp, fn);
    if (!scores.empty()) m.roc_auc = RocAuc(truth, scores);
    return m;
  }

  for (int k = 0; k < n_classes; ++k) {
    int64_t tp = m.confusion[k][k];
    int64_t fp = 0;
    int64_t fn = 0;
    for (int j = 0; j < n_classes; ++j) {
      if (j == k) continue;
      fp += m.confusion[j][k];
      fn += m.confusion[k][j];
    }
    m.precision += Ratio(tp, tp + fp);
    m.recall += Ratio(tp, tp + fn);
    m.f1 += F1FromCounts(tp, fp, fn);
  }
  m.precision /= n_classes;
  m.recall /= n_classes;
  m.f1 /= n_classes;
  return m;
}

MultiLabelMetrics MultiLabelScores(
    const std::vector<std::vector<int>>& truth,
    const std::vector<std::vector<int>>& predicted) {
  MultiLabelMetrics out;
  if (truth.empty()) return out;
  const size_t k = truth[0].size();
  std::vector<int64_t> tp(k, 0), fp(k, 0), fn(k, 0);
  size_t exact = 0;
  for (size_t r = 0; r < truth.size(); ++r) {
    if (truth[r] == predicted[r]) ++exact;
    for (size_t j = 0; j < k; ++j) {
      int t = truth[r][j];
      int p = predicted[r][j];
      if (t && p) ++tp[j];
      if (!t && p) ++fp[j];
      if (t && !p) ++fn[j];
    }
  }
  int64_t all_tp = 0, all_fp = 0, all_fn = 0;
  for (size_t j = 0; j < k; ++j) {
    out.per_label_f1.push_back(F1FromCounts(tp[j], fp[j], fn[j]));
    out.f1_macro += out.per_label_f1.back();
    all_tp += tp[j];
    all_fp += fp[j];
    all_fn += fn[j];
  }
  out.f1_macro /= static_cast<double>(k);
  out.f1_micro = F1FromCounts(all_tp, all_fp, all_fn);
  out.subset_accuracy =
      static_cast<double>(exact) / static_cast<double>(truth.size());
  return out;
}

Metrics Evaluate(const Model& model, const Matrix& x, std::span<const int> y) {
  model.CheckWidth(x.cols());
  std::vector<int> predicted = model.PredictAll(x);
  std::vector<double> scores;
  if (model.n_classes == 2) scores = model.ScoreAll(x);
  return ClassificationMetrics(y, predicted, scores, model.n_classes);
}

MultiLabelMetrics Evaluate(const OneVsRestModel& model, const Matrix& x,
                           std::span<const std::string> tasks) {
  if (x.cols() != model.feature_names.size()) {
    throw Error(ErrorCode::kWidthMismatch,
                "matrix has " + std::to_string(x.cols()) +
                    " columns, model expects " +
                    std::to_string(model.feature_names.size()));
  }
  OneHot truth = OneHotEncode(tasks, model.labels);
  std::vector<std::vector<int>> predicted;
  predicted.reserve(x.rows());
  for (size_t r = 0; r < x.rows(); ++r) predicted.push_back(model.Predict(x.row(r)));
  return MultiLabelScores(truth.rows, predicted);
}

std::string MetricsJson(const Metrics& m) {
  nlohmann::ordered_json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["roc_auc"] = m.roc_auc;
  j["confusion"] = m.confusion;
  return j.dump(2) + "\n";
}

}  // namespace fgml

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

// Splits, cross-validation, hyperparameter search, learning curves, noise
// perturbation, feature-group ablation and the two end-to-end pipelines.
//
// Every randomised step takes its seed from DeriveSeed(top-level seed, tag),
// and parallel jobs write into their own slots, so results do not depend on
// `jobs`.

#ifndef FGML_EXPERIMENTS_H_
#define FGML_EXPERIMENTS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fgml/common.h"
#include "fgml/features.h"
#include "fgml/learners.h"
#include "fgml/metrics.h"
#include "fgml/selection.h"
#include "fgml/trace_parser.h"

namespace fgml {

struct SplitSpec {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  bool stratified = true;
  uint64_t seed = 0;
};

struct Split {
  // Ascending row indices.
  std::vector<size_t> train;
  std::vector<size_t> val;
  std::vector<size_t> test;
};

// Per class: shuffle, give floor(n_c * val_frac) rows to val and
// floor(n_c * test_frac) to test, the rest to train. Throws ClassTooSmall when
// a class would leave any split without a row of it.
Split StratifiedSplit(std::span<const int> labels, const SplitSpec& spec);

// Dense class ids (sorted distinct task names -> 0..k-1).
std::vector<int> TaskIds(std::span<const std::string> tasks);

// Stratified fold id (0..k-1) per row. Throws ClassTooSmall when a class has
// fewer than k rows.
std::vector<int> StratifiedFolds(std::span<const int> labels, int k,
                                 uint64_t seed);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation across folds
};

MetricSummary Summarize(std::span<const double> values);

struct CvSummary {
  MetricSummary accuracy;
  MetricSummary precision;
  MetricSummary recall;
  MetricSummary f1;
  MetricSummary roc_auc;
  MetricSummary train_accuracy;
  std::vector<Metrics> folds;
};

// Fold i is fitted with seed DeriveSeed(seed, "fit", i) on the other folds'
// rows in ascending order.
CvSummary KFoldCv(const Matrix& x, std::span<const int> y,
                  const LearnerSpec& learner, int k, uint64_t seed,
                  int jobs = 1);

struct MultiLabelCvSummary {
  MetricSummary f1_micro;
  MetricSummary f1_macro;
  MetricSummary subset_accuracy;
  std::vector<MultiLabelMetrics> folds;
};

// One-vs-rest cross-validation with folds stratified by task.
MultiLabelCvSummary KFoldCvMultiLabel(const Matrix& x,
                                      std::span<const std::string> tasks,
                                      const LearnerSpec& base, int k,
                                      uint64_t seed, int jobs = 1);

// Parameter name -> candidate values.
using ParamGrid = std::map<std::string, std::vector<double>>;

// Cartesian product in key order, the last key varying fastest. Throws
// EmptyGrid when the product is empty.
std::vector<Params> ExpandGrid(const ParamGrid& grid);

struct SearchPoint {
  Params params;
  // Mean accuracy (binary) or mean F1-micro (multi-label).
  double score = 0.0;
  double score_std = 0.0;
};

struct SearchResult {
  std::vector<SearchPoint> points;
  size_t best_index = 0;
  size_t fits = 0;
  const Params& best() const { return points[best_index].params; }
};

SearchResult GridSearch(const Matrix& x, std::span<const int> y,
                        LearnerKind kind, const ParamGrid& grid, int k,
                        uint64_t seed, int jobs = 1);
// n_draws points, each parameter drawn uniformly from its candidate list.
SearchResult RandomSearch(const Matrix& x, std::span<const int> y,
                          LearnerKind kind, const ParamGrid& grid, int n_draws,
                          int k, uint64_t seed, int jobs = 1);
SearchResult GridSearchMultiLabel(const Matrix& x,
                                  std::span<const std::string> tasks,
                                  LearnerKind kind, const ParamGrid& grid,
                                  int k, uint64_t seed, int jobs = 1);
SearchResult RandomSearchMultiLabel(const Matrix& x,
                                    std::span<const std::string> tasks,
                                    LearnerKind kind, const ParamGrid& grid,
                                    int n_draws, int k, uint64_t seed,
                                    int jobs = 1);

struct CurveRow {
  double fraction = 0.0;
  double train_size = 0.0;  // mean training rows per fold
  MetricSummary train;
  MetricSummary val;
};

inline constexpr const char* kCurvePolicy =
    "folds assigned once on the full pool; each fold's training part is "
    "subsampled per class to max(1, round(f * n_c)) rows using nested "
    "prefixes of one seeded permutation; validation uses the whole held-out "
    "fold";

std::vector<double> DefaultFractions();

// Throws ClassTooSmall when some fold's subsample lacks a class.
std::vector<CurveRow> LearningCurve(const Matrix& x, std::span<const int> y,
                                    const LearnerSpec& learner,
                                    std::span<const double> fractions, int k,
                                    uint64_t seed, int jobs = 1);
std::string CurveCsv(std::span<const CurveRow> rows);

struct PerturbationTable {
  std::vector<std::string> features;
  // sigmas[0] is the 0 baseline.
  std::vector<double> sigmas;
  // accuracy[feature][sigma]
  std::vector<std::vector<double>> accuracy;
  double baseline = 0.0;
};

std::vector<double> DefaultSigmas();

// Fits once on the clean training rows (seed DeriveSeed(seed, "fit")), then
// adds N(0, sigma) noise to one column of the evaluation rows at a time.
PerturbationTable PerturbationStudy(const Matrix& train_x,
                                    std::span<const int> train_y,
                                    const Matrix& eval_x,
                                    std::span<const int> eval_y,
                                    const LearnerSpec& learner,
                                    std::span<const std::string> names,
                                    std::span<const double> sigmas,
                                    uint64_t seed, int jobs = 1);
std::string PerturbationCsv(const PerturbationTable& table);

struct AblationRow {
  std::string config;
  std::vector<FeatureGroup> groups;
  size_t n_features = 0;
  CvSummary summary;
};

// Seven configurations: all, without each group, each group alone. Throws
// EmptyGroup when a group has no columns.
std::vector<AblationRow> AblationStudy(const FeatureMatrix& m,
                                       std::span<const int> y,
                                       const LearnerSpec& learner, int k,
                                       uint64_t seed, int jobs = 1);
std::string AblationCsv(std::span<const AblationRow> rows);

// Row indices giving every task the same count: downsampling to the smallest
// class without replacement, or with `oversample` upsampling to the largest
// with replacement. Sorted ascending when downsampling.
std::vector<size_t> BalanceByResampling(std::span<const std::string> tasks,
                                        uint64_t seed, bool oversample = false);
FeatureMatrix BalanceByResampling(const FeatureMatrix& m, uint64_t seed,
                                  bool oversample = false);

// Digest over a feature matrix's column names, cells, labels and tasks.
std::string MatrixDigest(const FeatureMatrix& m);

struct Experiment1Config {
  uint64_t seed = 7;
  int k_features = 60;
  LearnerKind learner = LearnerKind::kBoosting;
  ParamGrid grid;  // empty: learner-specific default grid
  int folds = 5;
  SplitSpec split;  // seed ignored, derived from `seed`
  std::vector<double> fractions = DefaultFractions();
  std::vector<double> sigmas = DefaultSigmas();
  bool run_curve = true;
  bool run_perturbation = true;
  bool run_ablation = true;
  int jobs = 1;
};

struct Experiment1Result {
  std::vector<std::string> selected;
  std::vector<ScoredFeature> scores;
  SearchResult search;
  Metrics validation;
  Metrics test;
  std::vector<CurveRow> curve;
  PerturbationTable perturbation;
  std::vector<AblationRow> ablation;
  std::string digest;
  // Report JSON (no wall-clock values, so reruns are byte-identical).
  std::string report_json;
};

Experiment1Result RunExperiment1(std::span<const TraceSample> corpus,
                                 const Experiment1Config& config);

struct Experiment2Config {
  uint64_t seed = 7;
  int k_features = 40;
  LearnerKind learner = LearnerKind::kForest;
  ParamGrid grid;  // empty: default forest grid
  int n_draws = 3;
  int folds = 5;
  SplitSpec split;
  std::vector<double> sigmas = {0.01, 0.05};
  bool oversample = false;
  int jobs = 1;
};

struct NoiseRow {
  double sigma = 0.0;
  MultiLabelMetrics metrics;
};

struct Experiment2Result {
  std::vector<std::string> selected;
  std::vector<ScoredFeature> scores;
  SearchResult search;
  MultiLabelMetrics validation;
  MultiLabelMetrics test;
  std::vector<NoiseRow> noise;
  std::string digest;
  std::string report_json;
};

Experiment2Result RunExperiment2(std::span<const TraceSample> corpus,
                                 const Experiment2Config& config);

// `name=v1,v2;name2=v3` as used on the command line.
ParamGrid ParseParamGrid(std::string_view text);

}  // namespace fgml

#endif  // FGML_EXPERIMENTS_H_

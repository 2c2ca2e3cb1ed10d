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

#include "fgml/experiments.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

namespace fgml {
namespace {

std::vector<int> Balanced(int per_class) {
  std::vector<int> y;
  for (int i = 0; i < 2 * per_class; ++i) y.push_back(i % 2);
  return y;
}

// Column 0 carries the label with some overlap, column 1 is noise.
void Data(size_t n, uint64_t seed, Matrix* x, std::vector<int>* y) {
  Rng rng(seed);
  *x = Matrix(n, 2);
  y->assign(n, 0);
  for (size_t r = 0; r < n; ++r) {
    int c = static_cast<int>(r % 2);
    (*y)[r] = c;
    x->at(r, 0) = c + rng.Normal() * 0.4;
    x->at(r, 1) = rng.Normal();
  }
}

TEST(StratifiedSplit, PerClassCounts) {
  std::vector<int> y = Balanced(50);
  Split s = StratifiedSplit(y, SplitSpec{});
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.val.size(), 10u);
  EXPECT_EQ(s.test.size(), 10u);
  for (const auto* part : {&s.train, &s.val, &s.test}) {
    size_t ones = 0;
    for (size_t i : *part) ones += y[i];
    EXPECT_EQ(2 * ones, part->size());
    EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
  }
  std::vector<size_t> all = s.train;
  all.insert(all.end(), s.val.begin(), s.val.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
}

TEST(StratifiedSplit, ClassTooSmall) {
  std::vector<int> y = Balanced(5);
  try {
    StratifiedSplit(y, SplitSpec{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClassTooSmall);
  }
}

TEST(StratifiedFolds, EvenAssignment) {
  std::vector<int> y = Balanced(5);
  std::vector<int> folds = StratifiedFolds(y, 5, 3);
  std::map<int, std::vector<int>> per_fold;
  for (size_t i = 0; i < y.size(); ++i) per_fold[folds[i]].push_back(y[i]);
  ASSERT_EQ(per_fold.size(), 5u);
  for (auto& [f, labels] : per_fold) {
    std::sort(labels.begin(), labels.end());
    EXPECT_EQ(labels, (std::vector<int>{0, 1}));
  }
  EXPECT_EQ(StratifiedFolds(y, 5, 3), folds);
  EXPECT_THROW(StratifiedFolds(y, 6, 3), Error);
}

TEST(Summarize, PopulationStd) {
  MetricSummary s = Summarize(std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std, std::sqrt(1.25), 1e-12);
}

TEST(KFoldCv, PureDepthZeroLearnerIsMajority) {
  // A depth-1 tree on a constant column predicts a constant per fold.
  std::vector<int> y = Balanced(10);
  Matrix x(y.size(), 1, 3.0);
  CvSummary cv = KFoldCv(x, y, {LearnerKind::kTree, {}}, 5, 1);
  EXPECT_EQ(cv.folds.size(), 5u);
  EXPECT_EQ(cv.accuracy.mean, 0.5);
  EXPECT_EQ(cv.roc_auc.mean, 0.5);
}

TEST(KFoldCv, JobsDoNotChangeResults) {
  Matrix x;
  std::vector<int> y;
  Data(80, 2, &x, &y);
  LearnerSpec spec{LearnerKind::kForest, {{"n_trees", 10}}};
  CvSummary a = KFoldCv(x, y, spec, 4, 9, 1);
  CvSummary b = KFoldCv(x, y, spec, 4, 9, 4);
  EXPECT_EQ(a.accuracy.mean, b.accuracy.mean);
  EXPECT_EQ(a.roc_auc.std, b.roc_auc.std);
}

TEST(ExpandGrid, Order) {
  ParamGrid g = {{"a", {1, 2}}, {"b", {3, 4, 5}}};
  auto points = ExpandGrid(g);
  ASSERT_EQ(points.size(), 6u);
  EXPECT_EQ(points[0], (Params{{"a", 1}, {"b", 3}}));
  EXPECT_EQ(points[1], (Params{{"a", 1}, {"b", 4}}));
  EXPECT_EQ(points[5], (Params{{"a", 2}, {"b", 5}}));
  EXPECT_EQ(ExpandGrid({}).size(), 1u);
  EXPECT_THROW(ExpandGrid({{"a", {}}}), Error);
}

TEST(GridSearch, FitCountAndSingleton) {
  Matrix x;
  std::vector<int> y;
  Data(60, 4, &x, &y);
  SearchResult r =
      GridSearch(x, y, LearnerKind::kTree, {{"max_depth", {1, 2, 3}}}, 3, 5);
  EXPECT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.fits, 9u);
  for (const auto& p : r.points) EXPECT_LE(p.score, r.points[r.best_index].score);
  SearchResult one = GridSearch(x, y, LearnerKind::kTree, {{"max_depth", {2}}}, 3, 5);
  EXPECT_EQ(one.best_index, 0u);
  CvSummary cv = KFoldCv(x, y, {LearnerKind::kTree, {{"max_depth", 2}}}, 3, 5);
  EXPECT_EQ(one.points[0].score, cv.accuracy.mean);
}

TEST(RandomSearch, Deterministic) {
  Matrix x;
  std::vector<int> y;
  Data(60, 6, &x, &y);
  ParamGrid g = {{"max_depth", {1, 2, 3, 4}}, {"min_samples_split", {2, 4}}};
  SearchResult a = RandomSearch(x, y, LearnerKind::kTree, g, 4, 3, 11);
  SearchResult b = RandomSearch(x, y, LearnerKind::kTree, g, 4, 3, 11);
  ASSERT_EQ(a.points.size(), 4u);
  for (size_t i = 0; i < 4; ++i) EXPECT_EQ(a.points[i].params, b.points[i].params);
  EXPECT_EQ(a.fits, 12u);
}

TEST(LearningCurve, ShapeAndFullFractionMatchesCv) {
  Matrix x;
  std::vector<int> y;
  Data(100, 8, &x, &y);
  LearnerSpec spec{LearnerKind::kTree, {{"max_depth", 3}}};
  std::vector<double> fr = {0.2, 0.5, 1.0};
  auto rows = LearningCurve(x, y, spec, fr, 5, 13);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rows[0].train_size, rows[1].train_size);
  EXPECT_EQ(rows[2].train_size, 80.0);
  CvSummary cv = KFoldCv(x, y, spec, 5, 13);
  EXPECT_EQ(rows[2].val.mean, cv.accuracy.mean);
  EXPECT_EQ(rows[2].train.mean, cv.train_accuracy.mean);
  std::string csv = CurveCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "fraction,train_size,train_mean,train_std,val_mean,val_std");
}

TEST(Perturbation, BaselineAndUnusedColumn) {
  Matrix x;
  std::vector<int> y;
  Data(120, 10, &x, &y);
  std::vector<size_t> tr, te;
  for (size_t i = 0; i < 120; ++i) (i < 80 ? tr : te).push_back(i);
  Matrix trx = x.SelectRows(tr), tex = x.SelectRows(te);
  std::vector<int> try_(y.begin(), y.begin() + 80), tey(y.begin() + 80, y.end());
  // Stump on column 0 only: column 1 noise cannot change predictions.
  LearnerSpec spec{LearnerKind::kTree, {{"max_depth", 1}}};
  std::vector<std::string> names = {"signal", "noise"};
  std::vector<double> sigmas = {0.5, 2.0};
  PerturbationTable t =
      PerturbationStudy(trx, try_, tex, tey, spec, names, sigmas, 3);
  EXPECT_EQ(t.sigmas, (std::vector<double>{0.0, 0.5, 2.0}));
  ASSERT_EQ(t.accuracy.size(), 2u);
  ASSERT_EQ(t.accuracy[0].size(), 3u);
  Model m = Fit(spec, trx, try_, DeriveSeed(3, "fit"));
  double clean = Evaluate(m, tex, tey).accuracy;
  EXPECT_EQ(t.baseline, clean);
  EXPECT_EQ(t.accuracy[0][0], clean);
  for (double a : t.accuracy[1]) EXPECT_EQ(a, clean);
  EXPECT_LT(t.accuracy[0][2], clean);
  std::string csv = PerturbationCsv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "feature,sigma_0,sigma_0.5,sigma_2");
}

FeatureMatrix GroupMatrix(size_t n, uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m;
  m.columns = {{"betweenness_mean", FeatureGroup::kGraph},
               {"total_dur_f", FeatureGroup::kTemporal},
               {"count_f", FeatureGroup::kSystem}};
  for (size_t r = 0; r < n; ++r) {
    int c = static_cast<int>(r % 2);
    m.values.AppendRow(std::vector<double>{c + rng.Normal() * 0.2, rng.Normal(),
                                           rng.Normal()});
    m.labels.push_back(c);
    m.tasks.push_back(c ? "t1" : "t0");
  }
  return m;
}

TEST(Ablation, SevenConfigs) {
  FeatureMatrix m = GroupMatrix(60, 12);
  auto rows = AblationStudy(m, m.labels, {LearnerKind::kTree, {{"max_depth", 2}}},
                            3, 4);
  ASSERT_EQ(rows.size(), 7u);
  std::vector<std::string> configs;
  for (const auto& r : rows) configs.push_back(r.config);
  EXPECT_EQ(configs,
            (std::vector<std::string>{"all", "without_graph", "without_temporal",
                                      "without_system", "graph_only",
                                      "temporal_only", "system_only"}));
  EXPECT_EQ(rows[0].n_features, 3u);
  EXPECT_EQ(rows[1].n_features, 2u);
  EXPECT_EQ(rows[4].n_features, 1u);
  EXPECT_GT(rows[4].summary.accuracy.mean, rows[1].summary.accuracy.mean);
  std::string csv = AblationCsv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "config,n_features,accuracy_mean,accuracy_std,f1_mean,f1_std,"
            "roc_auc_mean,roc_auc_std");
}

TEST(Ablation, EmptyGroup) {
  FeatureMatrix m = GroupMatrix(30, 1);
  std::vector<std::string> keep = {"betweenness_mean", "count_f"};
  FeatureMatrix s = m.SelectColumns(keep);
  try {
    AblationStudy(s, s.labels, {LearnerKind::kTree, {}}, 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyGroup);
  }
}

TEST(Balance, DownAndUp) {
  std::vector<std::string> tasks = {"a", "a", "b", "a", "b", "a", "b", "a"};
  auto down = BalanceByResampling(tasks, 3);
  std::map<std::string, int> counts;
  for (size_t i : down) ++counts[tasks[i]];
  EXPECT_EQ(counts, (std::map<std::string, int>{{"a", 3}, {"b", 3}}));
  EXPECT_TRUE(std::is_sorted(down.begin(), down.end()));
  auto up = BalanceByResampling(tasks, 3, true);
  counts.clear();
  for (size_t i : up) ++counts[tasks[i]];
  EXPECT_EQ(counts, (std::map<std::string, int>{{"a", 5}, {"b", 5}}));
  std::vector<std::string> one = {"a", "a"};
  EXPECT_THROW(BalanceByResampling(one, 1), Error);
}

TEST(ParseParamGrid, Syntax) {
  ParamGrid g = ParseParamGrid("n_rounds=50,100;max_depth=2");
  EXPECT_EQ(g.at("n_rounds"), (std::vector<double>{50, 100}));
  EXPECT_EQ(g.at("max_depth"), (std::vector<double>{2}));
  EXPECT_THROW(ParseParamGrid("oops"), Error);
}

TEST(TaskIds, SortedDense) {
  std::vector<std::string> t = {"z", "a", "m", "a"};
  EXPECT_EQ(TaskIds(t), (std::vector<int>{2, 0, 1, 0}));
}

}  // namespace
}  // namespace fgml

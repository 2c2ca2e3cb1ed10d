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

#include "fgml/learners.h"

#include <gtest/gtest.h>

#include <cmath>

#include "fgml/metrics.h"

namespace fgml {
namespace {

Matrix Rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.AppendRow(r);
  return m;
}

const Matrix kXor = Rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
const std::vector<int> kXorY = {0, 1, 1, 0};

double TrainAccuracy(const Model& m, const Matrix& x, const std::vector<int>& y) {
  return Evaluate(m, x, y).accuracy;
}

// Two noisy blobs, separable along feature 0.
void Blobs(size_t n, uint64_t seed, Matrix* x, std::vector<int>* y) {
  Rng rng(seed);
  *x = Matrix(n, 3);
  y->assign(n, 0);
  for (size_t r = 0; r < n; ++r) {
    int c = static_cast<int>(r % 2);
    (*y)[r] = c;
    x->at(r, 0) = c * 2.0 + rng.Normal() * 0.6;
    x->at(r, 1) = rng.Normal();
    x->at(r, 2) = rng.Uniform();
  }
}

TEST(Tree, OneDimensionalThreshold) {
  Matrix x = Rows({{1}, {2}, {3}, {4}});
  std::vector<int> y = {0, 0, 1, 1};
  Model m = TrainTree(x, y, {});
  const auto& root = std::get<TreeState>(m.state).tree.nodes()[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_EQ(root.threshold, 2.5);
  EXPECT_EQ(TrainAccuracy(m, x, y), 1.0);
}

TEST(Tree, XorAtDepthTwo) {
  Model m = TrainTree(kXor, kXorY, {{"max_depth", 2}});
  EXPECT_EQ(TrainAccuracy(m, kXor, kXorY), 1.0);
  Model stump = TrainTree(kXor, kXorY, {{"max_depth", 1}});
  EXPECT_LT(TrainAccuracy(stump, kXor, kXorY), 1.0);
}

TEST(Tree, PureNodeIsLeaf) {
  Matrix x = Rows({{1}, {2}, {3}});
  std::vector<int> y = {1, 1, 1};
  Model m = TrainTree(x, y, {});
  EXPECT_EQ(std::get<TreeState>(m.state).tree.nodes().size(), 1u);
  EXPECT_EQ(m.Predict(x.row(0)), 1);
}

TEST(Tree, ProbabilitiesSumToOne) {
  Matrix x;
  std::vector<int> y;
  Blobs(60, 3, &x, &y);
  Model m = TrainTree(x, y, {{"max_depth", 2}});
  for (size_t r = 0; r < x.rows(); ++r) {
    auto p = m.PredictProba(x.row(r));
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
  }
}

TEST(Forest, DegenerateForestEqualsTree) {
  Matrix x;
  std::vector<int> y;
  Blobs(80, 5, &x, &y);
  Model tree = TrainTree(x, y, {{"max_depth", 0}});
  Model forest = TrainForest(
      x, y, {{"n_trees", 1}, {"bootstrap", 0}, {"max_features", -1}}, 9);
  for (size_t r = 0; r < x.rows(); ++r) {
    EXPECT_EQ(tree.PredictScore(x.row(r)), forest.PredictScore(x.row(r)));
  }
}

TEST(Forest, SameSeedSameModel) {
  Matrix x;
  std::vector<int> y;
  Blobs(80, 6, &x, &y);
  Params p = {{"n_trees", 15}};
  EXPECT_EQ(ModelJson(TrainForest(x, y, p, 3)), ModelJson(TrainForest(x, y, p, 3)));
  EXPECT_NE(ModelJson(TrainForest(x, y, p, 3)), ModelJson(TrainForest(x, y, p, 4)));
}

TEST(Forest, InvariantUnderMonotoneTransform) {
  Matrix x;
  std::vector<int> y;
  Blobs(60, 8, &x, &y);
  Matrix t = x;
  for (size_t r = 0; r < t.rows(); ++r) {
    for (size_t c = 0; c < t.cols(); ++c) t.at(r, c) = std::exp(t.at(r, c));
  }
  // Without bootstrap every tree partitions the full training set, so only
  // the order of values matters.
  Params p = {{"n_trees", 10}, {"bootstrap", 0}};
  Model a = TrainForest(x, y, p, 2);
  Model b = TrainForest(t, y, p, 2);
  EXPECT_EQ(a.PredictAll(x), b.PredictAll(t));
}

TEST(Boosting, ZeroRoundsIsPrior) {
  Matrix x = Rows({{0}, {1}, {2}, {3}});
  std::vector<int> y = {0, 1, 1, 1};
  Model m = TrainBoosting(x, y, {{"n_rounds", 0}});
  for (size_t r = 0; r < 4; ++r) EXPECT_NEAR(m.PredictScore(x.row(r)), 0.75, 1e-12);
}

TEST(Boosting, TrainingLossNonIncreasing) {
  Matrix x;
  std::vector<int> y;
  Blobs(120, 10, &x, &y);
  Model m = TrainBoosting(x, y, {{"n_rounds", 100}});
  const auto& loss = std::get<BoostingState>(m.state).train_loss;
  ASSERT_EQ(loss.size(), 101u);
  for (size_t i = 1; i < loss.size(); ++i) EXPECT_LE(loss[i], loss[i - 1] + 1e-12);
}

TEST(Boosting, SeparableInTenRounds) {
  Matrix x = Rows({{0}, {1}, {2}, {10}, {11}, {12}});
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  Model m = TrainBoosting(x, y, {{"n_rounds", 10}});
  EXPECT_EQ(TrainAccuracy(m, x, y), 1.0);
}

TEST(Boosting, SingleClassIsConstant) {
  Matrix x = Rows({{0}, {1}});
  std::vector<int> y = {1, 1};
  Model m = TrainBoosting(x, y, {});
  EXPECT_FALSE(m.warnings.empty());
  EXPECT_EQ(m.PredictScore(x.row(0)), 1.0);
}

TEST(Logistic, ZeroEpochsIsHalf) {
  Matrix x;
  std::vector<int> y;
  Blobs(20, 1, &x, &y);
  Model m = TrainLogistic(x, y, {{"epochs", 0}});
  for (size_t r = 0; r < x.rows(); ++r) EXPECT_EQ(m.PredictScore(x.row(r)), 0.5);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  Matrix x;
  std::vector<int> y;
  Blobs(40, 12, &x, &y);
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> w = {rng.Normal(), rng.Normal(), rng.Normal()};
    double b = rng.Normal();
    double l2 = 0.01;
    auto g = LogisticGradient(x, y, w, b, l2);
    const double h = 1e-6;
    for (size_t j = 0; j <= w.size(); ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < w.size()) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      double fd = (LogisticObjective(x, y, wp, bp, l2) -
                   LogisticObjective(x, y, wm, bm, l2)) / (2 * h);
      EXPECT_NEAR(g[j], fd, 1e-5);
    }
  }
}

TEST(Logistic, LearnsBlobs) {
  Matrix x;
  std::vector<int> y;
  Blobs(200, 14, &x, &y);
  EXPECT_GT(TrainAccuracy(TrainLogistic(x, y, {}), x, y), 0.9);
}

TEST(OneVsRest, OneHotAndPrediction) {
  std::vector<std::string> tasks = {"b", "a", "c", "a"};
  OneHot oh = OneHotEncode(tasks);
  EXPECT_EQ(oh.labels, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(oh.rows[0], (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(oh.rows[3], (std::vector<int>{1, 0, 0}));

  Matrix x;
  std::vector<std::string> t;
  for (int i = 0; i < 30; ++i) {
    x.AppendRow(std::vector<double>{static_cast<double>(i % 3), 0.5});
    t.push_back(std::string(1, static_cast<char>('a' + i % 3)));
  }
  OneVsRestModel m = TrainOneVsRest(x, t, {LearnerKind::kTree, {}}, 1);
  EXPECT_EQ(m.members.size(), 3u);
  EXPECT_EQ(m.Predict(x.row(1)), (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(Evaluate(m, x, t).f1_micro, 1.0);
}

TEST(ModelJson, RoundTripsEveryLearner) {
  Matrix x;
  std::vector<int> y;
  Blobs(50, 15, &x, &y);
  for (LearnerKind kind : {LearnerKind::kTree, LearnerKind::kForest,
                           LearnerKind::kBoosting, LearnerKind::kLogistic}) {
    Params p;
    if (kind == LearnerKind::kForest) p = {{"n_trees", 5}};
    if (kind == LearnerKind::kBoosting) p = {{"n_rounds", 5}};
    if (kind == LearnerKind::kLogistic) p = {{"epochs", 20}};
    Model m = Fit({kind, p}, x, y, 4);
    std::string json = ModelJson(m);
    Model back = ParseModelJson(json);
    EXPECT_EQ(ModelJson(back), json) << LearnerKindName(kind);
    EXPECT_EQ(back.ScoreAll(x), m.ScoreAll(x)) << LearnerKindName(kind);
  }
  std::vector<std::string> t = {"p", "q"};
  std::vector<std::string> tasks;
  for (size_t r = 0; r < x.rows(); ++r) tasks.push_back(t[y[r]]);
  OneVsRestModel ovr = TrainOneVsRest(x, tasks, {LearnerKind::kTree, {}}, 2);
  EXPECT_EQ(OneVsRestJson(ParseOneVsRestJson(OneVsRestJson(ovr))),
            OneVsRestJson(ovr));
}

TEST(Model, WidthMismatch) {
  Model m = TrainTree(kXor, kXorY, {});
  Matrix wide = Rows({{0, 0, 0}});
  try {
    Evaluate(m, wide, std::vector<int>{0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWidthMismatch);
  }
}

TEST(Params, UnknownLearnerName) {
  EXPECT_EQ(ParseLearnerKind("boosting"), LearnerKind::kBoosting);
  EXPECT_THROW(ParseLearnerKind("svm"), Error);
  EXPECT_EQ(WithDefaults(LearnerKind::kForest, {}).at("n_trees"), 100.0);
}

}  // namespace
}  // namespace fgml

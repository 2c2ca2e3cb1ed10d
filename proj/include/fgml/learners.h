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

// Tree learners, gradient boosting, logistic regression and a one-vs-rest
// wrapper. Every learner is a pure function of (data, params, seed).
//
// Labels are class indices 0..k-1; boosting and logistic regression are
// binary only.

#ifndef FGML_LEARNERS_H_
#define FGML_LEARNERS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fgml/common.h"

namespace fgml {

enum class LearnerKind { kTree, kForest, kBoosting, kLogistic };

std::string_view LearnerKindName(LearnerKind kind);
LearnerKind ParseLearnerKind(std::string_view name);

using Params = std::map<std::string, double>;

// Fills in defaults for every parameter the learner reads:
//   tree:     max_depth=8, min_samples_split=2
//   forest:   n_trees=100, max_depth=0 (unlimited), min_samples_split=2,
//             bootstrap=1, max_features=0 (ceil(sqrt(d)); -1 means all)
//   boosting: n_rounds=100, learning_rate=0.1, max_depth=3,
//             min_samples_split=2
//   logistic: epochs=500, step=0.5, l2=1e-4
Params WithDefaults(LearnerKind kind, const Params& params);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kForest;
  Params params;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  // Class distribution (classification) or a single output (regression).
  std::vector<double> value;
  size_t samples = 0;
};

struct TreeOptions {
  int max_depth = 8;  // 0 = unlimited
  int min_samples_split = 2;
  // Features tried per split; 0 = all.
  int max_features = 0;
};

class DecisionTree {
 public:
  DecisionTree() = default;

  // CART with Gini impurity. Candidate thresholds are midpoints between
  // consecutive distinct values; ties in impurity decrease go to the lowest
  // feature index, then the lowest threshold. `rows` selects (and may repeat)
  // training rows. `rng` is required when options.max_features > 0.
  static DecisionTree FitClassifier(const Matrix& x, std::span<const int> y,
                                    int n_classes, std::span<const size_t> rows,
                                    const TreeOptions& options, Rng* rng);
  // Least-squares regression tree on `targets`.
  static DecisionTree FitRegressor(const Matrix& x,
                                   std::span<const double> targets,
                                   std::span<const size_t> rows,
                                   const TreeOptions& options, Rng* rng);

  const TreeNode& Leaf(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }
  // Weighted impurity decrease per feature (unnormalised).
  const std::vector<double>& importances() const { return importances_; }
  std::vector<double>& mutable_importances() { return importances_; }
  // Features used by at least one split.
  std::vector<int> UsedFeatures() const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<double> importances_;
};

struct TreeState {
  DecisionTree tree;
};

struct ForestState {
  std::vector<DecisionTree> trees;
};

struct BoostingState {
  double base_score = 0.0;  // prior log-odds
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;
  // Constant probability when the training data held a single class.
  std::optional<double> constant_probability;
  // Mean log-loss before the first round and after every round.
  std::vector<double> train_loss;
};

struct LogisticState {
  std::vector<double> weights;
  double bias = 0.0;
};

class Model {
 public:
  LearnerKind kind = LearnerKind::kTree;
  Params params;
  uint64_t seed = 0;
  std::vector<std::string> feature_names;
  int n_classes = 2;
  std::variant<TreeState, ForestState, BoostingState, LogisticState> state;
  std::vector<std::string> warnings;

  // Class probabilities (size n_classes). Rejects rows of the wrong width.
  std::vector<double> PredictProba(std::span<const double> row) const;
  // Probability of class 1 for binary models.
  double PredictScore(std::span<const double> row) const;
  int Predict(std::span<const double> row) const;
  std::vector<int> PredictAll(const Matrix& m) const;
  std::vector<double> ScoreAll(const Matrix& m) const;

  // Per-feature impurity decrease for tree models, normalised to sum 1
  // (zeros when no split was made). Empty for logistic models.
  std::vector<double> FeatureImportances() const;

  void CheckWidth(size_t width) const;
};

// Fits the learner named by `spec`. `feature_names` may be empty, in which
// case generic names are recorded.
Model Fit(const LearnerSpec& spec, const Matrix& x, std::span<const int> y,
          uint64_t seed, std::vector<std::string> feature_names = {});

Model TrainTree(const Matrix& x, std::span<const int> y, const Params& params,
                uint64_t seed = 0);
Model TrainForest(const Matrix& x, std::span<const int> y, const Params& params,
                  uint64_t seed = 0);
Model TrainBoosting(const Matrix& x, std::span<const int> y,
                    const Params& params, uint64_t seed = 0);
Model TrainLogistic(const Matrix& x, std::span<const int> y,
                    const Params& params, uint64_t seed = 0);

// Mean log-loss plus (l2/2)*|w|^2 (bias unpenalised), and its gradient
// (weights first, bias last).
double LogisticObjective(const Matrix& x, std::span<const int> y,
                         std::span<const double> weights, double bias,
                         double l2);
std::vector<double> LogisticGradient(const Matrix& x, std::span<const int> y,
                                     std::span<const double> weights,
                                     double bias, double l2);

// One binary model per label; label i is positive for rows whose task equals
// labels[i].
class OneVsRestModel {
 public:
  std::vector<std::string> labels;
  std::vector<Model> members;
  LearnerKind base_kind = LearnerKind::kForest;
  Params base_params;
  uint64_t seed = 0;
  std::vector<std::string> feature_names;

  std::vector<double> PredictProba(std::span<const double> row) const;
  // Thresholded at 0.5 per label.
  std::vector<int> Predict(std::span<const double> row) const;
};

// Sorted distinct task names and the one-hot matrix (rows x labels).
struct OneHot {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> rows;
};
OneHot OneHotEncode(std::span<const std::string> tasks);
OneHot OneHotEncode(std::span<const std::string> tasks,
                    const std::vector<std::string>& labels);

OneVsRestModel TrainOneVsRest(const Matrix& x,
                              std::span<const std::string> tasks,
                              const LearnerSpec& base, uint64_t seed,
                              std::vector<std::string> feature_names = {});

// JSON model artifacts (version 1).
std::string ModelJson(const Model& model);
Model ParseModelJson(std::string_view text);
std::string OneVsRestJson(const OneVsRestModel& model);
OneVsRestModel ParseOneVsRestJson(std::string_view text);

}  // namespace fgml

#endif  // FGML_LEARNERS_H_

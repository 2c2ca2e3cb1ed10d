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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "json.hpp"

namespace fgml {

std::string_view LearnerKindName(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kTree: return "tree";
    case LearnerKind::kForest: return "forest";
    case LearnerKind::kBoosting: return "boosting";
    case LearnerKind::kLogistic: return "logistic";
  }
  return "unknown";
}

LearnerKind ParseLearnerKind(std::string_view name) {
  if (name == "tree") return LearnerKind::kTree;
  if (name == "forest") return LearnerKind::kForest;
  if (name == "boosting") return LearnerKind::kBoosting;
  if (name == "logistic") return LearnerKind::kLogistic;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown learner '" + std::string(name) + "'");
}

Params WithDefaults(LearnerKind kind, const Params& params) {
  Params out;
  switch (kind) {
    case LearnerKind::kTree:
      out = {{"max_depth", 8}, {"min_samples_split", 2}};
      break;
    case LearnerKind::kForest:
      out = {{"n_trees", 100},   {"max_depth", 0},    {"min_samples_split", 2},
             {"bootstrap", 1},   {"max_features", 0}};
      break;
    case LearnerKind::kBoosting:
      out = {{"n_rounds", 100},
             {"learning_rate", 0.1},
             {"max_depth", 3},
             {"min_samples_split", 2}};
      break;
    case LearnerKind::kLogistic:
      out = {{"epochs", 500}, {"step", 0.5}, {"l2", 1e-4}};
      break;
  }
  for (const auto& [key, value] : params) {
    if (!out.contains(key)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "learner " + std::string(LearnerKindName(kind)) +
                      " has no parameter '" + key + "'");
    }
    out[key] = value;
  }
  return out;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = kNegInf;
};

// Shared recursive CART builder; `Criterion` supplies impurity bookkeeping.
//
// Criterion interface:
//   Stats: additive per-sample statistics
//   void Add(Stats&, size_t row) / Remove(Stats&, size_t row)
//   double Impurity(const Stats&, size_t n)   (per-sample impurity)
//   bool IsPure(const Stats&, size_t n)
//   std::vector<double> LeafValue(const Stats&, size_t n)
template <typename Criterion>
class CartBuilder {
 public:
  using Stats = typename Criterion::Stats;

  CartBuilder(const Matrix& x, const Criterion& criterion,
              const TreeOptions& options, Rng* rng, DecisionTree* tree)
      : x_(x),
        criterion_(criterion),
        options_(options),
        rng_(rng),
        tree_(tree) {}

  void Build(std::vector<size_t> rows) {
    total_ = static_cast<double>(rows.size());
    tree_->mutable_importances().assign(x_.cols(), 0.0);
    Grow(rows, 0);
  }

 private:
  int Grow(std::vector<size_t>& rows, int depth) {
    const size_t n = rows.size();
    Stats stats = criterion_.Empty();
    for (size_t r : rows) criterion_.Add(stats, r);

    int id = static_cast<int>(tree_->mutable_nodes().size());
    tree_->mutable_nodes().push_back(TreeNode{});
    {
      TreeNode& node = tree_->mutable_nodes()[id];
      node.value = criterion_.LeafValue(stats, n);
      node.samples = n;
    }

    bool stop = criterion_.IsPure(stats, n) ||
                (options_.max_depth > 0 && depth >= options_.max_depth) ||
                static_cast<int>(n) < options_.min_samples_split || n < 2;
    if (stop) return id;

    const double parent_impurity = criterion_.Impurity(stats, n);
    SplitCandidate best = FindSplit(rows, stats, parent_impurity);
    if (best.feature < 0) return id;

    std::vector<size_t> left_rows;
    std::vector<size_t> right_rows;
    for (size_t r : rows) {
      if (x_.at(r, best.feature) <= best.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    tree_->mutable_importances()[best.feature] +=
        std::max(0.0, best.gain) / total_;
    rows.clear();
    rows.shrink_to_fit();

    int left = Grow(left_rows, depth + 1);
    int right = Grow(right_rows, depth + 1);
    TreeNode& node = tree_->mutable_nodes()[id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  std::vector<int> CandidateFeatures(const std::vector<size_t>& rows) {
    const int d = static_cast<int>(x_.cols());
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    if (options_.max_features <= 0 || options_.max_features >= d) return all;
    // Random draw over non-constant features; constant ones do not count
    // toward max_features.
    rng_->Shuffle(all);
    std::vector<int> picked;
    for (int f : all) {
      if (static_cast<int>(picked.size()) >= options_.max_features) break;
      double first = x_.at(rows[0], f);
      bool varies = false;
      for (size_t r : rows) {
        if (x_.at(r, f) != first) {
          varies = true;
          break;
        }
      }
      if (varies) picked.push_back(f);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
  }

  SplitCandidate FindSplit(const std::vector<size_t>& rows, const Stats& total,
                           double parent_impurity) {
    SplitCandidate best;
    const size_t n = rows.size();
    std::vector<std::pair<double, size_t>> order(n);
    for (int f : CandidateFeatures(rows)) {
      for (size_t i = 0; i < n; ++i) order[i] = {x_.at(rows[i], f), rows[i]};
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;
      Stats left = criterion_.Empty();
      Stats right = total;
      for (size_t i = 0; i + 1 < n; ++i) {
        criterion_.Add(left, order[i].second);
        criterion_.Remove(right, order[i].second);
        double a = order[i].first;
        double b = order[i + 1].first;
        if (a == b) continue;
        size_t nl = i + 1;
        size_t nr = n - nl;
        double gain = static_cast<double>(n) * parent_impurity -
                      static_cast<double>(nl) * criterion_.Impurity(left, nl) -
                      static_cast<double>(nr) * criterion_.Impurity(right, nr);
        if (gain > best.gain + 1e-12) {
          double mid = a + (b - a) / 2.0;
          if (mid >= b) mid = a;
          best = {f, mid, gain};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const Criterion& criterion_;
  const TreeOptions& options_;
  Rng* rng_;
  DecisionTree* tree_;
  double total_ = 1.0;
};

struct GiniCriterion {
  std::span<const int> y;
  int n_classes;

  using Stats = std::vector<double>;
  Stats Empty() const { return Stats(n_classes, 0.0); }
  void Add(Stats& s, size_t r) const { s[y[r]] += 1.0; }
  void Remove(Stats& s, size_t r) const { s[y[r]] -= 1.0; }
  double Impurity(const Stats& s, size_t n) const {
    if (n == 0) return 0.0;
    double sum_sq = 0.0;
    for (double c : s) sum_sq += c * c;
    return 1.0 - sum_sq / (static_cast<double>(n) * static_cast<double>(n));
  }
  bool IsPure(const Stats& s, size_t n) const {
    for (double c : s) {
      if (c == static_cast<double>(n)) return true;
    }
    return false;
  }
  std::vector<double> LeafValue(const Stats& s, size_t n) const {
    std::vector<double> out(s.size(), 0.0);
    if (n == 0) return out;
    for (size_t k = 0; k < s.size(); ++k) out[k] = s[k] / static_cast<double>(n);
    return out;
  }
};

struct SquaredErrorCriterion {
  std::span<const double> targets;

  struct Stats {
    double sum = 0.0;
    double sum_sq = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
  };
  Stats Empty() const { return Stats{}; }
  void Add(Stats& s, size_t r) const {
    double t = targets[r];
    s.sum += t;
    s.sum_sq += t * t;
    s.min = std::min(s.min, t);
    s.max = std::max(s.max, t);
  }
  void Remove(Stats& s, size_t r) const {
    double t = targets[r];
    s.sum -= t;
    s.sum_sq -= t * t;
  }
  double Impurity(const Stats& s, size_t n) const {
    if (n == 0) return 0.0;
    double mean = s.sum / static_cast<double>(n);
    return std::max(0.0, s.sum_sq / static_cast<double>(n) - mean * mean);
  }
  bool IsPure(const Stats& s, size_t) const { return s.min == s.max; }
  std::vector<double> LeafValue(const Stats& s, size_t n) const {
    return {n == 0 ? 0.0 : s.sum / static_cast<double>(n)};
  }
};

void CheckLabels(std::span<const int> y, int n_classes) {
  for (int label : y) {
    if (label < 0 || label >= n_classes) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(label) + " outside [0, " +
                      std::to_string(n_classes) + ")");
    }
  }
}

void CheckData(const Matrix& x, std::span<const int> y) {
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyData, "no training rows");
  if (y.size() != x.rows()) {
    throw Error(ErrorCode::kWidthMismatch,
                std::to_string(y.size()) + " labels for " +
                    std::to_string(x.rows()) + " rows");
  }
}

int ClassCount(std::span<const int> y) {
  int k = 2;
  for (int label : y) k = std::max(k, label + 1);
  return k;
}

std::vector<std::string> DefaultNames(size_t d) {
  std::vector<std::string> names;
  for (size_t i = 0; i < d; ++i) names.push_back("f" + std::to_string(i));
  return names;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double LogLoss(std::span<const int> y, std::span<const double> logits) {
  // log(1 + exp(z)) - y*z, computed stably.
  double total = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    double z = logits[i];
    double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    total += softplus - y[i] * z;
  }
  return total / static_cast<double>(y.size());
}

std::vector<double> Normalized(std::vector<double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  if (total > 0.0) {
    for (double& x : v) x /= total;
  }
  return v;
}

}  // namespace

DecisionTree DecisionTree::FitClassifier(const Matrix& x,
                                         std::span<const int> y, int n_classes,
                                         std::span<const size_t> rows,
                                         const TreeOptions& options, Rng* rng) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyData, "no training rows");
  DecisionTree tree;
  GiniCriterion criterion{y, n_classes};
  CartBuilder<GiniCriterion> builder(x, criterion, options, rng, &tree);
  builder.Build({rows.begin(), rows.end()});
  return tree;
}

DecisionTree DecisionTree::FitRegressor(const Matrix& x,
                                        std::span<const double> targets,
                                        std::span<const size_t> rows,
                                        const TreeOptions& options, Rng* rng) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyData, "no training rows");
  DecisionTree tree;
  SquaredErrorCriterion criterion{targets};
  CartBuilder<SquaredErrorCriterion> builder(x, criterion, options, rng, &tree);
  builder.Build({rows.begin(), rows.end()});
  return tree;
}

const TreeNode& DecisionTree::Leaf(std::span<const double> row) const {
  int id = 0;
  while (nodes_[id].feature >= 0) {
    const TreeNode& node = nodes_[id];
    id = row[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[id];
}

std::vector<int> DecisionTree::UsedFeatures() const {
  std::set<int> used;
  for (const auto& node : nodes_) {
    if (node.feature >= 0) used.insert(node.feature);
  }
  return {used.begin(), used.end()};
}

void Model::CheckWidth(size_t width) const {
  if (width != feature_names.size()) {
    throw Error(ErrorCode::kWidthMismatch,
                "row has " + std::to_string(width) + " features, model expects " +
                    std::to_string(feature_names.size()));
  }
}

std::vector<double> Model::PredictProba(std::span<const double> row) const {
  CheckWidth(row.size());
  if (const auto* t = std::get_if<TreeState>(&state)) {
    return t->tree.Leaf(row).value;
  }
  if (const auto* f = std::get_if<ForestState>(&state)) {
    std::vector<double> votes(n_classes, 0.0);
    for (const auto& tree : f->trees) {
      const auto& dist = tree.Leaf(row).value;
      size_t winner = static_cast<size_t>(
          std::max_element(dist.begin(), dist.end()) - dist.begin());
      votes[winner] += 1.0;
    }
    for (double& v : votes) v /= static_cast<double>(f->trees.size());
    return votes;
  }
  if (const auto* b = std::get_if<BoostingState>(&state)) {
    double p;
    if (b->constant_probability) {
      p = *b->constant_probability;
    } else {
      double z = b->base_score;
      for (const auto& tree : b->trees) {
        z += b->learning_rate * tree.Leaf(row).value[0];
      }
      p = Sigmoid(z);
    }
    return {1.0 - p, p};
  }
  const auto& l = std::get<LogisticState>(state);
  double z = l.bias;
  for (size_t i = 0; i < row.size(); ++i) z += l.weights[i] * row[i];
  double p = Sigmoid(z);
  return {1.0 - p, p};
}

double Model::PredictScore(std::span<const double> row) const {
  std::vector<double> proba = PredictProba(row);
  return proba.size() > 1 ? proba[1] : 0.0;
}

int Model::Predict(std::span<const double> row) const {
  std::vector<double> proba = PredictProba(row);
  if (n_classes == 2) return proba[1] >= 0.5 ? 1 : 0;
  return static_cast<int>(std::max_element(proba.begin(), proba.end()) -
                          proba.begin());
}

std::vector<int> Model::PredictAll(const Matrix& m) const {
  std::vector<int> out(m.rows());
  for (size_t r = 0; r < m.rows(); ++r) out[r] = Predict(m.row(r));
  return out;
}

std::vector<double> Model::ScoreAll(const Matrix& m) const {
  std::vector<double> out(m.rows());
  for (size_t r = 0; r < m.rows(); ++r) out[r] = PredictScore(m.row(r));
  return out;
}

std::vector<double> Model::FeatureImportances() const {
  const size_t d = feature_names.size();
  if (const auto* t = std::get_if<TreeState>(&state)) {
    return Normalized(t->tree.importances());
  }
  std::vector<double> total(d, 0.0);
  const std::vector<DecisionTree>* trees = nullptr;
  if (const auto* f = std::get_if<ForestState>(&state)) trees = &f->trees;
  if (const auto* b = std::get_if<BoostingState>(&state)) trees = &b->trees;
  if (!trees) return {};
  for (const auto& tree : *trees) {
    std::vector<double> imp = Normalized(tree.importances());
    for (size_t i = 0; i < d && i < imp.size(); ++i) total[i] += imp[i];
  }
  return Normalized(std::move(total));
}

Model TrainTree(const Matrix& x, std::span<const int> y, const Params& params,
                uint64_t seed) {
  CheckData(x, y);
  Model model;
  model.kind = LearnerKind::kTree;
  model.params = WithDefaults(LearnerKind::kTree, params);
  model.seed = seed;
  model.n_classes = ClassCount(y);
  model.feature_names = DefaultNames(x.cols());
  CheckLabels(y, model.n_classes);
  TreeOptions options;
  options.max_depth = static_cast<int>(model.params["max_depth"]);
  options.min_samples_split =
      static_cast<int>(model.params["min_samples_split"]);
  std::vector<size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  model.state = TreeState{DecisionTree::FitClassifier(
      x, y, model.n_classes, rows, options, nullptr)};
  return model;
}

Model TrainForest(const Matrix& x, std::span<const int> y, const Params& params,
                  uint64_t seed) {
  CheckData(x, y);
  Model model;
  model.kind = LearnerKind::kForest;
  model.params = WithDefaults(LearnerKind::kForest, params);
  model.seed = seed;
  model.n_classes = ClassCount(y);
  model.feature_names = DefaultNames(x.cols());
  CheckLabels(y, model.n_classes);

  const int n_trees = std::max(1, static_cast<int>(model.params["n_trees"]));
  const bool bootstrap = model.params["bootstrap"] != 0.0;
  TreeOptions options;
  options.max_depth = static_cast<int>(model.params["max_depth"]);
  options.min_samples_split =
      static_cast<int>(model.params["min_samples_split"]);
  int max_features = static_cast<int>(model.params["max_features"]);
  if (max_features == 0) {
    max_features = static_cast<int>(
        std::ceil(std::sqrt(static_cast<double>(x.cols()))));
  }
  options.max_features = max_features < 0 ? 0 : max_features;

  ForestState forest;
  forest.trees.reserve(n_trees);
  const size_t n = x.rows();
  std::vector<size_t> rows(n);
  for (int t = 0; t < n_trees; ++t) {
    Rng rng(DeriveSeed(seed, "tree", static_cast<uint64_t>(t)));
    if (bootstrap) {
      for (size_t i = 0; i < n; ++i) rows[i] = rng.UniformInt(n);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees.push_back(DecisionTree::FitClassifier(
        x, y, model.n_classes, rows, options, &rng));
  }
  model.state = std::move(forest);
  return model;
}

Model TrainBoosting(const Matrix& x, std::span<const int> y,
                    const Params& params, uint64_t seed) {
  CheckData(x, y);
  Model model;
  model.kind = LearnerKind::kBoosting;
  model.params = WithDefaults(LearnerKind::kBoosting, params);
  model.seed = seed;
  model.n_classes = 2;
  model.feature_names = DefaultNames(x.cols());
  CheckLabels(y, 2);

  BoostingState state;
  state.learning_rate = model.params["learning_rate"];
  const size_t n = x.rows();
  double positives = 0.0;
  for (int label : y) positives += label;
  const double prior = positives / static_cast<double>(n);
  if (positives == 0.0 || positives == static_cast<double>(n)) {
    state.constant_probability = prior;
    model.warnings.push_back(
        "SingleClass: training data has one class; emitting a constant model");
    model.state = std::move(state);
    return model;
  }
  state.base_score = std::log(prior / (1.0 - prior));

  TreeOptions options;
  options.max_depth = static_cast<int>(model.params["max_depth"]);
  options.min_samples_split =
      static_cast<int>(model.params["min_samples_split"]);
  const int rounds = static_cast<int>(model.params["n_rounds"]);

  std::vector<double> logits(n, state.base_score);
  std::vector<double> residuals(n);
  std::vector<size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  state.train_loss.push_back(LogLoss(y, logits));
  for (int round = 0; round < rounds; ++round) {
    for (size_t i = 0; i < n; ++i) residuals[i] = y[i] - Sigmoid(logits[i]);
    DecisionTree tree =
        DecisionTree::FitRegressor(x, residuals, rows, options, nullptr);
    for (size_t i = 0; i < n; ++i) {
      logits[i] += state.learning_rate * tree.Leaf(x.row(i)).value[0];
    }
    state.trees.push_back(std::move(tree));
    double loss = LogLoss(y, logits);
    if (loss > state.train_loss.back() + 1e-12) {
      model.warnings.push_back("training loss increased at round " +
                               std::to_string(round + 1));
    }
    state.train_loss.push_back(loss);
  }
  model.state = std::move(state);
  return model;
}

double LogisticObjective(const Matrix& x, std::span<const int> y,
                         std::span<const double> weights, double bias,
                         double l2) {
  std::vector<double> logits(x.rows());
  for (size_t r = 0; r < x.rows(); ++r) {
    double z = bias;
    auto row = x.row(r);
    for (size_t c = 0; c < row.size(); ++c) z += weights[c] * row[c];
    logits[r] = z;
  }
  double penalty = 0.0;
  for (double w : weights) penalty += w * w;
  return LogLoss(y, logits) + 0.5 * l2 * penalty;
}

std::vector<double> LogisticGradient(const Matrix& x, std::span<const int> y,
                                     std::span<const double> weights,
                                     double bias, double l2) {
  const size_t d = x.cols();
  std::vector<double> grad(d + 1, 0.0);
  for (size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    double z = bias;
    for (size_t c = 0; c < d; ++c) z += weights[c] * row[c];
    double err = Sigmoid(z) - y[r];
    for (size_t c = 0; c < d; ++c) grad[c] += err * row[c];
    grad[d] += err;
  }
  const double n = static_cast<double>(x.rows());
  for (double& g : grad) g /= n;
  for (size_t c = 0; c < d; ++c) grad[c] += l2 * weights[c];
  return grad;
}

Model TrainLogistic(const Matrix& x, std::span<const int> y,
                    const Params& params, uint64_t seed) {
  CheckData(x, y);
  Model model;
  model.kind = LearnerKind::kLogistic;
  model.params = WithDefaults(LearnerKind::kLogistic, params);
  model.seed = seed;
  model.n_classes = 2;
  model.feature_names = DefaultNames(x.cols());
  CheckLabels(y, 2);

  LogisticState state;
  state.weights.assign(x.cols(), 0.0);
  const int epochs = static_cast<int>(model.params["epochs"]);
  const double step = model.params["step"];
  const double l2 = model.params["l2"];
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::vector<double> grad =
        LogisticGradient(x, y, state.weights, state.bias, l2);
    for (size_t c = 0; c < state.weights.size(); ++c) {
      state.weights[c] -= step * grad[c];
    }
    state.bias -= step * grad.back();
  }
  model.state = std::move(state);
  return model;
}

Model Fit(const LearnerSpec& spec, const Matrix& x, std::span<const int> y,
          uint64_t seed, std::vector<std::string> feature_names) {
  Model model;
  switch (spec.kind) {
    case LearnerKind::kTree: model = TrainTree(x, y, spec.params, seed); break;
    case LearnerKind::kForest: model = TrainForest(x, y, spec.params, seed); break;
    case LearnerKind::kBoosting:
      model = TrainBoosting(x, y, spec.params, seed);
      break;
    case LearnerKind::kLogistic:
      model = TrainLogistic(x, y, spec.params, seed);
      break;
  }
  if (!feature_names.empty()) {
    if (feature_names.size() != x.cols()) {
      throw Error(ErrorCode::kWidthMismatch,
                  "feature name count does not match matrix width");
    }
    model.feature_names = std::move(feature_names);
  }
  return model;
}

std::vector<double> OneVsRestModel::PredictProba(
    std::span<const double> row) const {
  std::vector<double> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.PredictScore(row));
  return out;
}

std::vector<int> OneVsRestModel::Predict(std::span<const double> row) const {
  std::vector<int> out;
  for (double p : PredictProba(row)) out.push_back(p >= 0.5 ? 1 : 0);
  return out;
}

OneHot OneHotEncode(std::span<const std::string> tasks,
                    const std::vector<std::string>& labels) {
  OneHot out;
  out.labels = labels;
  for (const auto& t : tasks) {
    std::vector<int> row(labels.size(), 0);
    auto it = std::lower_bound(labels.begin(), labels.end(), t);
    if (it != labels.end() && *it == t) row[it - labels.begin()] = 1;
    out.rows.push_back(std::move(row));
  }
  return out;
}

OneHot OneHotEncode(std::span<const std::string> tasks) {
  std::set<std::string> distinct(tasks.begin(), tasks.end());
  return OneHotEncode(tasks, {distinct.begin(), distinct.end()});
}

OneVsRestModel TrainOneVsRest(const Matrix& x,
                              std::span<const std::string> tasks,
                              const LearnerSpec& base, uint64_t seed,
                              std::vector<std::string> feature_names) {
  if (x.rows() == 0) throw Error(ErrorCode::kEmptyData, "no training rows");
  OneHot onehot = OneHotEncode(tasks);
  if (onehot.labels.size() < 2) {
    throw Error(ErrorCode::kSingleClass,
                "one-vs-rest needs at least two distinct tasks");
  }
  OneVsRestModel model;
  model.labels = onehot.labels;
  model.base_kind = base.kind;
  model.base_params = WithDefaults(base.kind, base.params);
  model.seed = seed;
  model.feature_names =
      feature_names.empty() ? DefaultNames(x.cols()) : feature_names;
  for (size_t k = 0; k < onehot.labels.size(); ++k) {
    std::vector<int> y(x.rows());
    for (size_t r = 0; r < x.rows(); ++r) y[r] = onehot.rows[r][k];
    model.members.push_back(
        Fit(base, x, y, DeriveSeed(seed, "ovr", k), model.feature_names));
  }
  return model;
}

namespace {

using Json = nlohmann::ordered_json;
constexpr int kModelVersion = 1;

Json TreeToJson(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    nodes.push_back(Json{{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value},
                         {"samples", n.samples}});
  }
  return Json{{"nodes", std::move(nodes)}, {"importances", tree.importances()}};
}

DecisionTree TreeFromJson(const nlohmann::json& j) {
  DecisionTree tree;
  for (const auto& n : j.at("nodes")) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<std::vector<double>>();
    node.samples = n.at("samples").get<size_t>();
    tree.mutable_nodes().push_back(std::move(node));
  }
  tree.mutable_importances() = j.at("importances").get<std::vector<double>>();
  return tree;
}

Json ModelToJson(const Model& model) {
  Json j;
  j["version"] = kModelVersion;
  j["kind"] = std::string(LearnerKindName(model.kind));
  Json params = Json::object();
  for (const auto& [k, v] : model.params) params[k] = v;
  j["params"] = std::move(params);
  j["seed"] = model.seed;
  j["n_classes"] = model.n_classes;
  j["feature_names"] = model.feature_names;
  j["warnings"] = model.warnings;
  Json state;
  if (const auto* t = std::get_if<TreeState>(&model.state)) {
    state["tree"] = TreeToJson(t->tree);
  } else if (const auto* f = std::get_if<ForestState>(&model.state)) {
    Json trees = Json::array();
    for (const auto& tree : f->trees) trees.push_back(TreeToJson(tree));
    state["trees"] = std::move(trees);
  } else if (const auto* b = std::get_if<BoostingState>(&model.state)) {
    state["base_score"] = b->base_score;
    state["learning_rate"] = b->learning_rate;
    state["constant_probability"] =
        b->constant_probability ? Json(*b->constant_probability) : Json();
    state["train_loss"] = b->train_loss;
    Json trees = Json::array();
    for (const auto& tree : b->trees) trees.push_back(TreeToJson(tree));
    state["trees"] = std::move(trees);
  } else {
    const auto& l = std::get<LogisticState>(model.state);
    state["weights"] = l.weights;
    state["bias"] = l.bias;
  }
  j["state"] = std::move(state);
  return j;
}

Model ModelFromJson(const nlohmann::json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != kModelVersion) {
    throw Error(ErrorCode::kIoError, "unsupported model version");
  }
  Model model;
  model.kind = ParseLearnerKind(j.at("kind").get<std::string>());
  for (const auto& [k, v] : j.at("params").items()) {
    model.params[k] = v.get<double>();
  }
  model.seed = j.at("seed").get<uint64_t>();
  model.n_classes = j.at("n_classes").get<int>();
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.warnings = j.at("warnings").get<std::vector<std::string>>();
  const auto& state = j.at("state");
  switch (model.kind) {
    case LearnerKind::kTree:
      model.state = TreeState{TreeFromJson(state.at("tree"))};
      break;
    case LearnerKind::kForest: {
      ForestState f;
      for (const auto& t : state.at("trees")) f.trees.push_back(TreeFromJson(t));
      model.state = std::move(f);
      break;
    }
    case LearnerKind::kBoosting: {
      BoostingState b;
      b.base_score = state.at("base_score").get<double>();
      b.learning_rate = state.at("learning_rate").get<double>();
      if (!state.at("constant_probability").is_null()) {
        b.constant_probability = state.at("constant_probability").get<double>();
      }
      b.train_loss = state.at("train_loss").get<std::vector<double>>();
      for (const auto& t : state.at("trees")) b.trees.push_back(TreeFromJson(t));
      model.state = std::move(b);
      break;
    }
    case LearnerKind::kLogistic: {
      LogisticState l;
      l.weights = state.at("weights").get<std::vector<double>>();
      l.bias = state.at("bias").get<double>();
      model.state = std::move(l);
      break;
    }
  }
  return model;
}

template <typename F>
auto WithJsonErrors(F&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIoError, std::string("bad model JSON: ") + e.what());
  }
}

}  // namespace

std::string ModelJson(const Model& model) {
  return ModelToJson(model).dump(1) + "\n";
}

Model ParseModelJson(std::string_view text) {
  return WithJsonErrors([&] { return ModelFromJson(nlohmann::json::parse(text)); });
}

std::string OneVsRestJson(const OneVsRestModel& model) {
  Json j;
  j["version"] = kModelVersion;
  j["kind"] = "one_vs_rest";
  j["base_kind"] = std::string(LearnerKindName(model.base_kind));
  Json params = Json::object();
  for (const auto& [k, v] : model.base_params) params[k] = v;
  j["base_params"] = std::move(params);
  j["seed"] = model.seed;
  j["labels"] = model.labels;
  j["feature_names"] = model.feature_names;
  Json members = Json::array();
  for (const auto& m : model.members) members.push_back(ModelToJson(m));
  j["members"] = std::move(members);
  return j.dump(1) + "\n";
}

OneVsRestModel ParseOneVsRestJson(std::string_view text) {
  return WithJsonErrors([&] {
    auto j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != kModelVersion ||
        j.at("kind").get<std::string>() != "one_vs_rest") {
      throw Error(ErrorCode::kIoError, "not a version-1 one_vs_rest model");
    }
    OneVsRestModel model;
    model.base_kind = ParseLearnerKind(j.at("base_kind").get<std::string>());
    for (const auto& [k, v] : j.at("base_params").items()) {
      model.base_params[k] = v.get<double>();
    }
    model.seed = j.at("seed").get<uint64_t>();
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& m : j.at("members")) {
      model.members.push_back(ModelFromJson(m));
    }
    return model;
  });
}

}  // namespace fgml

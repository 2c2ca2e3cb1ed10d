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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"

namespace fgml {

namespace {

using Json = nlohmann::ordered_json;

std::map<int, std::vector<size_t>> RowsByClass(std::span<const int> labels) {
  std::map<int, std::vector<size_t>> out;
  for (size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
  return out;
}

int ClassCountOf(std::span<const int> y) {
  int n = 0;
  for (int v : y) n = std::max(n, v + 1);
  return std::max(n, 2);
}

std::vector<size_t> Complement(size_t n, std::span<const size_t> sorted) {
  std::vector<size_t> out;
  size_t j = 0;
  for (size_t i = 0; i < n; ++i) {
    if (j < sorted.size() && sorted[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<size_t> RowsInFold(std::span<const int> folds, int fold) {
  std::vector<size_t> out;
  for (size_t i = 0; i < folds.size(); ++i) {
    if (folds[i] == fold) out.push_back(i);
  }
  return out;
}

double Accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty()) return 0.0;
  size_t correct = 0;
  for (size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i];
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

Metrics ScoreModel(const Model& model, const Matrix& x, std::span<const int> y,
                   int n_classes) {
  std::vector<int> predicted = model.PredictAll(x);
  std::vector<double> scores;
  if (n_classes == 2 && model.n_classes == 2) scores = model.ScoreAll(x);
  return ClassificationMetrics(y, predicted, scores, n_classes);
}

void CheckFolds(int k) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be >= 2");
}

}  // namespace

Split StratifiedSplit(std::span<const int> labels, const SplitSpec& spec) {
  const double sum = spec.train_frac + spec.val_frac + spec.test_frac;
  if (std::abs(sum - 1.0) > 1e-9 || spec.train_frac < 0.0 ||
      spec.val_frac < 0.0 || spec.test_frac < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must sum to 1");
  }
  if (labels.empty()) throw Error(ErrorCode::kEmptyData, "nothing to split");
  std::map<int, std::vector<size_t>> groups;
  if (spec.stratified) {
    groups = RowsByClass(labels);
  } else {
    for (size_t i = 0; i < labels.size(); ++i) groups[0].push_back(i);
  }
  Rng rng(DeriveSeed(spec.seed, "split"));
  Split out;
  for (auto& [label, rows] : groups) {
    rng.Shuffle(rows);
    const double n = static_cast<double>(rows.size());
    size_t n_val = static_cast<size_t>(std::floor(n * spec.val_frac + 1e-9));
    size_t n_test = static_cast<size_t>(std::floor(n * spec.test_frac + 1e-9));
    if ((spec.val_frac > 0.0 && n_val == 0) ||
        (spec.test_frac > 0.0 && n_test == 0) ||
        (spec.train_frac > 0.0 && n_val + n_test >= rows.size())) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class " + std::to_string(label) + " has " +
                      std::to_string(rows.size()) +
                      " rows, too few for a train/val/test split");
    }
    out.val.insert(out.val.end(), rows.begin(), rows.begin() + n_val);
    out.test.insert(out.test.end(), rows.begin() + n_val,
                    rows.begin() + n_val + n_test);
    out.train.insert(out.train.end(), rows.begin() + n_val + n_test,
                     rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<int> TaskIds(std::span<const std::string> tasks) {
  std::set<std::string> distinct(tasks.begin(), tasks.end());
  std::map<std::string, int> ids;
  for (const auto& t : distinct) ids.emplace(t, static_cast<int>(ids.size()));
  std::vector<int> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(ids[t]);
  return out;
}

std::vector<int> StratifiedFolds(std::span<const int> labels, int k,
                                 uint64_t seed) {
  CheckFolds(k);
  auto groups = RowsByClass(labels);
  Rng rng(DeriveSeed(seed, "folds"));
  std::vector<size_t> order;
  for (auto& [label, rows] : groups) {
    if (rows.size() < static_cast<size_t>(k)) {
      throw Error(ErrorCode::kClassTooSmall,
                  "class " + std::to_string(label) + " has " +
                      std::to_string(rows.size()) + " rows, fewer than k=" +
                      std::to_string(k));
    }
    rng.Shuffle(rows);
    order.insert(order.end(), rows.begin(), rows.end());
  }
  std::vector<int> folds(labels.size(), 0);
  for (size_t p = 0; p < order.size(); ++p) {
    folds[order[p]] = static_cast<int>(p % static_cast<size_t>(k));
  }
  return folds;
}

MetricSummary Summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

CvSummary KFoldCv(const Matrix& x, std::span<const int> y,
                  const LearnerSpec& learner, int k, uint64_t seed, int jobs) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kWidthMismatch, "rows and labels disagree");
  }
  std::vector<int> folds = StratifiedFolds(y, k, seed);
  const int n_classes = ClassCountOf(y);
  std::vector<Metrics> val(k);
  std::vector<double> train_acc(k);
  ParallelFor(k, jobs, [&](size_t i) {
    std::vector<size_t> val_rows = RowsInFold(folds, static_cast<int>(i));
    std::vector<size_t> train_rows = Complement(x.rows(), val_rows);
    Matrix xt = x.SelectRows(train_rows);
    std::vector<int> yt = SelectValues<int>(y, train_rows);
    Model model = Fit(learner, xt, yt, DeriveSeed(seed, "fit", i));
    Matrix xv = x.SelectRows(val_rows);
    std::vector<int> yv = SelectValues<int>(y, val_rows);
    val[i] = ScoreModel(model, xv, yv, n_classes);
    train_acc[i] = Accuracy(yt, model.PredictAll(xt));
  });
  CvSummary out;
  auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& m : val) v.push_back(m.*field);
    return Summarize(v);
  };
  out.accuracy = collect(&Metrics::accuracy);
  out.precision = collect(&Metrics::precision);
  out.recall = collect(&Metrics::recall);
  out.f1 = collect(&Metrics::f1);
  out.roc_auc = collect(&Metrics::roc_auc);
  out.train_accuracy = Summarize(train_acc);
  out.folds = std::move(val);
  return out;
}

MultiLabelCvSummary KFoldCvMultiLabel(const Matrix& x,
                                      std::span<const std::string> tasks,
                                      const LearnerSpec& base, int k,
                                      uint64_t seed, int jobs) {
  if (x.rows() != tasks.size()) {
    throw Error(ErrorCode::kWidthMismatch, "rows and tasks disagree");
  }
  std::vector<int> folds = StratifiedFolds(TaskIds(tasks), k, seed);
  std::vector<MultiLabelMetrics> val(k);
  ParallelFor(k, jobs, [&](size_t i) {
    std::vector<size_t> val_rows = RowsInFold(folds, static_cast<int>(i));
    std::vector<size_t> train_rows = Complement(x.rows(), val_rows);
    OneVsRestModel model =
        TrainOneVsRest(x.SelectRows(train_rows),
                       SelectValues<std::string>(tasks, train_rows), base,
                       DeriveSeed(seed, "fit", i));
    val[i] = Evaluate(model, x.SelectRows(val_rows),
                      SelectValues<std::string>(tasks, val_rows));
  });
  MultiLabelCvSummary out;
  std::vector<double> micro, macro, subset;
  for (const auto& m : val) {
    micro.push_back(m.f1_micro);
    macro.push_back(m.f1_macro);
    subset.push_back(m.subset_accuracy);
  }
  out.f1_micro = Summarize(micro);
  out.f1_macro = Summarize(macro);
  out.subset_accuracy = Summarize(subset);
  out.folds = std::move(val);
  return out;
}

std::vector<Params> ExpandGrid(const ParamGrid& grid) {
  std::vector<Params> out = {Params{}};
  for (const auto& [name, values] : grid) {
    std::vector<Params> next;
    for (const auto& p : out) {
      for (double v : values) {
        Params q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyGrid, "parameter grid is empty");
  return out;
}

namespace {

std::vector<Params> DrawGrid(const ParamGrid& grid, int n_draws,
                             uint64_t seed) {
  if (n_draws < 1) throw Error(ErrorCode::kEmptyGrid, "n_draws must be >= 1");
  for (const auto& [name, values] : grid) {
    if (values.empty()) {
      throw Error(ErrorCode::kEmptyGrid, "no candidates for " + name);
    }
  }
  Rng rng(DeriveSeed(seed, "random_search"));
  std::vector<Params> out;
  for (int d = 0; d < n_draws; ++d) {
    Params p;
    for (const auto& [name, values] : grid) {
      p[name] = values[rng.UniformInt(values.size())];
    }
    out.push_back(std::move(p));
  }
  return out;
}

SearchResult SearchBinary(const Matrix& x, std::span<const int> y,
                          LearnerKind kind, const std::vector<Params>& points,
                          int k, uint64_t seed, int jobs) {
  SearchResult out;
  for (const auto& p : points) {
    CvSummary cv = KFoldCv(x, y, {kind, p}, k, seed, jobs);
    out.points.push_back({p, cv.accuracy.mean, cv.accuracy.std});
    out.fits += static_cast<size_t>(k);
  }
  for (size_t i = 1; i < out.points.size(); ++i) {
    if (out.points[i].score > out.points[out.best_index].score) {
      out.best_index = i;
    }
  }
  return out;
}

SearchResult SearchMultiLabel(const Matrix& x,
                              std::span<const std::string> tasks,
                              LearnerKind kind,
                              const std::vector<Params>& points, int k,
                              uint64_t seed, int jobs) {
  SearchResult out;
  for (const auto& p : points) {
    MultiLabelCvSummary cv = KFoldCvMultiLabel(x, tasks, {kind, p}, k, seed, jobs);
    out.points.push_back({p, cv.f1_micro.mean, cv.f1_micro.std});
    out.fits += static_cast<size_t>(k);
  }
  for (size_t i = 1; i < out.points.size(); ++i) {
    if (out.points[i].score > out.points[out.best_index].score) {
      out.best_index = i;
    }
  }
  return out;
}

}  // namespace

SearchResult GridSearch(const Matrix& x, std::span<const int> y,
                        LearnerKind kind, const ParamGrid& grid, int k,
                        uint64_t seed, int jobs) {
  return SearchBinary(x, y, kind, ExpandGrid(grid), k, seed, jobs);
}

SearchResult RandomSearch(const Matrix& x, std::span<const int> y,
                          LearnerKind kind, const ParamGrid& grid, int n_draws,
                          int k, uint64_t seed, int jobs) {
  return SearchBinary(x, y, kind, DrawGrid(grid, n_draws, seed), k, seed, jobs);
}

SearchResult GridSearchMultiLabel(const Matrix& x,
                                  std::span<const std::string> tasks,
                                  LearnerKind kind, const ParamGrid& grid,
                                  int k, uint64_t seed, int jobs) {
  return SearchMultiLabel(x, tasks, kind, ExpandGrid(grid), k, seed, jobs);
}

SearchResult RandomSearchMultiLabel(const Matrix& x,
                                    std::span<const std::string> tasks,
                                    LearnerKind kind, const ParamGrid& grid,
                                    int n_draws, int k, uint64_t seed,
                                    int jobs) {
  return SearchMultiLabel(x, tasks, kind, DrawGrid(grid, n_draws, seed), k,
                          seed, jobs);
}

std::vector<double> DefaultFractions() {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

std::vector<CurveRow> LearningCurve(const Matrix& x, std::span<const int> y,
                                    const LearnerSpec& learner,
                                    std::span<const double> fractions, int k,
                                    uint64_t seed, int jobs) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kWidthMismatch, "rows and labels disagree");
  }
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "fractions must lie in (0, 1], got " + FormatDecimal(f));
    }
  }
  std::vector<int> folds = StratifiedFolds(y, k, seed);
  const size_t n_classes = RowsByClass(y).size();

  // Per fold: held-out rows and one permutation of each class's training rows.
  std::vector<std::vector<size_t>> val_rows(k);
  std::vector<std::map<int, std::vector<size_t>>> perms(k);
  for (int i = 0; i < k; ++i) {
    val_rows[i] = RowsInFold(folds, i);
    std::vector<size_t> train = Complement(x.rows(), val_rows[i]);
    std::map<int, std::vector<size_t>> by_class;
    for (size_t r : train) by_class[y[r]].push_back(r);
    Rng rng(DeriveSeed(seed, "curve", static_cast<uint64_t>(i)));
    for (auto& [label, rows] : by_class) rng.Shuffle(rows);
    perms[i] = std::move(by_class);
  }

  const size_t n_f = fractions.size();
  std::vector<double> train_acc(n_f * k), val_acc(n_f * k), sizes(n_f * k);
  ParallelFor(n_f * k, jobs, [&](size_t cell) {
    const size_t fi = cell / k;
    const size_t fold = cell % k;
    const double f = fractions[fi];
    std::vector<size_t> rows;
    for (const auto& [label, perm] : perms[fold]) {
      size_t take = perm.size();
      if (f < 1.0) {
        take = std::clamp<size_t>(
            static_cast<size_t>(std::llround(f * static_cast<double>(perm.size()))),
            1, perm.size());
      }
      rows.insert(rows.end(), perm.begin(), perm.begin() + take);
    }
    std::sort(rows.begin(), rows.end());
    std::vector<int> yt = SelectValues<int>(y, rows);
    if (std::set<int>(yt.begin(), yt.end()).size() < std::max<size_t>(2, n_classes)) {
      throw Error(ErrorCode::kClassTooSmall,
                  "learning-curve subsample lacks a class at fraction " +
                      FormatDecimal(f));
    }
    Matrix xt = x.SelectRows(rows);
    Model model = Fit(learner, xt, yt, DeriveSeed(seed, "fit", fold));
    train_acc[cell] = Accuracy(yt, model.PredictAll(xt));
    std::vector<int> yv = SelectValues<int>(y, val_rows[fold]);
    val_acc[cell] = Accuracy(yv, model.PredictAll(x.SelectRows(val_rows[fold])));
    sizes[cell] = static_cast<double>(rows.size());
  });

  std::vector<CurveRow> out;
  for (size_t fi = 0; fi < n_f; ++fi) {
    std::span<const double> tr(train_acc.data() + fi * k, k);
    std::span<const double> va(val_acc.data() + fi * k, k);
    std::span<const double> sz(sizes.data() + fi * k, k);
    CurveRow row;
    row.fraction = fractions[fi];
    row.train_size = Summarize(sz).mean;
    row.train = Summarize(tr);
    row.val = Summarize(va);
    out.push_back(row);
  }
  return out;
}

std::string CurveCsv(std::span<const CurveRow> rows) {
  std::string out = "fraction,train_size,train_mean,train_std,val_mean,val_std\n";
  for (const auto& r : rows) {
    out += FormatDecimal(r.fraction) + "," + FormatDecimal(r.train_size) + "," +
           FormatDecimal(r.train.mean) + "," + FormatDecimal(r.train.std) + "," +
           FormatDecimal(r.val.mean) + "," + FormatDecimal(r.val.std) + "\n";
  }
  return out;
}

std::vector<double> DefaultSigmas() { return {0.1, 0.2, 0.5, 1.0}; }

PerturbationTable PerturbationStudy(const Matrix& train_x,
                                    std::span<const int> train_y,
                                    const Matrix& eval_x,
                                    std::span<const int> eval_y,
                                    const LearnerSpec& learner,
                                    std::span<const std::string> names,
                                    std::span<const double> sigmas,
                                    uint64_t seed, int jobs) {
  if (eval_x.cols() != train_x.cols() || names.size() != train_x.cols()) {
    throw Error(ErrorCode::kWidthMismatch, "perturbation inputs disagree");
  }
  Model model = Fit(learner, train_x, train_y, DeriveSeed(seed, "fit"));
  PerturbationTable table;
  table.features.assign(names.begin(), names.end());
  table.sigmas.push_back(0.0);
  for (double s : sigmas) {
    if (s < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative sigma");
    if (s > 0.0) table.sigmas.push_back(s);
  }
  table.baseline = Accuracy(eval_y, model.PredictAll(eval_x));
  table.accuracy.assign(names.size(),
                        std::vector<double>(table.sigmas.size(), table.baseline));
  ParallelFor(names.size(), jobs, [&](size_t c) {
    const uint64_t feature_seed = DeriveSeed(seed, "perturb", c);
    for (size_t s = 1; s < table.sigmas.size(); ++s) {
      Rng rng(DeriveSeed(feature_seed, s));
      Matrix noisy = eval_x;
      for (size_t r = 0; r < noisy.rows(); ++r) {
        noisy.at(r, c) += rng.Normal(0.0, table.sigmas[s]);
      }
      table.accuracy[c][s] = Accuracy(eval_y, model.PredictAll(noisy));
    }
  });
  return table;
}

std::string PerturbationCsv(const PerturbationTable& table) {
  std::string out = "feature";
  for (double s : table.sigmas) out += ",sigma_" + FormatDecimal(s);
  out += "\n";
  for (size_t f = 0; f < table.features.size(); ++f) {
    out += table.features[f];
    for (double a : table.accuracy[f]) out += "," + FormatDecimal(a);
    out += "\n";
  }
  return out;
}

std::vector<AblationRow> AblationStudy(const FeatureMatrix& m,
                                       std::span<const int> y,
                                       const LearnerSpec& learner, int k,
                                       uint64_t seed, int jobs) {
  const std::vector<FeatureGroup> all = {FeatureGroup::kGraph,
                                         FeatureGroup::kTemporal,
                                         FeatureGroup::kSystem};
  for (FeatureGroup g : all) {
    bool found = false;
    for (const auto& c : m.columns) found = found || c.group == g;
    if (!found) {
      throw Error(ErrorCode::kEmptyGroup, "no columns in group " +
                                              std::string(FeatureGroupName(g)));
    }
  }
  std::vector<std::pair<std::string, std::vector<FeatureGroup>>> configs;
  configs.emplace_back("all", all);
  for (FeatureGroup g : all) {
    std::vector<FeatureGroup> rest;
    for (FeatureGroup h : all) {
      if (h != g) rest.push_back(h);
    }
    configs.emplace_back("without_" + std::string(FeatureGroupName(g)), rest);
  }
  for (FeatureGroup g : all) {
    configs.emplace_back(std::string(FeatureGroupName(g)) + "_only",
                         std::vector<FeatureGroup>{g});
  }
  std::vector<AblationRow> out;
  for (const auto& [name, groups] : configs) {
    std::vector<size_t> cols;
    for (size_t c = 0; c < m.columns.size(); ++c) {
      if (std::find(groups.begin(), groups.end(), m.columns[c].group) !=
          groups.end()) {
        cols.push_back(c);
      }
    }
    AblationRow row;
    row.config = name;
    row.groups = groups;
    row.n_features = cols.size();
    row.summary = KFoldCv(m.values.SelectCols(cols), y, learner, k, seed, jobs);
    out.push_back(std::move(row));
  }
  return out;
}

std::string AblationCsv(std::span<const AblationRow> rows) {
  std::string out =
      "config,n_features,accuracy_mean,accuracy_std,f1_mean,f1_std,"
      "roc_auc_mean,roc_auc_std\n";
  for (const auto& r : rows) {
    const CvSummary& s = r.summary;
    out += r.config + "," + std::to_string(r.n_features) + "," +
           FormatDecimal(s.accuracy.mean) + "," + FormatDecimal(s.accuracy.std) +
           "," + FormatDecimal(s.f1.mean) + "," + FormatDecimal(s.f1.std) + "," +
           FormatDecimal(s.roc_auc.mean) + "," + FormatDecimal(s.roc_auc.std) +
           "\n";
  }
  return out;
}

std::vector<size_t> BalanceByResampling(std::span<const std::string> tasks,
                                        uint64_t seed, bool oversample) {
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < tasks.size(); ++i) groups[tasks[i]].push_back(i);
  if (groups.size() < 2) {
    throw Error(ErrorCode::kSingleClass, "balancing needs at least two tasks");
  }
  size_t target = oversample ? 0 : tasks.size();
  for (const auto& [task, rows] : groups) {
    target = oversample ? std::max(target, rows.size())
                        : std::min(target, rows.size());
  }
  Rng rng(DeriveSeed(seed, "balance"));
  std::vector<size_t> out;
  for (auto& [task, rows] : groups) {
    if (oversample) {
      out.insert(out.end(), rows.begin(), rows.end());
      for (size_t i = rows.size(); i < target; ++i) {
        out.push_back(rows[rng.UniformInt(rows.size())]);
      }
    } else {
      rng.Shuffle(rows);
      out.insert(out.end(), rows.begin(), rows.begin() + target);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

FeatureMatrix BalanceByResampling(const FeatureMatrix& m, uint64_t seed,
                                  bool oversample) {
  std::vector<size_t> rows = BalanceByResampling(m.tasks, seed, oversample);
  return m.SelectRows(rows);
}

std::string MatrixDigest(const FeatureMatrix& m) {
  Fnv1a h;
  for (const auto& c : m.columns) {
    h.Update(c.name);
    h.Update(std::string_view("\0", 1));
  }
  for (double v : m.values.data()) h.Update(v);
  for (int label : m.labels) h.Update(static_cast<uint64_t>(label + 1));
  for (const auto& t : m.tasks) {
    h.Update(t);
    h.Update(std::string_view("\0", 1));
  }
  return h.hex();
}

ParamGrid ParseParamGrid(std::string_view text) {
  ParamGrid grid;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "grid entry '" + std::string(item) + "' is not name=v1,v2");
    }
    std::string name(item.substr(0, eq));
    std::vector<double>& values = grid[name];
    std::string_view rest = item.substr(eq + 1);
    size_t p = 0;
    while (p <= rest.size()) {
      size_t comma = rest.find(',', p);
      if (comma == std::string_view::npos) comma = rest.size();
      std::string token(rest.substr(p, comma - p));
      p = comma + 1;
      if (token.empty()) continue;
      try {
        size_t used = 0;
        double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        values.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kInvalidArgument,
                    "grid value '" + token + "' for " + name + " is not a number");
      }
    }
  }
  return grid;
}

namespace {

ParamGrid DefaultGrid(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kTree:
      return {{"max_depth", {3, 5, 8}}};
    case LearnerKind::kForest:
      return {{"n_trees", {50, 100}}, {"max_depth", {0, 8}}};
    case LearnerKind::kBoosting:
      return {{"n_rounds", {50, 100}}, {"max_depth", {2, 3}}};
    case LearnerKind::kLogistic:
      return {{"l2", {1e-4, 1e-2}}};
  }
  return {};
}

Json ParamsToJson(const Params& p) {
  Json j = Json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

Json GridToJson(const ParamGrid& g) {
  Json j = Json::object();
  for (const auto& [k, v] : g) j[k] = v;
  return j;
}

Json SummaryToJson(const MetricSummary& s) {
  return Json{{"mean", s.mean}, {"std", s.std}};
}

Json MetricsToJson(const Metrics& m) {
  return Json{{"accuracy", m.accuracy},   {"precision", m.precision},
              {"recall", m.recall},       {"f1", m.f1},
              {"roc_auc", m.roc_auc},     {"confusion", m.confusion}};
}

Json MultiLabelToJson(const MultiLabelMetrics& m,
                      const std::vector<std::string>& labels) {
  Json per = Json::object();
  for (size_t i = 0; i < labels.size() && i < m.per_label_f1.size(); ++i) {
    per[labels[i]] = m.per_label_f1[i];
  }
  return Json{{"f1_micro", m.f1_micro},
              {"f1_macro", m.f1_macro},
              {"subset_accuracy", m.subset_accuracy},
              {"per_label_f1", per}};
}

Json CvToJson(const CvSummary& s) {
  return Json{{"accuracy", SummaryToJson(s.accuracy)},
              {"precision", SummaryToJson(s.precision)},
              {"recall", SummaryToJson(s.recall)},
              {"f1", SummaryToJson(s.f1)},
              {"roc_auc", SummaryToJson(s.roc_auc)},
              {"train_accuracy", SummaryToJson(s.train_accuracy)}};
}

Json SearchToJson(const SearchResult& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back(Json{{"params", ParamsToJson(p.params)},
                          {"score", p.score},
                          {"score_std", p.score_std}});
  }
  return Json{{"points", points},
              {"best_index", r.best_index},
              {"best_params", ParamsToJson(r.best())},
              {"fits", r.fits}};
}

Json ScoresToJson(const std::vector<ScoredFeature>& scores,
                  const std::vector<std::string>& selected) {
  std::map<std::string, const ScoredFeature*> by_name;
  for (const auto& s : scores) by_name[s.name] = &s;
  Json out = Json::array();
  for (const auto& name : selected) {
    const ScoredFeature& s = *by_name.at(name);
    out.push_back(Json{{"name", s.name},
                       {"score", s.score},
                       {"p_value", s.p_value},
                       {"p_clamped", s.p_clamped}});
  }
  return out;
}

Json SplitToJson(const SplitSpec& s) {
  return Json{{"train_frac", s.train_frac},
              {"val_frac", s.val_frac},
              {"test_frac", s.test_frac},
              {"stratified", s.stratified}};
}

std::vector<TraceSample> Subset(std::span<const TraceSample> corpus,
                                std::span<const size_t> rows) {
  std::vector<TraceSample> out;
  out.reserve(rows.size());
  for (size_t r : rows) out.push_back(corpus[r]);
  return out;
}

std::vector<size_t> Union(std::span<const size_t> a, std::span<const size_t> b) {
  std::vector<size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<size_t> IndicesOf(const FeatureMatrix& m,
                              std::span<const std::string> names) {
  std::vector<size_t> out;
  for (const auto& n : names) out.push_back(static_cast<size_t>(m.ColumnIndex(n)));
  return out;
}

}  // namespace

Experiment1Result RunExperiment1(std::span<const TraceSample> corpus,
                                 const Experiment1Config& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
  std::vector<int> labels;
  for (const auto& s : corpus) {
    if (!s.label || *s.label < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "experiment 1 needs a label on every sample");
    }
    labels.push_back(*s.label);
  }
  const uint64_t seed = config.seed;
  std::vector<std::string> warnings;
  ParamGrid grid = config.grid.empty() ? DefaultGrid(config.learner) : config.grid;

  SplitSpec split_spec = config.split;
  split_spec.seed = DeriveSeed(seed, "split");
  Split split = StratifiedSplit(labels, split_spec);

  FeatureVocabulary vocab = BuildVocabulary(Subset(corpus, split.train));
  CorpusMatrix corpus_matrix = BuildMatrix(corpus, vocab);
  const FeatureMatrix& full = corpus_matrix.matrix;
  const std::vector<std::string> all_names = full.column_names();

  Experiment1Result result;
  result.digest = MatrixDigest(full);

  FeatureMatrix train = full.SelectRows(split.train);
  std::vector<int> y_train = train.labels;
  std::vector<int> y_val = SelectValues<int>(labels, split.val);
  std::vector<int> y_test = SelectValues<int>(labels, split.test);

  // Chi-squared ranking on min-max scaled training columns.
  Matrix train_mm = ApplyScaling(train.values, MinMaxFit(train.values));
  result.scores = Chi2Scores(train_mm, all_names, y_train);
  size_t k = static_cast<size_t>(std::max(1, config.k_features));
  if (k > all_names.size()) {
    warnings.push_back("k=" + std::to_string(k) + " exceeds " +
                       std::to_string(all_names.size()) +
                       " columns; using all columns");
    k = all_names.size();
  }
  result.selected = SelectTopK(result.scores, k);
  std::vector<size_t> sel = IndicesOf(full, result.selected);

  // Z-score on the selected raw columns, fitted on train only.
  Matrix raw_sel = full.values.SelectCols(sel);
  ScalingState z = ZScoreFit(raw_sel.SelectRows(split.train));
  Matrix x_all = ApplyScaling(raw_sel, z);
  Matrix x_train = x_all.SelectRows(split.train);
  Matrix x_val = x_all.SelectRows(split.val);
  Matrix x_test = x_all.SelectRows(split.test);

  result.search = GridSearch(x_train, y_train, config.learner, grid,
                             config.folds, DeriveSeed(seed, "search"),
                             config.jobs);
  LearnerSpec best{config.learner, result.search.best()};

  // The perturbation study refits with DeriveSeed(perturb_seed, "fit"); the
  // final model uses the same seed so its clean accuracy is the baseline.
  const uint64_t perturb_seed = DeriveSeed(seed, "perturb");
  Model model = Fit(best, x_train, y_train, DeriveSeed(perturb_seed, "fit"),
                    result.selected);
  for (const auto& w : model.warnings) warnings.push_back(w);
  result.validation = Evaluate(model, x_val, y_val);
  result.test = Evaluate(model, x_test, y_test);

  std::vector<size_t> pool = Union(split.train, split.val);
  std::vector<int> y_pool = SelectValues<int>(labels, pool);
  if (config.run_curve) {
    result.curve = LearningCurve(x_all.SelectRows(pool), y_pool, best,
                                 config.fractions, config.folds,
                                 DeriveSeed(seed, "curve"), config.jobs);
  }
  if (config.run_perturbation) {
    result.perturbation =
        PerturbationStudy(x_train, y_train, x_test, y_test, best,
                          result.selected, config.sigmas, perturb_seed,
                          config.jobs);
  }
  if (config.run_ablation) {
    FeatureMatrix pool_m = ZScoreFitTransform(full.SelectRows(pool));
    result.ablation = AblationStudy(pool_m, y_pool, best, config.folds,
                                    DeriveSeed(seed, "ablation"), config.jobs);
  }

  Json j;
  j["kind"] = "experiment1";
  j["seed"] = seed;
  j["config"] = Json{{"k_features", config.k_features},
                     {"learner", LearnerKindName(config.learner)},
                     {"grid", GridToJson(grid)},
                     {"folds", config.folds},
                     {"split", SplitToJson(config.split)},
                     {"fractions", config.fractions},
                     {"sigmas", config.sigmas},
                     {"run_curve", config.run_curve},
                     {"run_perturbation", config.run_perturbation},
                     {"run_ablation", config.run_ablation}};
  j["data"] = Json{{"samples", corpus.size()},
                   {"columns", all_names.size()},
                   {"digest", result.digest},
                   {"unseen_function_rows", corpus_matrix.unseen_function_rows},
                   {"io_missing_rows", corpus_matrix.io_missing_rows},
                   {"abstime_missing_rows", corpus_matrix.abstime_missing_rows}};
  j["split"] = Json{{"train", split.train.size()},
                    {"val", split.val.size()},
                    {"test", split.test.size()}};
  j["selection"] = Json{{"method", "chi2"},
                        {"k", k},
                        {"selected", ScoresToJson(result.scores, result.selected)}};
  j["search"] = SearchToJson(result.search);
  j["validation"] = MetricsToJson(result.validation);
  j["test"] = MetricsToJson(result.test);
  if (config.run_curve) {
    Json rows = Json::array();
    for (const auto& r : result.curve) {
      rows.push_back(Json{{"fraction", r.fraction},
                          {"train_size", r.train_size},
                          {"train", SummaryToJson(r.train)},
                          {"val", SummaryToJson(r.val)}});
    }
    j["learning_curve"] = Json{{"policy", kCurvePolicy}, {"rows", rows}};
  }
  if (config.run_perturbation) {
    Json rows = Json::array();
    for (size_t f = 0; f < result.perturbation.features.size(); ++f) {
      rows.push_back(Json{{"feature", result.perturbation.features[f]},
                          {"accuracy", result.perturbation.accuracy[f]}});
    }
    j["perturbation"] = Json{{"baseline", result.perturbation.baseline},
                             {"sigmas", result.perturbation.sigmas},
                             {"rows", rows}};
  }
  if (config.run_ablation) {
    Json rows = Json::array();
    for (const auto& r : result.ablation) {
      rows.push_back(Json{{"config", r.config},
                          {"n_features", r.n_features},
                          {"cv", CvToJson(r.summary)}});
    }
    j["ablation"] = rows;
  }
  j["warnings"] = warnings;
  result.report_json = j.dump(2) + "\n";
  return result;
}

Experiment2Result RunExperiment2(std::span<const TraceSample> corpus,
                                 const Experiment2Config& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
  std::vector<std::string> all_tasks;
  for (const auto& s : corpus) {
    if (!s.task || s.task->empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "experiment 2 needs a task on every sample");
    }
    all_tasks.push_back(*s.task);
  }
  const uint64_t seed = config.seed;
  std::vector<std::string> warnings;
  ParamGrid grid = config.grid;
  if (grid.empty()) {
    grid = config.learner == LearnerKind::kForest
               ? ParamGrid{{"n_trees", {50, 100}},
                           {"max_depth", {0, 12}},
                           {"max_features", {0, -1}}}
               : DefaultGrid(config.learner);
  }

  std::vector<size_t> balanced =
      BalanceByResampling(all_tasks, DeriveSeed(seed, "balance"),
                          config.oversample);
  std::vector<TraceSample> samples = Subset(corpus, balanced);
  std::vector<std::string> tasks = SelectValues<std::string>(all_tasks, balanced);
  std::vector<int> ids = TaskIds(tasks);
  OneHot onehot = OneHotEncode(tasks);

  SplitSpec split_spec = config.split;
  split_spec.seed = DeriveSeed(seed, "split");
  Split split = StratifiedSplit(ids, split_spec);

  FeatureVocabulary vocab = BuildVocabulary(Subset(samples, split.train));
  CorpusMatrix corpus_matrix = BuildMatrix(samples, vocab);
  const FeatureMatrix& full = corpus_matrix.matrix;
  const std::vector<std::string> all_names = full.column_names();

  Experiment2Result result;
  result.digest = MatrixDigest(full);

  ScalingState z = ZScoreFit(full.values.SelectRows(split.train));
  Matrix x_all = ApplyScaling(full.values, z);
  std::vector<int> ids_train = SelectValues<int>(ids, split.train);
  result.scores = ForestImportance(x_all.SelectRows(split.train), all_names,
                                   ids_train, Params{{"n_trees", 100}},
                                   DeriveSeed(seed, "importance"));
  size_t k = static_cast<size_t>(std::max(1, config.k_features));
  if (k > all_names.size()) {
    warnings.push_back("k=" + std::to_string(k) + " exceeds " +
                       std::to_string(all_names.size()) +
                       " columns; using all columns");
    k = all_names.size();
  }
  result.selected = SelectTopK(result.scores, k);
  Matrix x_sel = x_all.SelectCols(IndicesOf(full, result.selected));
  Matrix x_train = x_sel.SelectRows(split.train);
  Matrix x_val = x_sel.SelectRows(split.val);
  Matrix x_test = x_sel.SelectRows(split.test);
  std::vector<std::string> t_train = SelectValues<std::string>(tasks, split.train);
  std::vector<std::string> t_val = SelectValues<std::string>(tasks, split.val);
  std::vector<std::string> t_test = SelectValues<std::string>(tasks, split.test);

  result.search = RandomSearchMultiLabel(x_train, t_train, config.learner, grid,
                                         config.n_draws, config.folds,
                                         DeriveSeed(seed, "search"), config.jobs);
  LearnerSpec best{config.learner, result.search.best()};
  OneVsRestModel model = TrainOneVsRest(x_train, t_train, best,
                                        DeriveSeed(seed, "final"),
                                        result.selected);
  result.validation = Evaluate(model, x_val, t_val);
  result.test = Evaluate(model, x_test, t_test);
  for (size_t i = 0; i < config.sigmas.size(); ++i) {
    Rng rng(DeriveSeed(seed, "noise", i));
    Matrix noisy = x_test;
    for (size_t r = 0; r < noisy.rows(); ++r) {
      for (size_t c = 0; c < noisy.cols(); ++c) {
        noisy.at(r, c) += rng.Normal(0.0, config.sigmas[i]);
      }
    }
    result.noise.push_back({config.sigmas[i], Evaluate(model, noisy, t_test)});
  }

  std::map<std::string, size_t> counts;
  for (const auto& t : tasks) ++counts[t];
  Json j;
  j["kind"] = "experiment2";
  j["seed"] = seed;
  j["config"] = Json{{"k_features", config.k_features},
                     {"learner", LearnerKindName(config.learner)},
                     {"grid", GridToJson(grid)},
                     {"n_draws", config.n_draws},
                     {"folds", config.folds},
                     {"split", SplitToJson(config.split)},
                     {"sigmas", config.sigmas},
                     {"oversample", config.oversample}};
  j["data"] = Json{{"samples", corpus.size()},
                   {"balanced_samples", samples.size()},
                   {"task_counts", counts},
                   {"labels", onehot.labels},
                   {"columns", all_names.size()},
                   {"digest", result.digest},
                   {"unseen_function_rows", corpus_matrix.unseen_function_rows},
                   {"io_missing_rows", corpus_matrix.io_missing_rows}};
  j["split"] = Json{{"train", split.train.size()},
                    {"val", split.val.size()},
                    {"test", split.test.size()}};
  j["selection"] = Json{{"method", "forest_importance"},
                        {"k", k},
                        {"selected", ScoresToJson(result.scores, result.selected)}};
  j["search"] = SearchToJson(result.search);
  j["validation"] = MultiLabelToJson(result.validation, model.labels);
  j["test"] = MultiLabelToJson(result.test, model.labels);
  Json noise = Json::array();
  for (const auto& n : result.noise) {
    noise.push_back(Json{{"sigma", n.sigma},
                         {"metrics", MultiLabelToJson(n.metrics, model.labels)}});
  }
  j["noise"] = noise;
  j["warnings"] = warnings;
  result.report_json = j.dump(2) + "\n";
  return result;
}

}  // namespace fgml

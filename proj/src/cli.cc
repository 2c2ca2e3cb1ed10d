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

#include "fgml/cli.h"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "fgml/call_graph.h"
#include "fgml/experiments.h"
#include "fgml/features.h"
#include "fgml/learners.h"
#include "fgml/metrics.h"
#include "fgml/selection.h"
#include "fgml/trace_parser.h"
#include "fgml/workloadgen.h"
#include "json.hpp"

namespace fgml {

int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kIoError ? kExitRuntime : kExitValidation;
}

namespace {

namespace fs = std::filesystem;

struct Common {
  int jobs = 1;
  bool strict = false;
};

ParserOptions MakeParserOptions(const Common& common) {
  ParserOptions options;
  options.strict = common.strict;
  return options;
}

Params ParseParams(LearnerKind kind, const std::vector<std::string>& items) {
  Params params;
  for (const auto& item : items) {
    size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--param expects name=value, got '" + item + "'");
    }
    std::string value = item.substr(eq + 1);
    try {
      size_t used = 0;
      params[item.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--param value '" + value + "' is not a number");
    }
  }
  WithDefaults(kind, params);  // rejects unknown names
  return params;
}

FeatureMatrix LoadMatrix(const std::string& path,
                         const std::string& vocab_path) {
  if (vocab_path.empty()) return ParseMatrixCsv(ReadFile(path));
  FeatureVocabulary vocab = ParseVocabularyJson(ReadFile(vocab_path));
  return ParseMatrixCsv(ReadFile(path), &vocab);
}

std::vector<int> RequireLabels(const FeatureMatrix& m) {
  for (int label : m.labels) {
    if (label < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "matrix has unlabeled rows; labels are required here");
    }
  }
  return m.labels;
}

FeatureMatrix RestrictColumns(const FeatureMatrix& m,
                              const std::string& columns_path) {
  if (columns_path.empty()) return m;
  std::vector<std::string> names;
  std::istringstream in(ReadFile(columns_path));
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::string name = line.substr(0, line.find(','));
    if (header && name == "name") {
      header = false;
      continue;
    }
    header = false;
    names.push_back(name);
  }
  for (const auto& n : names) {
    if (m.ColumnIndex(n) < 0) {
      throw Error(ErrorCode::kWidthMismatch,
                  "column '" + n + "' is not in the matrix");
    }
  }
  return m.SelectColumns(names);
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create directory " + dir);
}

std::string Path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string TimingJson(double seconds) {
  nlohmann::ordered_json j;
  j["wall_clock_seconds"] = seconds;
  return j.dump(2) + "\n";
}

double Elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Feature extraction and learning on ftrace function_graph traces",
               "fgml"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--jobs", common.jobs, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict", common.strict,
               "Abort on the first malformed or mis-nested line");

  std::function<void()> action;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic trace corpus");
  std::string gen_profiles = "default2";
  int gen_count = 50;
  uint64_t gen_seed = 0;
  std::string gen_out;
  int gen_cpus = 1;
  bool gen_no_abstime = false;
  bool gen_comm_pid = false;
  gen->add_option("--profiles", gen_profiles, "Profile set")
      ->check(CLI::IsMember(ProfileSetNames()));
  gen->add_option("--count", gen_count, "Traces per profile")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Corpus seed")->required();
  gen->add_option("--out", gen_out, "Corpus directory")->required();
  gen->add_option("--cpus", gen_cpus, "CPUs to spread root calls over")
      ->check(CLI::Range(1, 256));
  gen->add_flag("--no-abstime", gen_no_abstime, "Omit the absolute time column");
  gen->add_flag("--comm-pid", gen_comm_pid, "Add the task/pid column");
  gen->callback([&] {
    action = [&] {
      GeneratorOptions options;
      options.n_cpus = gen_cpus;
      options.abstime = !gen_no_abstime;
      options.comm_pid = gen_comm_pid;
      auto profiles = ProfileSet(gen_profiles);
      CorpusManifest m = GenerateCorpus(profiles, gen_count, gen_seed, gen_out,
                                        options, gen_profiles);
      out << "gen: wrote " << m.entries.size() << " traces (" << profiles.size()
          << " profiles x " << gen_count << ") to " << gen_out << "\n";
    };
  });

  // parse
  auto* parse = app.add_subcommand("parse", "Parse one trace into records");
  std::string parse_trace, parse_sidecar, parse_out, parse_edges;
  parse->add_option("--trace", parse_trace, "Trace file")
      ->required()
      ->check(CLI::ExistingFile);
  parse->add_option("--sidecar", parse_sidecar, "I/O sidecar JSON")
      ->check(CLI::ExistingFile);
  parse->add_option("--out", parse_out, "Records JSON")->required();
  parse->add_option("--edges", parse_edges, "Call-graph edge list");
  parse->callback([&] {
    action = [&] {
      TraceSample s = ParseTraceFile(parse_trace, MakeParserOptions(common));
      if (!parse_sidecar.empty()) ApplySidecar(ReadFile(parse_sidecar), s);
      WriteFile(parse_out, RecordsJson(s));
      if (!parse_edges.empty()) {
        std::ostringstream edges;
        WriteEdgeList(BuildGraph(s), edges);
        WriteFile(parse_edges, edges.str());
      }
      for (const auto& w : s.warnings) err << "warning: " << w << "\n";
      out << "parse: " << s.record_count() << " records on " << s.cpus.size()
          << " CPUs, " << s.warnings.size() << " warnings\n";
    };
  });

  // features
  auto* feat = app.add_subcommand("features", "Extract a feature matrix");
  std::string feat_corpus, feat_out, feat_vocab_out, feat_vocab_in,
      feat_scale = "none";
  feat->add_option("--corpus", feat_corpus, "Corpus directory with manifest.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  feat->add_option("--out", feat_out, "Feature CSV")->required();
  feat->add_option("--vocab-out", feat_vocab_out, "Write the vocabulary JSON");
  feat->add_option("--vocab", feat_vocab_in, "Reuse a vocabulary JSON")
      ->check(CLI::ExistingFile);
  feat->add_option("--scale", feat_scale, "none, minmax or zscore")
      ->check(CLI::IsMember({"none", "minmax", "zscore"}));
  feat->callback([&] {
    action = [&] {
      auto corpus = LoadCorpus(feat_corpus, MakeParserOptions(common));
      FeatureVocabulary vocab = feat_vocab_in.empty()
                                    ? BuildVocabulary(corpus)
                                    : ParseVocabularyJson(ReadFile(feat_vocab_in));
      CorpusMatrix cm = BuildMatrix(corpus, vocab);
      FeatureMatrix m = cm.matrix;
      if (feat_scale == "minmax") m = MinMaxFitTransform(m);
      if (feat_scale == "zscore") m = ZScoreFitTransform(m);
      WriteFile(feat_out, MatrixCsv(m));
      if (!feat_vocab_out.empty()) WriteFile(feat_vocab_out, VocabularyJson(vocab));
      out << "features: " << m.rows() << " rows x " << m.columns.size()
          << " columns (" << cm.unseen_function_rows
          << " rows with unseen functions)\n";
    };
  });

  // select
  auto* select = app.add_subcommand("select", "Rank and select feature columns");
  std::string sel_matrix, sel_vocab, sel_out, sel_method = "chi2";
  size_t sel_k = 60;
  uint64_t sel_seed = 0;
  bool sel_minmax = false;
  select->add_option("--matrix", sel_matrix, "Feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  select->add_option("--vocab", sel_vocab, "Vocabulary JSON")
      ->check(CLI::ExistingFile);
  select->add_option("--k", sel_k, "Columns to keep")->check(CLI::PositiveNumber);
  select->add_option("--method", sel_method, "chi2 or forest")
      ->check(CLI::IsMember({"chi2", "forest"}));
  select->add_option("--seed", sel_seed, "Seed for the forest method");
  select->add_flag("--minmax", sel_minmax, "Min-max scale before scoring");
  select->add_option("--out", sel_out, "Scores CSV of the selected columns")
      ->required();
  select->callback([&] {
    action = [&] {
      FeatureMatrix m = LoadMatrix(sel_matrix, sel_vocab);
      std::vector<int> y = RequireLabels(m);
      Matrix x = sel_minmax ? ApplyScaling(m.values, MinMaxFit(m.values)) : m.values;
      std::vector<std::string> names = m.column_names();
      std::vector<ScoredFeature> scores =
          sel_method == "chi2"
              ? Chi2Scores(x, names, y)
              : ForestImportance(x, names, y, Params{}, sel_seed);
      std::vector<std::string> top = SelectTopK(scores, sel_k);
      std::vector<ScoredFeature> kept;
      for (const auto& s : scores) {
        if (std::find(top.begin(), top.end(), s.name) != top.end()) kept.push_back(s);
      }
      WriteFile(sel_out, ScoresCsv(kept));
      out << "select: kept " << top.size() << " of " << names.size()
          << " columns by " << sel_method << "\n";
    };
  });

  // Learner flags shared by train/curve/perturb/ablate.
  struct LearnerFlags {
    std::string kind = "forest";
    std::vector<std::string> params;
  };
  auto add_learner = [](CLI::App* sub, LearnerFlags& f) {
    sub->add_option("--learner", f.kind, "tree, forest, boosting or logistic")
        ->check(CLI::IsMember({"tree", "forest", "boosting", "logistic"}));
    sub->add_option("--param", f.params, "Learner parameter name=value");
  };
  auto make_spec = [](const LearnerFlags& f) {
    LearnerSpec spec;
    spec.kind = ParseLearnerKind(f.kind);
    spec.params = ParseParams(spec.kind, f.params);
    return spec;
  };

  // train
  auto* train = app.add_subcommand("train", "Fit a model on a feature CSV");
  std::string train_matrix, train_vocab, train_columns, train_out,
      train_target = "label";
  uint64_t train_seed = 0;
  LearnerFlags train_learner;
  train->add_option("--matrix", train_matrix, "Feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--vocab", train_vocab, "Vocabulary JSON")
      ->check(CLI::ExistingFile);
  train->add_option("--columns", train_columns, "Scores CSV naming the columns to use")
      ->check(CLI::ExistingFile);
  train->add_option("--target", train_target, "label (binary) or task (one-vs-rest)")
      ->check(CLI::IsMember({"label", "task"}));
  train->add_option("--seed", train_seed, "Fit seed")->required();
  train->add_option("--out", train_out, "Model JSON")->required();
  add_learner(train, train_learner);
  train->callback([&] {
    action = [&] {
      FeatureMatrix m =
          RestrictColumns(LoadMatrix(train_matrix, train_vocab), train_columns);
      LearnerSpec spec = make_spec(train_learner);
      if (train_target == "task") {
        OneVsRestModel model = TrainOneVsRest(m.values, m.tasks, spec,
                                              train_seed, m.column_names());
        WriteFile(train_out, OneVsRestJson(model));
        MultiLabelMetrics fit = Evaluate(model, m.values, m.tasks);
        out << "train: one-vs-rest " << train_learner.kind << " over "
            << model.labels.size() << " tasks, train F1-micro "
            << Fixed(fit.f1_micro) << "\n";
        return;
      }
      std::vector<int> y = RequireLabels(m);
      Model model = Fit(spec, m.values, y, train_seed, m.column_names());
      for (const auto& w : model.warnings) err << "warning: " << w << "\n";
      WriteFile(train_out, ModelJson(model));
      Metrics fit = Evaluate(model, m.values, y);
      out << "train: " << train_learner.kind << " on " << m.rows() << " rows x "
          << m.columns.size() << " columns, train accuracy "
          << Fixed(fit.accuracy) << "\n";
    };
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a model on a feature CSV");
  std::string eval_model, eval_matrix, eval_vocab, eval_out;
  eval->add_option("--model", eval_model, "Model JSON")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--matrix", eval_matrix, "Feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--vocab", eval_vocab, "Vocabulary JSON")
      ->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Metrics JSON")->required();
  eval->callback([&] {
    action = [&] {
      std::string text = ReadFile(eval_model);
      FeatureMatrix m = LoadMatrix(eval_matrix, eval_vocab);
      bool ovr = false;
      try {
        ovr = nlohmann::json::parse(text).contains("members");
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kInvalidArgument,
                    std::string("model is not JSON: ") + e.what());
      }
      auto columns_for = [&](const std::vector<std::string>& names) {
        for (const auto& n : names) {
          if (m.ColumnIndex(n) < 0) {
            throw Error(ErrorCode::kWidthMismatch,
                        "model column '" + n + "' is not in the matrix");
          }
        }
        return m.SelectColumns(names);
      };
      if (ovr) {
        OneVsRestModel model = ParseOneVsRestJson(text);
        FeatureMatrix x = columns_for(model.feature_names);
        MultiLabelMetrics r = Evaluate(model, x.values, x.tasks);
        nlohmann::ordered_json j;
        j["f1_micro"] = r.f1_micro;
        j["f1_macro"] = r.f1_macro;
        j["subset_accuracy"] = r.subset_accuracy;
        j["per_label_f1"] = r.per_label_f1;
        WriteFile(eval_out, j.dump(2) + "\n");
        out << "eval: F1-micro " << Fixed(r.f1_micro) << ", F1-macro "
            << Fixed(r.f1_macro) << " on " << x.rows() << " rows\n";
        return;
      }
      Model model = ParseModelJson(text);
      FeatureMatrix x = columns_for(model.feature_names);
      Metrics r = Evaluate(model, x.values, RequireLabels(x));
      WriteFile(eval_out, MetricsJson(r));
      out << "eval: accuracy " << Fixed(r.accuracy) << ", F1 " << Fixed(r.f1)
          << ", AUC " << Fixed(r.roc_auc) << " on " << x.rows() << " rows\n";
    };
  });

  // curve
  auto* curve = app.add_subcommand("curve", "Learning curve with k-fold CV");
  std::string curve_matrix, curve_vocab, curve_columns, curve_out;
  std::vector<double> curve_fractions = DefaultFractions();
  int curve_folds = 5;
  uint64_t curve_seed = 0;
  LearnerFlags curve_learner;
  curve->add_option("--matrix", curve_matrix, "Feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  curve->add_option("--vocab", curve_vocab, "Vocabulary JSON")
      ->check(CLI::ExistingFile);
  curve->add_option("--columns", curve_columns, "Scores CSV naming the columns")
      ->check(CLI::ExistingFile);
  curve->add_option("--fractions", curve_fractions, "Training fractions")
      ->delimiter(',');
  curve->add_option("--folds", curve_folds, "Folds")->check(CLI::Range(2, 100));
  curve->add_option("--seed", curve_seed, "Seed")->required();
  curve->add_option("--out", curve_out, "Curve CSV")->required();
  add_learner(curve, curve_learner);
  curve->callback([&] {
    action = [&] {
      FeatureMatrix m =
          RestrictColumns(LoadMatrix(curve_matrix, curve_vocab), curve_columns);
      auto rows = LearningCurve(m.values, RequireLabels(m),
                                make_spec(curve_learner), curve_fractions,
                                curve_folds, curve_seed, common.jobs);
      WriteFile(curve_out, CurveCsv(rows));
      out << "curve: " << rows.size() << " fractions, val accuracy "
          << Fixed(rows.front().val.mean) << " -> " << Fixed(rows.back().val.mean)
          << "\n";
    };
  });

  // perturb
  auto* perturb = app.add_subcommand("perturb", "Per-feature Gaussian noise study");
  std::string pert_train, pert_test, pert_vocab, pert_columns, pert_out;
  std::vector<double> pert_sigmas = DefaultSigmas();
  uint64_t pert_seed = 0;
  LearnerFlags pert_learner;
  perturb->add_option("--train", pert_train, "Training feature CSV (z-scored)")
      ->required()
      ->check(CLI::ExistingFile);
  perturb->add_option("--test", pert_test, "Evaluation feature CSV (z-scored)")
      ->required()
      ->check(CLI::ExistingFile);
  perturb->add_option("--vocab", pert_vocab, "Vocabulary JSON")
      ->check(CLI::ExistingFile);
  perturb->add_option("--columns", pert_columns, "Scores CSV naming the columns")
      ->check(CLI::ExistingFile);
  perturb->add_option("--sigmas", pert_sigmas, "Noise standard deviations")
      ->delimiter(',');
  perturb->add_option("--seed", pert_seed, "Seed")->required();
  perturb->add_option("--out", pert_out, "Perturbation CSV")->required();
  add_learner(perturb, pert_learner);
  perturb->callback([&] {
    action = [&] {
      FeatureMatrix tr =
          RestrictColumns(LoadMatrix(pert_train, pert_vocab), pert_columns);
      FeatureMatrix te = LoadMatrix(pert_test, pert_vocab);
      te = te.SelectColumns(tr.column_names());
      auto table = PerturbationStudy(tr.values, RequireLabels(tr), te.values,
                                     RequireLabels(te), make_spec(pert_learner),
                                     tr.column_names(), pert_sigmas, pert_seed,
                                     common.jobs);
      WriteFile(pert_out, PerturbationCsv(table));
      out << "perturb: " << table.features.size() << " features x "
          << table.sigmas.size() << " sigmas, baseline accuracy "
          << Fixed(table.baseline) << "\n";
    };
  });

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Feature-group ablation");
  std::string abl_matrix, abl_vocab, abl_out;
  int abl_folds = 5;
  uint64_t abl_seed = 0;
  LearnerFlags abl_learner;
  ablate->add_option("--matrix", abl_matrix, "Feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  ablate->add_option("--vocab", abl_vocab, "Vocabulary JSON")
      ->check(CLI::ExistingFile);
  ablate->add_option("--folds", abl_folds, "Folds")->check(CLI::Range(2, 100));
  ablate->add_option("--seed", abl_seed, "Seed")->required();
  ablate->add_option("--out", abl_out, "Ablation CSV")->required();
  add_learner(ablate, abl_learner);
  ablate->callback([&] {
    action = [&] {
      FeatureMatrix m = LoadMatrix(abl_matrix, abl_vocab);
      auto rows = AblationStudy(m, RequireLabels(m), make_spec(abl_learner),
                                abl_folds, abl_seed, common.jobs);
      WriteFile(abl_out, AblationCsv(rows));
      out << "ablate: " << rows.size() << " configurations, all-groups accuracy "
          << Fixed(rows.front().summary.accuracy.mean) << "\n";
    };
  });

  // exp1
  auto* exp1 = app.add_subcommand("exp1", "Binary encryption-detection pipeline");
  std::string e1_corpus, e1_out, e1_learner = "boosting", e1_grid;
  Experiment1Config e1;
  exp1->add_option("--corpus", e1_corpus, "Corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  exp1->add_option("--seed", e1.seed, "Top-level seed")->required();
  exp1->add_option("--k", e1.k_features, "Chi-squared top-k")
      ->check(CLI::PositiveNumber);
  exp1->add_option("--learner", e1_learner, "forest, boosting, tree or logistic")
      ->check(CLI::IsMember({"tree", "forest", "boosting", "logistic"}));
  exp1->add_option("--grid", e1_grid, "Search grid, e.g. n_rounds=50,100;max_depth=2,3");
  exp1->add_option("--folds", e1.folds, "Folds")->check(CLI::Range(2, 100));
  exp1->add_option("--fractions", e1.fractions, "Learning-curve fractions")
      ->delimiter(',');
  exp1->add_option("--sigmas", e1.sigmas, "Perturbation sigmas")->delimiter(',');
  exp1->add_option("--out", e1_out, "Output directory")->required();
  exp1->callback([&] {
    action = [&] {
      auto start = std::chrono::steady_clock::now();
      e1.learner = ParseLearnerKind(e1_learner);
      e1.grid = ParseParamGrid(e1_grid);
      for (const auto& p : ExpandGrid(e1.grid)) WithDefaults(e1.learner, p);
      e1.jobs = common.jobs;
      auto corpus = LoadCorpus(e1_corpus, MakeParserOptions(common));
      Experiment1Result r = RunExperiment1(corpus, e1);
      EnsureDir(e1_out);
      WriteFile(Path(e1_out, "report.json"), r.report_json);
      WriteFile(Path(e1_out, "scores.csv"), ScoresCsv(r.scores));
      WriteFile(Path(e1_out, "curve.csv"), CurveCsv(r.curve));
      WriteFile(Path(e1_out, "perturbation.csv"), PerturbationCsv(r.perturbation));
      WriteFile(Path(e1_out, "ablation.csv"), AblationCsv(r.ablation));
      double secs = Elapsed(start);
      WriteFile(Path(e1_out, "timing.json"), TimingJson(secs));
      out << "exp1: test accuracy " << Fixed(r.test.accuracy) << ", AUC "
          << Fixed(r.test.roc_auc) << " with " << r.selected.size()
          << " features (" << Fixed(secs, 1) << " s)\n";
    };
  });

  // exp2
  auto* exp2 = app.add_subcommand("exp2", "Multi-label task classification pipeline");
  std::string e2_corpus, e2_out, e2_learner = "forest", e2_grid;
  Experiment2Config e2;
  exp2->add_option("--corpus", e2_corpus, "Corpus directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  exp2->add_option("--seed", e2.seed, "Top-level seed")->required();
  exp2->add_option("--k", e2.k_features, "Forest-importance top-k")
      ->check(CLI::PositiveNumber);
  exp2->add_option("--learner", e2_learner, "Base learner")
      ->check(CLI::IsMember({"tree", "forest", "boosting", "logistic"}));
  exp2->add_option("--grid", e2_grid, "Random-search grid");
  exp2->add_option("--draws", e2.n_draws, "Random-search draws")
      ->check(CLI::PositiveNumber);
  exp2->add_option("--folds", e2.folds, "Folds")->check(CLI::Range(2, 100));
  exp2->add_option("--sigmas", e2.sigmas, "Noise sigmas")->delimiter(',');
  exp2->add_flag("--oversample", e2.oversample,
                 "Balance by oversampling instead of downsampling");
  exp2->add_option("--out", e2_out, "Output directory")->required();
  exp2->callback([&] {
    action = [&] {
      auto start = std::chrono::steady_clock::now();
      e2.learner = ParseLearnerKind(e2_learner);
      e2.grid = ParseParamGrid(e2_grid);
      for (const auto& p : ExpandGrid(e2.grid)) WithDefaults(e2.learner, p);
      e2.jobs = common.jobs;
      auto corpus = LoadCorpus(e2_corpus, MakeParserOptions(common));
      Experiment2Result r = RunExperiment2(corpus, e2);
      EnsureDir(e2_out);
      WriteFile(Path(e2_out, "report.json"), r.report_json);
      WriteFile(Path(e2_out, "scores.csv"), ScoresCsv(r.scores));
      std::string noise = "sigma,f1_micro,f1_macro,subset_accuracy\n";
      for (const auto& n : r.noise) {
        noise += FormatDecimal(n.sigma) + "," + FormatDecimal(n.metrics.f1_micro) +
                 "," + FormatDecimal(n.metrics.f1_macro) + "," +
                 FormatDecimal(n.metrics.subset_accuracy) + "\n";
      }
      WriteFile(Path(e2_out, "noise.csv"), noise);
      double secs = Elapsed(start);
      WriteFile(Path(e2_out, "timing.json"), TimingJson(secs));
      out << "exp2: test F1-micro " << Fixed(r.test.f1_micro) << ", F1-macro "
          << Fixed(r.test.f1_macro) << " with " << r.selected.size()
          << " features (" << Fixed(secs, 1) << " s)\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }
  try {
    if (action) action();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace fgml

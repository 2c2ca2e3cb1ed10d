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

#include "fgml/selection.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace fgml {

namespace {

constexpr int kMaxIterations = 1000;
constexpr double kEpsilon = 1e-16;

// P(a, x) by its power series.
double GammaPSeries(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEpsilon) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the modified Lentz continued fraction.
double GammaQContinuedFraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  // exp(log-prefactor) separately keeps tiny results in the subnormal range
  // instead of flushing through an intermediate underflow.
  return std::exp(-x + a * std::log(x) - std::lgamma(a) + std::log(h));
}

}  // namespace

double RegularizedGammaQ(double a, double x) {
  if (a <= 0.0) throw Error(ErrorCode::kInvalidArgument, "gamma shape <= 0");
  if (x < 0.0) throw Error(ErrorCode::kInvalidArgument, "gamma x < 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - GammaPSeries(a, x);
  return GammaQContinuedFraction(a, x);
}

double Chi2Survival(double x, int df) {
  if (df <= 0) throw Error(ErrorCode::kInvalidArgument, "df must be positive");
  if (x <= 0.0) return 1.0;
  return RegularizedGammaQ(df / 2.0, x / 2.0);
}

std::vector<ScoredFeature> Chi2Scores(const Matrix& x,
                                      std::span<const std::string> names,
                                      std::span<const int> labels) {
  if (labels.size() != x.rows() || names.size() != x.cols()) {
    throw Error(ErrorCode::kWidthMismatch, "chi2 inputs disagree in shape");
  }
  std::map<int, size_t> class_rows;
  for (int label : labels) ++class_rows[label];
  if (class_rows.size() < 2) {
    throw Error(ErrorCode::kSingleClass, "chi2 needs at least two classes");
  }
  std::vector<int> classes;
  for (const auto& [label, count] : class_rows) classes.push_back(label);
  const int df = static_cast<int>(classes.size()) - 1;
  const double n = static_cast<double>(x.rows());

  std::vector<ScoredFeature> out;
  out.reserve(x.cols());
  for (size_t c = 0; c < x.cols(); ++c) {
    std::map<int, double> observed;
    double total = 0.0;
    for (size_t r = 0; r < x.rows(); ++r) {
      double v = x.at(r, c);
      if (v < 0.0) {
        throw Error(ErrorCode::kNegativeFeature,
                    "column " + names[c] + " has negative value " +
                        FormatDecimal(v) + " (apply min-max scaling first)");
      }
      observed[labels[r]] += v;
      total += v;
    }
    ScoredFeature sf;
    sf.name = names[c];
    if (total > 0.0) {
      double chi2 = 0.0;
      for (int label : classes) {
        double expected = static_cast<double>(class_rows[label]) / n * total;
        double diff = observed[label] - expected;
        chi2 += diff * diff / expected;
      }
      sf.score = chi2;
      sf.p_value = Chi2Survival(chi2, df);
      if (sf.p_value <= 0.0) {
        sf.p_value = std::numeric_limits<double>::denorm_min();
        sf.p_clamped = true;
      }
    }
    out.push_back(std::move(sf));
  }
  return out;
}

namespace {

void SortByScore(std::vector<ScoredFeature>& scores) {
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ScoredFeature& a, const ScoredFeature& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.name < b.name;
                   });
}

}  // namespace

std::vector<std::string> SelectTopK(std::span<const ScoredFeature> scores,
                                    size_t k) {
  if (k > scores.size()) {
    throw Error(ErrorCode::kKTooLarge,
                "k=" + std::to_string(k) + " exceeds " +
                    std::to_string(scores.size()) + " scored features");
  }
  std::vector<ScoredFeature> sorted(scores.begin(), scores.end());
  SortByScore(sorted);
  std::vector<std::string> out;
  for (size_t i = 0; i < k; ++i) out.push_back(sorted[i].name);
  return out;
}

std::vector<ScoredFeature> ForestImportance(const Matrix& x,
                                            std::span<const std::string> names,
                                            std::span<const int> labels,
                                            const Params& forest_params,
                                            uint64_t seed) {
  if (names.size() != x.cols()) {
    throw Error(ErrorCode::kWidthMismatch, "names do not match matrix width");
  }
  Model forest = TrainForest(x, labels, forest_params, seed);
  std::vector<double> importance = forest.FeatureImportances();
  std::vector<ScoredFeature> out;
  for (size_t c = 0; c < x.cols(); ++c) {
    out.push_back({names[c], importance[c], 1.0, false});
  }
  return out;
}

std::string ScoresCsv(std::vector<ScoredFeature> scores) {
  SortByScore(scores);
  std::string out = "name,score,p_value\n";
  char buf[64];
  for (const auto& s : scores) {
    out += s.name + ",";
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", s.score, s.p_value);
    out += buf;
  }
  return out;
}

}  // namespace fgml

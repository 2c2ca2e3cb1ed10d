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

#ifndef FGML_SELECTION_H_
#define FGML_SELECTION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fgml/common.h"
#include "fgml/learners.h"

namespace fgml {

struct ScoredFeature {
  std::string name;
  double score = 0.0;
  double p_value = 1.0;
  // The survival function underflowed and p_value was raised to the smallest
  // positive double.
  bool p_clamped = false;
};

// Upper regularized incomplete gamma Q(a, x): series for x < a + 1, Lentz
// continued fraction otherwise.
double RegularizedGammaQ(double a, double x);

// Chi-squared survival function P(X >= x) with `df` degrees of freedom.
double Chi2Survival(double x, int df);

// Sum-based chi-squared per column: per class c, observed_c is the column's
// value mass in class c and expected_c = (n_c / n) * column total. All cells
// must be non-negative and at least two classes must be present. Columns
// summing to 0 get score 0 and p 1.
std::vector<ScoredFeature> Chi2Scores(const Matrix& x,
                                      std::span<const std::string> names,
                                      std::span<const int> labels);

// The k highest scores, ties broken by name, sorted by descending score.
std::vector<std::string> SelectTopK(std::span<const ScoredFeature> scores,
                                    size_t k);

// Mean impurity decrease across the trees of a random forest fitted to
// (x, labels), normalised to sum 1. p_value is fixed at 1.
std::vector<ScoredFeature> ForestImportance(const Matrix& x,
                                            std::span<const std::string> names,
                                            std::span<const int> labels,
                                            const Params& forest_params,
                                            uint64_t seed);

// `name,score,p_value`, sorted by descending score (ties by name).
std::string ScoresCsv(std::vector<ScoredFeature> scores);

}  // namespace fgml

#endif  // FGML_SELECTION_H_

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

#include "fgml/common.h"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>

namespace fgml {
namespace {

TEST(DeriveSeed, DistinctTagsAndIndices) {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 100; ++i) {
    seen.insert(DeriveSeed(7, "a", i));
    seen.insert(DeriveSeed(7, "b", i));
  }
  EXPECT_EQ(seen.size(), 200u);
  EXPECT_EQ(DeriveSeed(7, "fit", 3), DeriveSeed(7, "fit", 3));
  EXPECT_NE(DeriveSeed(7, "fit"), DeriveSeed(8, "fit"));
}

TEST(Fnv1a, KnownVector) {
  Fnv1a h;
  h.Update(std::string_view("a"));
  EXPECT_EQ(h.value(), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(h.hex(), "af63dc4c8601ec8c");
}

TEST(Rng, Reproducible) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(Rng, UniformIntInRange) {
  Rng r(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    uint64_t v = r.UniformInt(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = r.Normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rng, LogNormalMedian) {
  Rng r(5);
  std::vector<double> v;
  for (int i = 0; i < 20001; ++i) v.push_back(r.LogNormal(3.0, 0.5));
  std::nth_element(v.begin(), v.begin() + 10000, v.end());
  EXPECT_NEAR(v[10000], 3.0, 0.05);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng r(9);
  std::vector<int> v = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  r.Shuffle(v);
  std::set<int> s(v.begin(), v.end());
  EXPECT_EQ(s.size(), 10u);
}

TEST(ParallelFor, CoversAllIndicesOnce) {
  std::vector<std::atomic<int>> hits(1000);
  ParallelFor(hits.size(), 4, [&](size_t i) { ++hits[i]; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsJobError) {
  EXPECT_THROW(ParallelFor(10, 3,
                           [](size_t i) {
                             if (i == 5) {
                               throw Error(ErrorCode::kEmptyData, "boom");
                             }
                           }),
               Error);
}

TEST(Matrix, SelectRowsAndCols) {
  Matrix m;
  std::vector<double> r0 = {1, 2, 3}, r1 = {4, 5, 6};
  m.AppendRow(r0);
  m.AppendRow(r1);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  std::vector<size_t> rows = {1}, cols = {2, 0};
  Matrix s = m.SelectRows(rows).SelectCols(cols);
  EXPECT_EQ(s.at(0, 0), 6);
  EXPECT_EQ(s.at(0, 1), 4);
  EXPECT_EQ(m.column(1), (std::vector<double>{2, 5}));
}

TEST(FormatDecimal, NineSignificantDigits) {
  EXPECT_EQ(FormatDecimal(0.0), "0");
  EXPECT_EQ(FormatDecimal(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(FormatDecimal(2.5), "2.5");
}

TEST(ReadFile, MissingFileIsIoError) {
  try {
    ReadFile("/nonexistent/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

}  // namespace
}  // namespace fgml

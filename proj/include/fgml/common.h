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

#ifndef FGML_COMMON_H_
#define FGML_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fgml {

enum class ErrorCode {
  kMalformedLine,
  kNestingError,
  kIoError,
  kEmptyCorpus,
  kNegativeFeature,
  kSingleClass,
  kKTooLarge,
  kEmptyData,
  kWidthMismatch,
  kClassTooSmall,
  kEmptyGrid,
  kEmptyGroup,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception type; `code()` identifies
// the failure class so callers (the CLI in particular) can map it to an exit
// status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Mixes a base seed with a tag into an independent 64-bit seed (splitmix64).
uint64_t DeriveSeed(uint64_t seed, uint64_t tag);
uint64_t DeriveSeed(uint64_t seed, std::string_view tag);
uint64_t DeriveSeed(uint64_t seed, std::string_view tag, uint64_t index);

// 64-bit FNV-1a, used for corpus and matrix digests.
class Fnv1a {
 public:
  void Update(std::string_view bytes);
  void Update(double value);
  void Update(uint64_t value);
  uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  uint64_t state_ = 0xcbf29ce484222325ULL;
};

// Seeded random source. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the distributions are implemented here because the
// standard library ones are implementation-defined and would break
// cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, n). n must be > 0.
  uint64_t UniformInt(uint64_t n);
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  // Log-normal parameterised by its median and the sigma of log(x).
  double LogNormal(double median, double sigma);
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers must make each
// job independent (own seed, own output slot) so results do not depend on the
// thread count. The first exception thrown by any job is rethrown.
void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn);

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& at(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double at(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(size_t r) {
    return std::span<double>(data_).subspan(r * cols_, cols_);
  }
  std::span<const double> row(size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::vector<double> column(size_t c) const;

  // Appends a row; the first row fixes the column count when the matrix is
  // empty and has no columns yet.
  void AppendRow(std::span<const double> values);

  Matrix SelectRows(std::span<const size_t> indices) const;
  Matrix SelectCols(std::span<const size_t> indices) const;

  const std::vector<double>& data() const { return data_; }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

template <typename T>
std::vector<T> SelectValues(std::span<const T> values,
                            std::span<const size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(values[i]);
  return out;
}

// Formats a double with up to 9 significant digits (the CSV cell format).
std::string FormatDecimal(double value);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace fgml

#endif  // FGML_COMMON_H_

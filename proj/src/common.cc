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

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace fgml {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kNestingError: return "NestingError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kNegativeFeature: return "NegativeFeature";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kWidthMismatch: return "WidthMismatch";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t HashTag(std::string_view tag) {
  Fnv1a h;
  h.Update(tag);
  return h.value();
}

}  // namespace

uint64_t DeriveSeed(uint64_t seed, uint64_t tag) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(tag + 0x632be59bd9b4e019ULL));
}

uint64_t DeriveSeed(uint64_t seed, std::string_view tag) {
  return DeriveSeed(seed, HashTag(tag));
}

uint64_t DeriveSeed(uint64_t seed, std::string_view tag, uint64_t index) {
  return DeriveSeed(DeriveSeed(seed, tag), index);
}

void Fnv1a::Update(std::string_view bytes) {
  for (unsigned char c : bytes) {
    state_ ^= c;
    state_ *= 0x100000001b3ULL;
  }
}

void Fnv1a::Update(double value) {
  uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  Update(bits);
}

void Fnv1a::Update(uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    state_ ^= (value >> (8 * i)) & 0xff;
    state_ *= 0x100000001b3ULL;
  }
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(state_));
  return buf;
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

uint64_t Rng::UniformInt(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "UniformInt(0)");
  const uint64_t threshold = (0 - n) % n;
  for (;;) {
    uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

double Rng::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is shifted away from zero so log() stays finite.
  double u1 = Uniform();
  double u2 = Uniform();
  double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

double Rng::LogNormal(double median, double sigma) {
  return median * std::exp(sigma * Normal());
}

void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  size_t thread_count = std::min<size_t>(static_cast<size_t>(jobs), n);
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> Matrix::column(size_t c) const {
  std::vector<double> out(rows_);
  for (size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

void Matrix::AppendRow(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(ErrorCode::kWidthMismatch,
                "row has " + std::to_string(values.size()) +
                    " values, matrix has " + std::to_string(cols_) +
                    " columns");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::SelectRows(std::span<const size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::SelectCols(std::span<const size_t> indices) const {
  Matrix out(rows_, indices.size());
  for (size_t r = 0; r < rows_; ++r) {
    for (size_t j = 0; j < indices.size(); ++j) {
      out.at(r, j) = at(r, indices[j]);
    }
  }
  return out;
}

std::string FormatDecimal(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

}  // namespace fgml

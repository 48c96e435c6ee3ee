// Copyright 2026 The senlda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "senlda/error.hpp"
#include "senlda/rng.hpp"

namespace senlda {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// %.17g: every double survives a text round trip bit-exactly.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// log of x (x+1) ... (x+m-1); zero for m == 0.
inline double log_rising_factorial(double x, std::size_t m) {
  if (!(x > 0.0)) throw DomainError("log_rising_factorial requires x > 0");
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += std::log(x + static_cast<double>(i));
  return acc;
}

inline double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

/// Normalized probabilities from unnormalized log weights.
inline std::vector<double> softmax(std::span<const double> log_weights) {
  const double lse = log_sum_exp(log_weights);
  std::vector<double> p(log_weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_weights[i] - lse);
  return p;
}

/// Draws an index from unnormalized log weights: shift by the max,
/// exponentiate and invert the CDF scanning from index 0.
inline std::size_t sample_categorical_log(std::span<const double> log_weights, Rng& rng,
                                          std::vector<double>& scratch) {
  if (log_weights.empty()) throw DomainError("sample_categorical_log: no weights");
  if (log_weights.size() == 1) return 0;
  double m = -std::numeric_limits<double>::infinity();
  for (double w : log_weights) {
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
      throw NumericalError("sample_categorical_log: non-finite log weight");
    m = std::max(m, w);
  }
  if (m == -std::numeric_limits<double>::infinity())
    throw NumericalError("sample_categorical_log: all weights are zero");

  scratch.resize(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    total += std::exp(log_weights[i] - m);
    scratch[i] = total;
  }
  const double u = uniform01(rng) * total;
  for (std::size_t i = 0; i + 1 < scratch.size(); ++i)
    if (u < scratch[i]) return i;
  return scratch.size() - 1;
}

inline std::size_t sample_categorical_log(std::span<const double> log_weights, Rng& rng) {
  std::vector<double> scratch;
  return sample_categorical_log(log_weights, rng, scratch);
}

}  // namespace senlda

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
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "senlda/error.hpp"
#include "senlda/rng.hpp"

// Topic distributions as features for L2-regularized hinge-loss linear
// classifiers, one per class (binary relevance), with the regularization
// strength chosen by k-fold cross-validation on micro-F1.
namespace senlda {

struct FeatureMatrix {
  std::vector<std::string> doc_ids;
  std::size_t dim = 0;
  std::vector<double> values;  // row-major, doc_ids.size() x dim

  std::size_t rows() const { return doc_ids.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }

  void push_back(std::string id, std::span<const double> row) {
    if (doc_ids.empty() && values.empty()) dim = row.size();
    if (row.size() != dim) throw DomainError("feature row has the wrong dimension");
    doc_ids.push_back(std::move(id));
    values.insert(values.end(), row.begin(), row.end());
  }

  FeatureMatrix select(std::span<const std::size_t> idx) const {
    FeatureMatrix out;
    out.dim = dim;
    for (auto i : idx) out.push_back(doc_ids[i], row(i));
    return out;
  }
};

using LabelSet = std::vector<std::string>;

inline FeatureMatrix concat_features(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.doc_ids != b.doc_ids)
    throw DocIdMismatch("feature matrices must list the same documents in the same order");
  FeatureMatrix out;
  out.dim = a.dim + b.dim;
  out.doc_ids = a.doc_ids;
  out.values.reserve(a.rows() * out.dim);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ra = a.row(i), rb = b.row(i);
    out.values.insert(out.values.end(), ra.begin(), ra.end());
    out.values.insert(out.values.end(), rb.begin(), rb.end());
  }
  return out;
}

inline constexpr std::size_t kDefaultEpochs = 50;

/// Linear decision function w.x + b.
struct BinaryModel {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(std::span<const double> x) const {
    double s = bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += weights[j] * x[j];
    return s;
  }
};

/// Pegasos-style stochastic subgradient descent on
///   lambda/2 |w|^2 + mean_i max(0, 1 - y_i (w.x_i + b)),
/// step 1/(lambda t), projection onto the ball of radius 1/sqrt(lambda), and
/// the iterates of the final epoch averaged. The bias is a regularized weight
/// on a constant feature equal to the RMS row norm, so rescaling all features
/// by c together with lambda by c^2 leaves every decision unchanged.
inline BinaryModel train_binary(const FeatureMatrix& x, std::span<const int> y, double lambda,
                                std::size_t epochs, std::uint64_t seed) {
  if (x.rows() != y.size()) throw DomainError("one label per feature row required");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be > 0");
  if (epochs < 1) throw DomainError("epochs must be >= 1");
  const bool has_pos = std::find(y.begin(), y.end(), 1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
  if (!has_pos || !has_neg) throw DegenerateLabels("binary training needs both classes");

  const std::size_t n = x.rows(), dim = x.dim;
  double sq = 0.0;
  for (double v : x.values) sq += v * v;
  double bias_feature = std::sqrt(sq / static_cast<double>(n));
  if (!(bias_feature > 0.0)) bias_feature = 1.0;

  std::vector<double> w(dim + 1, 0.0), avg(dim + 1, 0.0);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng = make_rng(seed, 0x737667);
  const double radius = 1.0 / std::sqrt(lambda);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    const bool last = epoch + 1 == epochs;
    for (std::size_t i : order) {
      ++t;
      const auto xi = x.row(i);
      double margin = w[dim] * bias_feature;
      for (std::size_t j = 0; j < dim; ++j) margin += w[j] * xi[j];
      margin *= y[i];
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double shrink = 1.0 - eta * lambda;
      for (auto& v : w) v *= shrink;
      if (margin < 1.0) {
        const double step = eta * y[i];
        for (std::size_t j = 0; j < dim; ++j) w[j] += step * xi[j];
        w[dim] += step * bias_feature;
      }
      double norm = 0.0;
      for (double v : w) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > radius) {
        const double s = radius / norm;
        for (auto& v : w) v *= s;
      }
      if (last)
        for (std::size_t j = 0; j <= dim; ++j) avg[j] += w[j];
    }
  }
  BinaryModel m;
  m.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) m.weights[j] = avg[j] / static_cast<double>(n);
  m.bias = avg[dim] / static_cast<double>(n) * bias_feature;
  return m;
}

/// One binary model per class.
struct BinaryRelevanceModel {
  std::vector<std::string> classes;
  std::vector<BinaryModel> models;
  double lambda = 0.0;

  // Classes with a positive decision; when none is positive, the single
  // class with the largest decision value.
  LabelSet predict(std::span<const double> x) const {
    LabelSet out;
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const double v = models[c].decision(x);
      if (v > 0.0) out.push_back(classes[c]);
      if (v > best_value) {
        best_value = v;
        best = c;
      }
    }
    if (out.empty() && !classes.empty()) out.push_back(classes[best]);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<LabelSet> predict(const FeatureMatrix& x) const {
    std::vector<LabelSet> out;
    for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(predict(x.row(i)));
    return out;
  }
};

inline std::vector<std::string> label_universe(std::span<const LabelSet> labels) {
  std::set<std::string> all;
  for (const auto& l : labels) all.insert(l.begin(), l.end());
  return {all.begin(), all.end()};
}

inline BinaryRelevanceModel train_binary_relevance(const FeatureMatrix& x,
                                                   std::span<const LabelSet> labels,
                                                   std::vector<std::string> classes, double lambda,
                                                   std::size_t epochs, std::uint64_t seed) {
  BinaryRelevanceModel m;
  m.classes = std::move(classes);
  m.lambda = lambda;
  std::vector<int> y(x.rows());
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    for (std::size_t i = 0; i < x.rows(); ++i)
      y[i] = std::find(labels[i].begin(), labels[i].end(), m.classes[c]) != labels[i].end() ? 1 : -1;
    try {
      m.models.push_back(train_binary(x, y, lambda, epochs, derive_seed(seed, c)));
    } catch (const DegenerateLabels&) {
      throw DegenerateLabels("class '" + m.classes[c] + "' has only one label value");
    }
  }
  return m;
}

struct F1Counts {
  std::size_t tp = 0, fp = 0, fn = 0;

  double f1() const {
    const double p = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double r = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
};

inline F1Counts count_decisions(std::span<const LabelSet> predicted, std::span<const LabelSet> gold,
                                const std::string* only_class = nullptr) {
  if (predicted.size() != gold.size()) throw DomainError("predictions and gold must align");
  F1Counts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::set<std::string> p(predicted[i].begin(), predicted[i].end());
    const std::set<std::string> g(gold[i].begin(), gold[i].end());
    for (const auto& l : p) {
      if (only_class && l != *only_class) continue;
      (g.contains(l) ? c.tp : c.fp)++;
    }
    for (const auto& l : g) {
      if (only_class && l != *only_class) continue;
      if (!p.contains(l)) ++c.fn;
    }
  }
  return c;
}

/// Micro-averaged F1 over all (document, class) decisions.
inline double f1_micro(std::span<const LabelSet> predicted, std::span<const LabelSet> gold) {
  return count_decisions(predicted, gold).f1();
}

inline std::map<std::string, double> f1_per_class(std::span<const LabelSet> predicted,
                                                  std::span<const LabelSet> gold) {
  std::set<std::string> classes;
  for (const auto& l : gold) classes.insert(l.begin(), l.end());
  for (const auto& l : predicted) classes.insert(l.begin(), l.end());
  std::map<std::string, double> out;
  for (const auto& c : classes) out[c] = count_decisions(predicted, gold, &c).f1();
  return out;
}

inline std::vector<double> default_lambda_grid() {
  return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
}

/// Fold index of every row: seeded shuffle, then contiguous blocks whose sizes
/// differ by at most one.
inline std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw DomainError("need at least 2 folds");
  if (n < folds) throw DomainError("fewer rows than folds");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng = make_rng(seed, 0x666f6c64);
  shuffle(std::span<std::size_t>(order), rng);
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos * folds / n;
  return fold;
}

struct CrossValidationResult {
  double best_lambda = 0.0;
  std::vector<std::pair<double, double>> mean_f1;  // (lambda, mean validation micro-F1)
  std::size_t skipped_folds = 0;
};

inline CrossValidationResult cross_validate_lambda(const FeatureMatrix& x,
                                                   std::span<const LabelSet> labels,
                                                   std::vector<double> grid, std::size_t folds,
                                                   std::uint64_t seed,
                                                   std::size_t epochs = kDefaultEpochs) {
  if (grid.empty()) throw DomainError("lambda grid is empty");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (double l : grid)
    if (!(l > 0.0)) throw DomainError("lambda values must be > 0");

  const auto classes = label_universe(labels);
  const auto fold_of = assign_folds(x.rows(), folds, seed);
  CrossValidationResult result;
  double best_score = -1.0;
  for (double lambda : grid) {
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> tr, va;
      for (std::size_t i = 0; i < x.rows(); ++i) (fold_of[i] == f ? va : tr).push_back(i);
      std::vector<LabelSet> ytr, yva;
      for (auto i : tr) ytr.push_back(labels[i]);
      for (auto i : va) yva.push_back(labels[i]);
      try {
        const auto model =
            train_binary_relevance(x.select(tr), ytr, classes, lambda, epochs, derive_seed(seed, f));
        total += f1_micro(model.predict(x.select(va)), yva);
        ++used;
      } catch (const DegenerateLabels&) {
        ++result.skipped_folds;
      }
    }
    const double score = used ? total / static_cast<double>(used) : -1.0;
    result.mean_f1.emplace_back(lambda, score);
    // ascending grid with >=: ties go to the larger lambda
    if (used && score >= best_score) {
      best_score = score;
      result.best_lambda = lambda;
    }
  }
  if (best_score < 0.0) throw DegenerateLabels("every cross-validation fold was degenerate");
  return result;
}

struct ClassificationReport {
  double micro_f1 = 0.0;
  std::map<std::string, double> per_class;
  double chosen_lambda = 0.0;
  std::size_t feature_dim = 0;
  std::size_t train_docs = 0;
  std::size_t test_docs = 0;
  CrossValidationResult cv;
};

struct PipelineOptions {
  std::vector<double> grid = default_lambda_grid();
  std::size_t folds = 5;
  std::size_t epochs = kDefaultEpochs;
  std::uint64_t seed = 0;
};

/// Cross-validates lambda on the training part, refits on all of it, and
/// scores the test part.
inline ClassificationReport evaluate_pipeline(const FeatureMatrix& train_x,
                                              std::span<const LabelSet> train_y,
                                              const FeatureMatrix& test_x,
                                              std::span<const LabelSet> test_y,
                                              const PipelineOptions& opts) {
  if (train_x.dim != test_x.dim && test_x.rows() > 0)
    throw DomainError("train and test features differ in dimension");
  ClassificationReport r;
  r.feature_dim = train_x.dim;
  r.train_docs = train_x.rows();
  r.test_docs = test_x.rows();
  r.cv = cross_validate_lambda(train_x, train_y, opts.grid, opts.folds, opts.seed, opts.epochs);
  r.chosen_lambda = r.cv.best_lambda;
  const auto model = train_binary_relevance(train_x, train_y, label_universe(train_y),
                                            r.chosen_lambda, opts.epochs, opts.seed);
  const auto predicted = model.predict(test_x);
  r.micro_f1 = f1_micro(predicted, test_y);
  r.per_class = f1_per_class(predicted, test_y);
  return r;
}

/// Seeded split into (train, test) row indices; test gets round(n * fraction)
/// rows, both parts sorted.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_train_test(
    std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw DomainError("test fraction must be in (0, 1)");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng = make_rng(seed, 0x73706c74);
  shuffle(std::span<std::size_t>(order), rng);
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  std::vector<std::size_t> test(order.begin(), order.begin() + n_test);
  std::vector<std::size_t> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {train, test};
}

}  // namespace senlda

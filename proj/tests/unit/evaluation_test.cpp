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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "senlda/evaluation.hpp"
#include "senlda/generator.hpp"

namespace senlda {
namespace {

Vocabulary vocab(std::size_t V) {
  std::vector<std::string> t;
  for (std::size_t w = 0; w < V; ++w) t.push_back("t" + std::to_string(w));
  return Vocabulary(t);
}

TrainedModel model_with(Matrix phi, double alpha = 0.5) {
  TrainedModel m;
  m.hyper = {phi.rows, alpha, 0.1, Granularity::sentence, 0};
  m.vocabulary = vocab(phi.cols);
  m.phi = std::move(phi);
  return m;
}

Corpus corpus_of(std::size_t V, std::vector<Document> docs) {
  return {std::move(docs), vocab(V)};
}

TEST(Perplexity, UniformModelGivesVocabularySize) {
  const std::size_t V = 7;
  const auto m = model_with(Matrix(3, V, 1.0 / V));
  const auto c = corpus_of(V, {{"a", {{0, 1, 2}, {6, 6}}, {}, 0}, {"b", {{3, 4, 5}}, {}, 0}});
  const auto r = perplexity(m, c, 10, 1);
  EXPECT_NEAR(r.perplexity, 7.0, 7.0 * 1e-9);
  EXPECT_EQ(r.total_tokens, 8u);
}

TEST(Perplexity, CertainTokensGiveOne) {
  const auto m = model_with(Matrix(2, 1, 1.0));
  const auto c = corpus_of(1, {{"a", {{0, 0}, {0}}, {}, 0}});
  EXPECT_DOUBLE_EQ(perplexity(m, c, 5, 1).perplexity, 1.0);
}

TEST(Perplexity, ClosedFormTwoTokens) {
  Matrix phi(1, 3);
  phi.data = {0.5, 0.25, 0.25};
  const std::vector<Document> docs{{"a", {{0, 1}}, {}, 0}};
  const std::vector<TopicDistribution> theta{{{1.0}}};
  EXPECT_NEAR(perplexity_from_thetas(phi, docs, theta).perplexity, std::sqrt(8.0), 1e-12);
  EXPECT_NEAR(std::sqrt(8.0), 2.8284, 1e-4);
}

TEST(Perplexity, OutOfVocabularyExcludedAndReported) {
  const std::size_t V = 4;
  const auto m = model_with(Matrix(1, V, 0.25));
  Corpus other{{{"a", {{0, 1, 2}}, {}, 0}}, Vocabulary(std::vector<std::string>{"t0", "zz", "t3"})};
  const auto r = perplexity(m, other, 5, 1);
  EXPECT_EQ(r.total_tokens, 2u);
  EXPECT_EQ(r.skipped_tokens, 1u);
  EXPECT_NEAR(r.perplexity, 4.0, 1e-12);

  Corpus all_oov{{{"b", {{0}}, {}, 0}}, Vocabulary(std::vector<std::string>{"zz"})};
  EXPECT_THROW(perplexity(m, all_oov, 5, 1), NoTokens);
}

class PerplexityProperty : public ::testing::Test {
 protected:
  void SetUp() override {
    GeneratorConfig cfg;
    cfg.D = 30;
    cfg.V = 12;
    cfg.xi_sentences = 3;
    cfg.xi_words = 4;
    const auto h = Hyperparams::defaults(3, Granularity::sentence, 4);
    corpus_ = generate_corpus(cfg, h).corpus;
    model_ = train(corpus_, h, 20).model;
  }
  Corpus corpus_;
  TrainedModel model_;
};

TEST_F(PerplexityProperty, InvariantUnderDocumentOrder) {
  const double base = perplexity(model_, corpus_, 10, 9).perplexity;
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = corpus_;
    std::shuffle(shuffled.documents.begin(), shuffled.documents.end(), rng);
    EXPECT_NEAR(perplexity(model_, shuffled, 10, 9).perplexity, base, base * 1e-12);
  }
}

TEST_F(PerplexityProperty, MixtureBetweenOracleBoundAndJensenBound) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TopicDistribution> thetas;
    for (std::size_t d = 0; d < corpus_.documents.size(); ++d) {
      std::vector<double> t(3);
      double s = 0.0;
      for (auto& v : t) s += (v = std::uniform_real_distribution<double>(0.01, 1.0)(rng));
      for (auto& v : t) v /= s;
      thetas.push_back({t});
    }
    const double mix = perplexity_from_thetas(model_.phi, corpus_.documents, thetas).perplexity;
    double best = 0.0, jensen = 0.0, n = 0.0;
    for (std::size_t d = 0; d < corpus_.documents.size(); ++d)
      for (const auto& s : corpus_.documents[d].sentences)
        for (auto w : s) {
          double mx = 0.0, avg = 0.0;
          for (std::size_t k = 0; k < 3; ++k) {
            mx = std::max(mx, model_.phi(k, w));
            avg += thetas[d].theta[k] * std::log(model_.phi(k, w));
          }
          best += std::log(mx);
          jensen += avg;
          n += 1.0;
        }
    EXPECT_GE(mix, std::exp(-best / n) * (1 - 1e-12));
    EXPECT_LE(mix, std::exp(-jensen / n) * (1 + 1e-12));
  }
}

TEST_F(PerplexityProperty, TrainingPerplexityIsFinite) {
  auto s = init_state(corpus_, model_.hyper);
  const double p = training_perplexity(s, model_.hyper);
  EXPECT_TRUE(std::isfinite(p));
  EXPECT_GT(p, 0.0);
  EXPECT_LE(p, 2.0 * 12.0);
}

DiagnosticsSeries series(std::string label, std::vector<double> perplexities) {
  DiagnosticsSeries s{std::move(label), {}};
  for (std::size_t i = 0; i < perplexities.size(); ++i) s.rows.push_back({i + 1, 0.01, perplexities[i]});
  return s;
}

TEST(PerplexityRatio, Examples) {
  const auto a = series("a", {10, 8, 7});
  for (const auto& r : perplexity_ratio(a, a)) EXPECT_DOUBLE_EQ(r.ratio, 1.0);
  const auto b = series("b", {20, 16, 14});
  for (const auto& r : perplexity_ratio(a, b)) EXPECT_DOUBLE_EQ(r.ratio, 2.0);
  EXPECT_THROW(perplexity_ratio(a, series("c", {1, 2})), IterationMismatch);
  auto shifted = b;
  shifted.rows[1].iteration = 5;
  EXPECT_THROW(perplexity_ratio(a, shifted), IterationMismatch);
}

TEST(DetectConvergence, Examples) {
  EXPECT_EQ(detect_convergence(series("c", {5, 5, 5, 5}), 1e-3, 3), 3u);
  std::vector<double> falling{100};
  for (int i = 0; i < 30; ++i) falling.push_back(falling.back() * 0.9);
  EXPECT_EQ(detect_convergence(series("f", falling), 1e-3, 3), std::nullopt);
  EXPECT_EQ(detect_convergence(series("p", {100, 90, 89.99, 89.989, 89.9889}), 1e-3, 3), 4u);
  EXPECT_THROW(detect_convergence(series("x", {1}), 1e-3, 1), DomainError);
}

TEST(DetectConvergence, IncreaseCountsAsNotDecreasing) {
  EXPECT_EQ(detect_convergence(series("u", {100, 50, 51, 52}), 1e-3, 3), 4u);
}

TEST(DetectConvergence, SkipsRowsWithoutPerplexity) {
  DiagnosticsSeries s{"s", {{1, 0, 10.0}, {2, 0, std::nullopt}, {3, 0, 10.0}, {4, 0, std::nullopt}, {5, 0, 10.0}}};
  EXPECT_EQ(detect_convergence(s, 1e-3, 3), 5u);
}

TEST(DiagnosticsCsv, HeaderAndRoundTrip) {
  std::vector<DiagnosticsSeries> all{series("sentence", {3.5, 2.25}),
                                     {"word,\"q\"", {{1, 0.5, std::nullopt}, {2, 0.25, 1.0 / 3.0}}}};
  const auto csv = diagnostics_csv(all);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,seconds,perplexity,label");
  const auto back = parse_diagnostics_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].label, "word,\"q\"");
  EXPECT_FALSE(back[1].rows[0].perplexity);
  EXPECT_EQ(*back[1].rows[1].perplexity, 1.0 / 3.0);
  EXPECT_EQ(back[0].rows.size(), 2u);
  EXPECT_THROW(parse_diagnostics_csv("nope\n"), FormatError);
}

TEST(DiagnosticsSeries, RejectsNonIncreasingIterations) {
  DiagnosticsSeries s{"x", {}};
  s.append({2, 0.0, std::nullopt});
  EXPECT_THROW(s.append({2, 0.0, std::nullopt}), DomainError);
}

TEST(RatioCsv, Format) {
  const std::vector<RatioRow> rows{{1, 1.5}, {2, 2.0}};
  EXPECT_EQ(ratio_csv(rows), "iteration,ratio\n1,1.5\n2,2\n");
}

}  // namespace
}  // namespace senlda

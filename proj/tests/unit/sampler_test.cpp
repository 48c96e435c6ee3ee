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

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "senlda/sampler.hpp"

namespace senlda {
namespace {

Corpus make_corpus(std::size_t V, const std::vector<std::vector<Sentence>>& docs) {
  Corpus c;
  std::vector<std::string> terms;
  for (std::size_t w = 0; w < V; ++w) terms.push_back("t" + std::to_string(w));
  c.vocabulary = Vocabulary(terms);
  for (std::size_t d = 0; d < docs.size(); ++d)
    c.documents.push_back({"d" + std::to_string(d), docs[d], {}, 0});
  return c;
}

// Bare state with hand-set topic-term counts and no documents.
SamplerState counts_only_state(std::size_t K, std::size_t V, std::vector<std::int64_t> topic_term) {
  SamplerState s;
  s.K = K;
  s.V = V;
  s.topic_term = std::move(topic_term);
  s.topic_total.assign(K, 0);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t w = 0; w < V; ++w) s.topic_total[k] += s.topic_term[k * V + w];
  return s;
}

Hyperparams hyper(std::size_t K, double alpha, double beta, Granularity g = Granularity::sentence,
                  std::uint64_t seed = 0) {
  return {K, alpha, beta, g, seed};
}

TEST(LogSegmentFactor, SingleWordReducesToSmoothedRatio) {
  const auto s = counts_only_state(1, 2, {0, 0});
  EXPECT_NEAR(log_segment_factor(s, Sentence{0}, 0, 0.5), std::log(0.5 / 1.0), 1e-15);
}

TEST(LogSegmentFactor, RepeatedWordRisingFactorials) {
  const auto s = counts_only_state(1, 2, {1, 0});
  EXPECT_NEAR(log_segment_factor(s, Sentence{0, 0}, 0, 1.0), std::log((2.0 * 3.0) / (3.0 * 4.0)), 1e-15);
}

TEST(LogSegmentFactor, EmptySegment) {
  const auto s = counts_only_state(1, 2, {4, 1});
  EXPECT_EQ(log_segment_factor(s, Sentence{}, 0, 0.3), 0.0);
}

TEST(LogSegmentFactor, IncludedCountsAreSubtracted) {
  const auto excluded = counts_only_state(2, 3, {1, 0, 2, 0, 3, 1});
  const auto included = counts_only_state(2, 3, {1, 0, 2, 1, 5, 1});
  const Sentence seg{1, 0, 1};
  EXPECT_DOUBLE_EQ(log_segment_factor(included, seg, 1, 0.7, false),
                   log_segment_factor(excluded, seg, 1, 0.7, true));
  EXPECT_THROW(log_segment_factor(excluded, Sentence{1, 1, 1}, 0, 0.7, false), DomainError);
}

// Enumerates every multiset of up to 8 tokens over 3 terms against a grid of
// counts and priors and compares with the literal product.
TEST(LogSegmentFactor, LogSpaceMatchesDirectProduct) {
  const std::size_t V = 3;
  std::vector<Sentence> segments{{}};
  for (std::size_t len = 1; len <= 8; ++len)
    for (std::size_t a = 0; a <= len; ++a)
      for (std::size_t b = 0; a + b <= len; ++b) {
        Sentence s(a, 0);
        s.insert(s.end(), b, 1);
        s.insert(s.end(), len - a - b, 2);
        segments.push_back(s);
      }
  ASSERT_EQ(segments.size(), 165u);
  double worst = 0.0;
  for (double beta : {0.01, 0.5, 1.0})
    for (std::int64_t n0 : {0, 3, 8})
      for (std::int64_t n1 : {0, 1, 8})
        for (std::int64_t n2 : {0, 5, 8}) {
          const auto s = counts_only_state(1, V, {n0, n1, n2});
          for (const auto& seg : segments) {
            const double direct = oracle::direct_segment_product(seg, {n0, n1, n2}, n0 + n1 + n2, V, beta);
            const double viaLog = std::exp(log_segment_factor(s, seg, 0, beta));
            worst = std::max(worst, std::abs(viaLog - direct) / direct);
          }
        }
  EXPECT_LE(worst, 1e-10);
}

TEST(FullConditional, TinyStateMatchesJointRatio) {
  // D=1, V=3; segment 0 = {0,1} is the one resampled, segment 1 = {1,2} sits in topic 0
  const auto corpus = make_corpus(3, {{{0, 1}, {1, 2}}});
  const auto h = hyper(2, 0.5, 0.1);
  auto s = make_state(corpus, h, {1, 0});
  remove_segment(s, 0);
  const auto p = softmax(full_conditional(s, h, 0, 0));
  const auto q = oracle::conditional_by_joint(oracle::segments_of(corpus), {1, 0}, 0, 2, 3, 0.5, 0.1);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(p[k], q[k], 1e-10);
  // term 1 already sits in topic 0
  EXPECT_GT(p[0], p[1]);
}

TEST(FullConditional, SymmetricCountsGiveEqualWeights) {
  // once segment 0 is removed, each topic holds one copy of the same bag
  const auto corpus = make_corpus(2, {{{0, 1}, {0, 1}, {0, 1}}});
  const auto h = hyper(2, 0.3, 0.2);
  auto s = make_state(corpus, h, {0, 0, 1});
  remove_segment(s, 0);
  const auto w = full_conditional(s, h, 0, 0);
  EXPECT_DOUBLE_EQ(w[0], w[1]);
}

TEST(FullConditional, WordGranularityIsStandardLda) {
  const auto corpus = make_corpus(3, {{{0, 1, 1}, {2}}, {{0, 2}}});
  const auto h = hyper(2, 0.4, 0.25, Granularity::word);
  auto s = make_state(corpus, h, {0, 1, 0, 1, 1, 0});
  const std::size_t seg = 1;  // token "1" of doc 0
  remove_segment(s, seg);
  const auto p = softmax(full_conditional(s, h, 0, 1));
  std::vector<double> n_dk{2, 1}, n_kw{1, 0}, n_k{3, 2};  // counts without the token
  const auto q = oracle::lda_conditional(2, 3, 0.4, 0.25, n_dk, n_kw, n_k);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(p[k], q[k], 1e-12);
}

TEST(FullConditionalProperty, OracleEquivalence) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto in = oracle::random_instance(rng);
    const auto h = hyper(in.K, in.alpha, in.beta);
    const auto docs = oracle::segments_of(in.corpus);
    std::size_t seg = 0;
    for (std::size_t d = 0; d < docs.size(); ++d)
      for (std::size_t i = 0; i < docs[d].size(); ++i, ++seg) {
        auto s = make_state(in.corpus, h, in.z);
        remove_segment(s, seg);
        const auto p = softmax(full_conditional(s, h, d, i));
        const auto q = oracle::conditional_by_joint(docs, in.z, seg, in.K, in.V, in.alpha, in.beta);
        for (std::size_t k = 0; k < in.K; ++k) worst = std::max(worst, std::abs(p[k] - q[k]));
      }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(FullConditionalProperty, LdaReduction) {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto in = oracle::random_instance(rng);
    const auto h = hyper(in.K, in.alpha, in.beta, Granularity::word);
    const auto docs = oracle::word_segments_of(in.corpus);
    std::vector<std::uint32_t> z;
    for (const auto& d : docs)
      for (std::size_t i = 0; i < d.size(); ++i) z.push_back(static_cast<std::uint32_t>(rng() % in.K));
    std::size_t seg = 0;
    for (std::size_t d = 0; d < docs.size(); ++d)
      for (std::size_t i = 0; i < docs[d].size(); ++i, ++seg) {
        auto s = make_state(in.corpus, h, z);
        remove_segment(s, seg);
        const auto p = softmax(full_conditional(s, h, d, i));
        // closed-form counts excluding token i, computed from z directly
        std::vector<double> n_dk(in.K, 0), n_kw(in.K, 0), n_k(in.K, 0);
        std::size_t g = 0;
        for (std::size_t dd = 0; dd < docs.size(); ++dd)
          for (std::size_t j = 0; j < docs[dd].size(); ++j, ++g) {
            if (g == seg) continue;
            if (dd == d) n_dk[z[g]] += 1;
            n_k[z[g]] += 1;
            if (docs[dd][j][0] == docs[d][i][0]) n_kw[z[g]] += 1;
          }
        const auto q = oracle::lda_conditional(in.K, in.V, in.alpha, in.beta, n_dk, n_kw, n_k);
        for (std::size_t k = 0; k < in.K; ++k) worst = std::max(worst, std::abs(p[k] - q[k]));
      }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(FullConditionalProperty, ExchangeableWithinSegment) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = oracle::random_instance(rng);
    const auto h = hyper(in.K, in.alpha, in.beta);
    auto permuted = in.corpus;
    for (auto& d : permuted.documents)
      for (auto& s : d.sentences) std::shuffle(s.begin(), s.end(), rng);
    auto a = make_state(in.corpus, h, in.z);
    auto b = make_state(permuted, h, in.z);
    remove_segment(a, 0);
    remove_segment(b, 0);
    const auto wa = full_conditional(a, h, 0, 0);
    const auto wb = full_conditional(b, h, 0, 0);
    for (std::size_t k = 0; k < in.K; ++k) ASSERT_DOUBLE_EQ(wa[k], wb[k]);
  }
}

TEST(LogJoint, MatchesBruteForce) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = oracle::random_instance(rng);
    const auto h = hyper(in.K, in.alpha, in.beta);
    const auto s = make_state(in.corpus, h, in.z);
    EXPECT_NEAR(log_joint(s, h),
                oracle::log_joint(oracle::segments_of(in.corpus), in.z, in.K, in.V, in.alpha, in.beta),
                1e-9);
    EXPECT_EQ(log_joint(s, h) - log_joint(s, h), 0.0);
  }
}

// Topic-term half of the collapsed joint, from the state's counts.
double topic_part(const SamplerState& s, const Hyperparams& h) {
  const double V = static_cast<double>(s.V);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.K; ++k) {
    for (std::size_t w = 0; w < s.V; ++w)
      acc += std::lgamma(static_cast<double>(s.n_topic_term(k, static_cast<TermId>(w))) + h.beta);
    acc -= std::lgamma(static_cast<double>(s.topic_total[k]) + V * h.beta);
    acc -= V * std::lgamma(h.beta) - std::lgamma(V * h.beta);
  }
  return acc;
}

TEST(LogJoint, DuplicatedCorpusDoublesDocumentTerms) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = oracle::random_instance(rng);
    const auto h = hyper(in.K, in.alpha, in.beta);
    auto doubled = in.corpus;
    for (const auto& d : in.corpus.documents) doubled.documents.push_back(d);
    auto z2 = in.z;
    z2.insert(z2.end(), in.z.begin(), in.z.end());
    const auto once = make_state(in.corpus, h, in.z);
    const auto twice = make_state(doubled, h, z2);
    EXPECT_NEAR(log_joint(twice, h),
                oracle::log_joint(oracle::segments_of(doubled), z2, in.K, in.V, in.alpha, in.beta), 1e-9);
    EXPECT_NEAR(log_joint(twice, h) - topic_part(twice, h), 2.0 * (log_joint(once, h) - topic_part(once, h)),
                1e-9);
  }
}

TEST(InitState, CountsConsistentAndSeeded) {
  const auto corpus = make_corpus(4, {{{0, 1, 2}, {3}}, {{1, 1}, {2, 3, 0}, {0}}});
  const auto h = hyper(3, 0.3, 0.1, Granularity::sentence, 42);
  const auto a = init_state(corpus, h);
  EXPECT_TRUE(counts_consistent(a));
  EXPECT_EQ(a.z.size(), 5u);
  EXPECT_EQ(init_state(corpus, h).z, a.z);
  const auto w = init_state(corpus, hyper(3, 0.3, 0.1, Granularity::word, 42));
  EXPECT_EQ(w.z.size(), corpus.num_tokens());
  EXPECT_TRUE(counts_consistent(w));
  const auto one = init_state(corpus, hyper(1, 1.0, 1.0));
  EXPECT_TRUE(std::all_of(one.z.begin(), one.z.end(), [](auto k) { return k == 0; }));
  EXPECT_EQ(a.assignments(1).size(), 3u);
}

TEST(InitState, RejectsBadHyperparams) {
  const auto corpus = make_corpus(2, {{{0, 1}}});
  EXPECT_THROW(init_state(corpus, hyper(0, 0.1, 0.1)), DomainError);
  EXPECT_THROW(init_state(corpus, hyper(2, 0.0, 0.1)), DomainError);
  EXPECT_THROW(init_state(corpus, hyper(2, 0.1, -1.0)), DomainError);
  EXPECT_THROW(init_state(Corpus{}, hyper(2, 0.1, 0.1)), DomainError);
}

TEST(GibbsSweep, KeepsCountsConsistentAndIsSeeded) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = oracle::random_instance(rng);
    for (auto g : {Granularity::sentence, Granularity::word}) {
      const auto h = hyper(in.K, in.alpha, in.beta, g, trial);
      auto a = init_state(in.corpus, h);
      auto b = init_state(in.corpus, h);
      for (int i = 0; i < 5; ++i) {
        gibbs_sweep(a, h);
        gibbs_sweep(b, h);
        ASSERT_TRUE(counts_consistent(a));
        ASSERT_EQ(a.z, b.z);
      }
      for (auto c : a.topic_term) ASSERT_GE(c, 0);
    }
  }
}

TEST(GibbsSweep, SingleTopicIsFixedPoint) {
  const auto corpus = make_corpus(3, {{{0, 1}, {2}}});
  const auto h = hyper(1, 1.0, 1.0);
  auto s = init_state(corpus, h);
  const auto before = counts_of(s);
  gibbs_sweep(s, h);
  EXPECT_EQ(counts_of(s), before);
}

TEST(EstimatePhi, SmoothedPosteriorMean) {
  const auto corpus = make_corpus(2, {{{0, 0}}});
  const auto h = hyper(1, 1.0, 0.5);
  const auto phi = estimate_phi(make_state(corpus, h, {0}), h);
  EXPECT_NEAR(phi(0, 0), 2.5 / 3.0, 1e-15);
  EXPECT_NEAR(phi(0, 1), 0.5 / 3.0, 1e-15);

  const auto two = hyper(2, 1.0, 0.5);
  const auto uniform = estimate_phi(make_state(corpus, two, {0}), two);
  EXPECT_DOUBLE_EQ(uniform(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(uniform(1, 1), 0.5);
}

TEST(EstimateTheta, SmoothedPosteriorMean) {
  const auto corpus = make_corpus(2, {{{0}, {1}}});
  const auto h = hyper(2, 0.5, 0.5);
  const auto t = estimate_theta(make_state(corpus, h, {0, 0}), h, 0).theta;
  EXPECT_NEAR(t[0], 2.5 / 3.0, 1e-15);
  EXPECT_NEAR(t[1], 0.5 / 3.0, 1e-15);
  const auto empty = estimate_theta(std::vector<std::int64_t>{0, 0, 0, 0}, 0.1).theta;
  for (double v : empty) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Estimates, RowsNormalized) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = oracle::random_instance(rng);
    const auto h = hyper(in.K, in.alpha, in.beta, Granularity::sentence, trial);
    auto s = init_state(in.corpus, h);
    gibbs_sweep(s, h);
    const auto phi = estimate_phi(s, h);
    for (std::size_t k = 0; k < in.K; ++k) {
      double sum = 0.0;
      for (double v : phi.row(k)) {
        ASSERT_GT(v, 0.0);
        sum += v;
      }
      ASSERT_NEAR(sum, 1.0, 1e-12);
    }
    for (std::size_t d = 0; d < s.num_docs(); ++d) {
      const auto t = estimate_theta(s, h, d).theta;
      double sum = 0.0;
      for (double v : t) sum += v;
      ASSERT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Train, OneIterationOneDocument) {
  const auto corpus = make_corpus(3, {{{0, 1}, {2, 2}}});
  const auto r = train(corpus, Hyperparams::defaults(2), 1);
  ASSERT_EQ(r.model.phi.rows, 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    double sum = 0.0;
    for (double v : r.model.phi.row(k)) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_THROW(train(corpus, Hyperparams::defaults(2), 0), DomainError);
}

TEST(Train, PrefixUnchangedByLongerRunAndHookCalledPerSweep) {
  std::mt19937_64 rng(6);
  const auto in = oracle::random_instance(rng);
  const auto h = hyper(in.K, in.alpha, in.beta, Granularity::sentence, 99);
  auto run = [&](std::size_t iterations) {
    std::vector<std::vector<TopicId>> snapshots;
    std::size_t calls = 0;
    TrainOptions o;
    o.iterations = iterations;
    o.eval_every = 2;
    o.evaluate = [&](const SamplerState& s, const Hyperparams&) {
      snapshots.push_back(s.z);
      return 1.0;
    };
    o.on_sweep = [&](const SweepRecord& r) {
      ++calls;
      EXPECT_EQ(r.iteration, calls);
      EXPECT_EQ(r.perplexity.has_value(), r.iteration % 2 == 0);
    };
    train(in.corpus, h, o);
    EXPECT_EQ(calls, iterations);
    return snapshots;
  };
  const auto short_run = run(6), long_run = run(12);
  ASSERT_EQ(short_run.size(), 3u);
  for (std::size_t i = 0; i < short_run.size(); ++i) EXPECT_EQ(short_run[i], long_run[i]);
}

TrainedModel disjoint_model() {
  // topic 0 owns {a, b}, topic 1 owns {c, d}
  TrainedModel m;
  m.hyper = hyper(2, 0.5, 0.01);
  m.vocabulary = Vocabulary(std::vector<std::string>{"a", "b", "c", "d"});
  m.phi = Matrix(2, 4);
  const double hi = 0.49, lo = 0.01;
  for (std::size_t w = 0; w < 4; ++w) {
    m.phi(0, w) = w < 2 ? hi : lo;
    m.phi(1, w) = w < 2 ? lo : hi;
  }
  return m;
}

TEST(InferTheta, DisjointSupportConcentrates) {
  const auto m = disjoint_model();
  const Document doc{"x", {{0, 1, 0}, {1, 1}, {0}}, {}, 0};
  const auto r = infer_theta(m, doc, 40, 3);
  EXPECT_FALSE(r.empty_document);
  // every segment under topic 0 gives (3 + 0.5) / (3 + 1)
  EXPECT_GT(r.theta.theta[0], 0.85);
  EXPECT_LE(r.theta.theta[0], 0.875 + 1e-12);
  double sum = r.theta.theta[0] + r.theta.theta[1];
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(infer_theta(m, doc, 40, 3).theta.theta, r.theta.theta);
}

TEST(InferTheta, SingleTopicAndEmptyDocument) {
  TrainedModel m;
  m.hyper = hyper(1, 1.0, 0.1);
  m.vocabulary = Vocabulary(std::vector<std::string>{"a", "b"});
  m.phi = Matrix(1, 2, 0.5);
  const auto r = infer_theta(m, Document{"x", {{0, 1}}, {}, 0}, 10, 1);
  EXPECT_EQ(r.theta.theta, std::vector<double>{1.0});

  const auto e = infer_theta(disjoint_model(), Document{"oov", {}, {}, 5}, 10, 1);
  EXPECT_TRUE(e.empty_document);
  EXPECT_EQ(e.theta.theta, (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(infer_theta(m, Document{"x", {{0}}, {}, 0}, 0, 1), DomainError);
}

TEST(InferTheta, WordGranularityUsesTokens) {
  auto m = disjoint_model();
  m.hyper.granularity = Granularity::word;
  // mixed sentence: the word model can split it, the sentence model cannot
  const Document doc{"x", {{0, 2, 1, 3}}, {}, 0};
  const auto r = infer_theta(m, doc, 200, 8);
  EXPECT_NEAR(r.theta.theta[0], 0.5, 0.2);
}

}  // namespace
}  // namespace senlda

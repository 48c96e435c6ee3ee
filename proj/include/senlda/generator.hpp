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

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "senlda/corpus.hpp"
#include "senlda/math.hpp"
#include "senlda/rng.hpp"
#include "senlda/sampler.hpp"

// Synthetic corpora drawn from the sentence-level generative process: every
// sentence draws one topic from the document mixture and all of its words
// from that topic. Ground truth is returned for recovery tests.
namespace senlda {

struct GeneratorConfig {
  std::size_t D = 100;
  std::size_t V = 50;
  double xi_sentences = 8.0;  // Poisson rate of sentences per document
  double xi_words = 6.0;      // Poisson rate of words per sentence
  std::optional<Matrix> true_phi;  // K x V; drawn from Dirichlet(beta) when absent
};

struct GroundTruth {
  Matrix phi;
  std::vector<std::vector<double>> theta;  // per document
  std::vector<std::vector<TopicId>> z;     // per document, per sentence
};

struct GeneratedCorpus {
  Corpus corpus;
  GroundTruth truth;
};

/// Topic k puts `mass` uniformly on terms [k*support, (k+1)*support) and
/// spreads the remainder uniformly over the other terms.
inline Matrix separated_phi(std::size_t K, std::size_t V, std::size_t support, double mass) {
  if (K * support > V) throw DomainError("separated_phi needs K * support <= V");
  if (!(mass > 0.0 && mass <= 1.0)) throw DomainError("separated_phi mass must be in (0, 1]");
  if (support == 0) throw DomainError("separated_phi support must be >= 1");
  if (mass < 1.0 && support == V) throw DomainError("no terms left for the residual mass");
  Matrix phi(K, V, 0.0);
  const double rest = V > support ? (1.0 - mass) / static_cast<double>(V - support) : 0.0;
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t w = 0; w < V; ++w)
      phi(k, w) = (w >= k * support && w < (k + 1) * support)
                      ? mass / static_cast<double>(support)
                      : rest;
  return phi;
}

namespace detail {

inline std::vector<double> sample_dirichlet(std::size_t n, double concentration, Rng& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) total += (x = gamma(rng));
  if (!(total > 0.0)) {
    // every draw underflowed; the limit of a tiny concentration is a vertex
    std::fill(v.begin(), v.end(), 0.0);
    v[uniform_index(rng, n)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= total;
  return v;
}

inline std::size_t sample_categorical(std::span<const double> p, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (u < p[i]) return i;
    u -= p[i];
  }
  return p.size() - 1;
}

inline std::size_t sample_positive_poisson(double rate, Rng& rng) {
  std::poisson_distribution<std::size_t> poisson(rate);
  std::size_t n;
  do {
    n = poisson(rng);
  } while (n == 0);
  return n;
}

}  // namespace detail

inline GeneratedCorpus generate_corpus(const GeneratorConfig& cfg, const Hyperparams& hyper) {
  hyper.validate();
  if (cfg.D < 1 || cfg.V < 1) throw DomainError("generator needs D >= 1 and V >= 1");
  if (!(cfg.xi_sentences > 0.0) || !(cfg.xi_words > 0.0))
    throw DomainError("Poisson rates must be > 0");
  const std::size_t K = hyper.K, V = cfg.V;
  Rng rng = make_rng(hyper.seed, 0x67656e);

  GeneratedCorpus out;
  if (cfg.true_phi) {
    if (cfg.true_phi->rows != K || cfg.true_phi->cols != V)
      throw DomainError("true_phi must be K x V");
    out.truth.phi = *cfg.true_phi;
  } else {
    out.truth.phi = Matrix(K, V);
    for (std::size_t k = 0; k < K; ++k) {
      const auto row = detail::sample_dirichlet(V, hyper.beta, rng);
      std::copy(row.begin(), row.end(), out.truth.phi.row(k).begin());
    }
  }

  std::vector<std::string> terms;
  for (std::size_t w = 0; w < V; ++w) terms.push_back("w" + std::to_string(w));
  out.corpus.vocabulary = Vocabulary(std::move(terms));

  for (std::size_t d = 0; d < cfg.D; ++d) {
    auto theta = detail::sample_dirichlet(K, hyper.alpha, rng);
    const std::size_t S = detail::sample_positive_poisson(cfg.xi_sentences, rng);
    Document doc;
    doc.id = "doc" + std::to_string(d);
    std::vector<TopicId> z;
    for (std::size_t s = 0; s < S; ++s) {
      const std::size_t W = detail::sample_positive_poisson(cfg.xi_words, rng);
      const auto k = static_cast<TopicId>(detail::sample_categorical(theta, rng));
      Sentence sentence(W);
      for (auto& w : sentence)
        w = static_cast<TermId>(detail::sample_categorical(out.truth.phi.row(k), rng));
      z.push_back(k);
      doc.sentences.push_back(std::move(sentence));
    }
    out.corpus.documents.push_back(std::move(doc));
    out.truth.theta.push_back(std::move(theta));
    out.truth.z.push_back(std::move(z));
  }
  return out;
}

// Label of each document = its most frequent true sentence topic (ties to the
// lower id), as "topicN".
inline void label_by_dominant_topic(GeneratedCorpus& g, std::size_t K) {
  for (std::size_t d = 0; d < g.corpus.documents.size(); ++d) {
    std::vector<std::size_t> counts(K, 0);
    for (TopicId k : g.truth.z[d]) ++counts[k];
    const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
    g.corpus.documents[d].labels = {"topic" + std::to_string(best)};
  }
}

}  // namespace senlda

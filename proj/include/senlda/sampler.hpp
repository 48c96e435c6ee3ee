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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "senlda/corpus.hpp"
#include "senlda/error.hpp"
#include "senlda/math.hpp"
#include "senlda/rng.hpp"

// Collapsed Gibbs sampling with one latent topic per segment. A segment is a
// sentence (Granularity::sentence) or a single token (Granularity::word, which
// is exactly standard LDA). Dirichlet priors are symmetric.
namespace senlda {

using TopicId = std::uint32_t;

enum class Granularity { sentence, word };

inline std::string_view to_string(Granularity g) {
  return g == Granularity::sentence ? "sentence" : "word";
}

inline Granularity parse_granularity(std::string_view s) {
  if (s == "sentence") return Granularity::sentence;
  if (s == "word") return Granularity::word;
  throw UsageError("granularity must be 'sentence' or 'word', got '" + std::string(s) + "'");
}

struct Hyperparams {
  std::size_t K = 1;
  double alpha = 1.0;
  double beta = 1.0;
  Granularity granularity = Granularity::sentence;
  std::uint64_t seed = 0;

  // alpha = beta = 1/K
  static Hyperparams defaults(std::size_t K, Granularity g = Granularity::sentence,
                              std::uint64_t seed = 0) {
    const double prior = K > 0 ? 1.0 / static_cast<double>(K) : 1.0;
    return {K, prior, prior, g, seed};
  }

  void validate() const {
    if (K < 1) throw DomainError("number of topics must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be > 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be > 0");
  }
};

struct TermCount {
  TermId term;
  std::uint32_t count;
  friend bool operator==(const TermCount&, const TermCount&) = default;
};

// Within-segment term frequencies, sorted by term id.
inline std::vector<TermCount> term_counts(std::span<const TermId> segment) {
  std::vector<TermId> sorted(segment.begin(), segment.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<TermCount> bag;
  for (TermId t : sorted) {
    if (!bag.empty() && bag.back().term == t)
      ++bag.back().count;
    else
      bag.push_back({t, 1});
  }
  return bag;
}

/// Flattened, immutable segmentation of a document collection. Segments are
/// numbered globally in corpus order; each keeps its tokens and its bag of
/// distinct terms.
class SegmentLayout {
 public:
  SegmentLayout() = default;

  SegmentLayout(std::span<const Document> docs, Granularity g, std::size_t vocab_size)
      : vocab_size_(vocab_size) {
    doc_begin_.push_back(0);
    seg_begin_.push_back(0);
    bag_begin_.push_back(0);
    auto push_segment = [&](std::span<const TermId> seg, std::size_t d) {
      for (TermId t : seg) {
        if (t >= vocab_size) throw DomainError("token id outside the vocabulary");
        tokens_.push_back(t);
      }
      seg_begin_.push_back(tokens_.size());
      for (const auto& tc : term_counts(seg)) bag_.push_back(tc);
      bag_begin_.push_back(bag_.size());
      seg_doc_.push_back(d);
    };
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (const auto& sentence : docs[d].sentences) {
        if (g == Granularity::sentence) {
          if (!sentence.empty()) push_segment(sentence, d);
        } else {
          for (std::size_t i = 0; i < sentence.size(); ++i)
            push_segment(std::span<const TermId>(sentence).subspan(i, 1), d);
        }
      }
      doc_begin_.push_back(seg_doc_.size());
    }
  }

  std::size_t num_docs() const { return doc_begin_.size() - 1; }
  std::size_t num_segments() const { return seg_doc_.size(); }
  std::size_t num_tokens() const { return tokens_.size(); }
  std::size_t vocab_size() const { return vocab_size_; }

  std::size_t doc_begin(std::size_t d) const { return doc_begin_[d]; }
  std::size_t doc_end(std::size_t d) const { return doc_begin_[d + 1]; }
  std::size_t doc_segments(std::size_t d) const { return doc_end(d) - doc_begin(d); }
  std::size_t doc_of(std::size_t seg) const { return seg_doc_[seg]; }

  std::span<const TermId> tokens(std::size_t seg) const {
    return {tokens_.data() + seg_begin_[seg], seg_begin_[seg + 1] - seg_begin_[seg]};
  }
  std::span<const TermCount> bag(std::size_t seg) const {
    return {bag_.data() + bag_begin_[seg], bag_begin_[seg + 1] - bag_begin_[seg]};
  }
  std::size_t length(std::size_t seg) const { return seg_begin_[seg + 1] - seg_begin_[seg]; }

 private:
  std::size_t vocab_size_ = 0;
  std::vector<std::size_t> doc_begin_;
  std::vector<std::size_t> seg_begin_;
  std::vector<std::size_t> bag_begin_;
  std::vector<std::size_t> seg_doc_;
  std::vector<TermId> tokens_;
  std::vector<TermCount> bag_;
};

/// Topic assignments of every segment plus the count tables of the collapsed
/// conditional. doc_topic counts segments, not tokens.
struct SamplerState {
  std::size_t K = 0;
  std::size_t V = 0;
  SegmentLayout layout;
  std::vector<TopicId> z;                 // one per segment
  std::vector<std::int64_t> topic_term;   // K x V
  std::vector<std::int64_t> topic_total;  // K
  std::vector<std::int64_t> doc_topic;    // D x K
  std::vector<std::int64_t> doc_total;    // D
  Rng rng;

  std::size_t num_docs() const { return layout.num_docs(); }

  std::int64_t n_topic_term(std::size_t k, TermId w) const { return topic_term[k * V + w]; }
  std::int64_t n_doc_topic(std::size_t d, std::size_t k) const { return doc_topic[d * K + k]; }

  std::span<const TopicId> assignments(std::size_t d) const {
    return {z.data() + layout.doc_begin(d), layout.doc_segments(d)};
  }
  std::size_t segment_index(std::size_t d, std::size_t s) const { return layout.doc_begin(d) + s; }
};

/// Count tables recomputed from scratch; compared against the incrementally
/// maintained ones by the consistency checks.
struct CountTables {
  std::vector<std::int64_t> topic_term, topic_total, doc_topic, doc_total;
  friend bool operator==(const CountTables&, const CountTables&) = default;
};

inline CountTables recount(const SegmentLayout& layout, std::span<const TopicId> z, std::size_t K) {
  const std::size_t V = layout.vocab_size(), D = layout.num_docs();
  CountTables c{std::vector<std::int64_t>(K * V, 0), std::vector<std::int64_t>(K, 0),
                std::vector<std::int64_t>(D * K, 0), std::vector<std::int64_t>(D, 0)};
  for (std::size_t seg = 0; seg < layout.num_segments(); ++seg) {
    const TopicId k = z[seg];
    for (TermId w : layout.tokens(seg)) ++c.topic_term[k * V + w];
    c.topic_total[k] += static_cast<std::int64_t>(layout.length(seg));
    ++c.doc_topic[layout.doc_of(seg) * K + k];
    ++c.doc_total[layout.doc_of(seg)];
  }
  return c;
}

inline CountTables counts_of(const SamplerState& s) {
  return {s.topic_term, s.topic_total, s.doc_topic, s.doc_total};
}

inline bool counts_consistent(const SamplerState& s) {
  return recount(s.layout, s.z, s.K) == counts_of(s);
}

inline void remove_segment(SamplerState& s, std::size_t seg) {
  const TopicId k = s.z[seg];
  for (const auto& [w, c] : s.layout.bag(seg)) s.topic_term[k * s.V + w] -= c;
  s.topic_total[k] -= static_cast<std::int64_t>(s.layout.length(seg));
  const std::size_t d = s.layout.doc_of(seg);
  --s.doc_topic[d * s.K + k];
  --s.doc_total[d];
}

inline void add_segment(SamplerState& s, std::size_t seg, TopicId k) {
  s.z[seg] = k;
  for (const auto& [w, c] : s.layout.bag(seg)) s.topic_term[k * s.V + w] += c;
  s.topic_total[k] += static_cast<std::int64_t>(s.layout.length(seg));
  const std::size_t d = s.layout.doc_of(seg);
  ++s.doc_topic[d * s.K + k];
  ++s.doc_total[d];
}

/// State with the given assignments (one topic per segment, corpus order).
inline SamplerState make_state(const Corpus& corpus, const Hyperparams& hyper,
                               std::vector<TopicId> z) {
  hyper.validate();
  SamplerState s;
  s.K = hyper.K;
  s.V = corpus.vocabulary.size();
  s.layout = SegmentLayout(corpus.documents, hyper.granularity, s.V);
  if (z.size() != s.layout.num_segments()) throw DomainError("one assignment per segment required");
  for (TopicId k : z)
    if (k >= s.K) throw DomainError("topic id out of range");
  s.z = std::move(z);
  auto c = recount(s.layout, s.z, s.K);
  s.topic_term = std::move(c.topic_term);
  s.topic_total = std::move(c.topic_total);
  s.doc_topic = std::move(c.doc_topic);
  s.doc_total = std::move(c.doc_total);
  s.rng = make_rng(hyper.seed, 0);
  return s;
}

/// Uniform random initial assignment from the chain's stream.
inline SamplerState init_state(const Corpus& corpus, const Hyperparams& hyper) {
  hyper.validate();
  if (corpus.documents.empty() || corpus.num_tokens() == 0)
    throw DomainError("cannot sample an empty corpus");
  SegmentLayout layout(corpus.documents, hyper.granularity, corpus.vocabulary.size());
  Rng rng = make_rng(hyper.seed, 0);
  std::vector<TopicId> z(layout.num_segments());
  for (auto& k : z) k = static_cast<TopicId>(uniform_index(rng, hyper.K));
  auto s = make_state(corpus, hyper, std::move(z));
  s.rng = rng;
  return s;
}

/// Log of the topic-term factor of the segment conditional for topic k:
///   sum_w log[(n_kw + b) ... (n_kw + b + c_w - 1)]
///     - log[(n_k + V b) ... (n_k + V b + N - 1)]
/// where c_w are within-segment frequencies, N the segment length, and the
/// counts exclude the segment.
inline double log_segment_factor(const SamplerState& s, std::span<const TermCount> bag,
                                 std::size_t length, std::size_t k, double beta) {
  double acc = 0.0;
  for (const auto& [w, c] : bag)
    acc += log_rising_factorial(static_cast<double>(s.topic_term[k * s.V + w]) + beta, c);
  acc -= log_rising_factorial(
      static_cast<double>(s.topic_total[k]) + static_cast<double>(s.V) * beta, length);
  return acc;
}

// With excluded == false the counts are taken to include the segment under
// topic k, and its contribution is subtracted before evaluating.
inline double log_segment_factor(const SamplerState& s, std::span<const TermId> segment,
                                 std::size_t k, double beta, bool excluded = true) {
  const auto bag = term_counts(segment);
  if (excluded) return log_segment_factor(s, bag, segment.size(), k, beta);
  double acc = 0.0;
  for (const auto& [w, c] : bag) {
    const auto n = s.topic_term[k * s.V + w] - c;
    if (n < 0) throw DomainError("segment is not counted under topic k");
    acc += log_rising_factorial(static_cast<double>(n) + beta, c);
  }
  const auto total = s.topic_total[k] - static_cast<std::int64_t>(segment.size());
  if (total < 0) throw DomainError("segment is not counted under topic k");
  acc -= log_rising_factorial(static_cast<double>(total) + static_cast<double>(s.V) * beta,
                              segment.size());
  return acc;
}

inline void full_conditional(const SamplerState& s, const Hyperparams& hyper, std::size_t seg,
                             std::span<double> out) {
  const std::size_t d = s.layout.doc_of(seg);
  const auto bag = s.layout.bag(seg);
  const std::size_t len = s.layout.length(seg);
  for (std::size_t k = 0; k < s.K; ++k)
    out[k] = std::log(static_cast<double>(s.doc_topic[d * s.K + k]) + hyper.alpha) +
             log_segment_factor(s, bag, len, k, hyper.beta);
}

/// Unnormalized log weights of segment s of document d over all topics. The
/// segment must already be removed from the counts.
inline std::vector<double> full_conditional(const SamplerState& s, const Hyperparams& hyper,
                                            std::size_t d, std::size_t seg_in_doc) {
  if (d >= s.num_docs() || seg_in_doc >= s.layout.doc_segments(d))
    throw DomainError("segment index out of range");
  std::vector<double> out(s.K);
  full_conditional(s, hyper, s.segment_index(d, seg_in_doc), out);
  return out;
}

/// One systematic-scan sweep over all segments in corpus order.
inline void gibbs_sweep(SamplerState& s, const Hyperparams& hyper) {
  if (s.K == 1) return;
  std::vector<double> weights(s.K), scratch(s.K);
  for (std::size_t seg = 0; seg < s.layout.num_segments(); ++seg) {
    remove_segment(s, seg);
    full_conditional(s, hyper, seg, weights);
    const auto k = static_cast<TopicId>(sample_categorical_log(weights, s.rng, scratch));
    add_segment(s, seg, k);
  }
}

/// Posterior mean of the topic-term distributions.
inline Matrix estimate_phi(const SamplerState& s, const Hyperparams& hyper) {
  Matrix phi(s.K, s.V);
  const double vb = static_cast<double>(s.V) * hyper.beta;
  for (std::size_t k = 0; k < s.K; ++k) {
    const double denom = static_cast<double>(s.topic_total[k]) + vb;
    for (std::size_t w = 0; w < s.V; ++w)
      phi(k, w) = (static_cast<double>(s.topic_term[k * s.V + w]) + hyper.beta) / denom;
  }
  return phi;
}

struct TopicDistribution {
  std::vector<double> theta;
};

inline TopicDistribution estimate_theta(std::span<const std::int64_t> doc_topic_row,
                                        double alpha) {
  const std::size_t K = doc_topic_row.size();
  std::int64_t total = 0;
  for (auto c : doc_topic_row) total += c;
  const double denom = static_cast<double>(total) + static_cast<double>(K) * alpha;
  TopicDistribution t{std::vector<double>(K)};
  for (std::size_t k = 0; k < K; ++k)
    t.theta[k] = (static_cast<double>(doc_topic_row[k]) + alpha) / denom;
  return t;
}

inline TopicDistribution estimate_theta(const SamplerState& s, const Hyperparams& hyper,
                                        std::size_t d) {
  return estimate_theta(std::span<const std::int64_t>(s.doc_topic.data() + d * s.K, s.K),
                        hyper.alpha);
}

/// log p(w, z | alpha, beta) with theta and phi integrated out, using
/// segment-level document-topic counts.
inline double log_joint(const SamplerState& s, const Hyperparams& hyper) {
  const double K = static_cast<double>(s.K), V = static_cast<double>(s.V);
  const double a = hyper.alpha, b = hyper.beta;
  const double log_delta_beta = V * std::lgamma(b) - std::lgamma(V * b);
  const double log_delta_alpha = K * std::lgamma(a) - std::lgamma(K * a);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.K; ++k) {
    double row = 0.0;
    for (std::size_t w = 0; w < s.V; ++w)
      row += std::lgamma(static_cast<double>(s.topic_term[k * s.V + w]) + b);
    acc += row - std::lgamma(static_cast<double>(s.topic_total[k]) + V * b) - log_delta_beta;
  }
  for (std::size_t d = 0; d < s.num_docs(); ++d) {
    double row = 0.0;
    for (std::size_t k = 0; k < s.K; ++k)
      row += std::lgamma(static_cast<double>(s.doc_topic[d * s.K + k]) + a);
    acc += row - std::lgamma(static_cast<double>(s.doc_total[d]) + K * a) - log_delta_alpha;
  }
  return acc;
}

inline constexpr int kModelFormatVersion = 1;

struct TrainedModel {
  Matrix phi;  // K x V, rows sum to 1
  Hyperparams hyper;
  Vocabulary vocabulary;
  int format_version = kModelFormatVersion;

  std::size_t K() const { return phi.rows; }
  std::size_t V() const { return phi.cols; }
};

struct SweepRecord {
  std::size_t iteration = 0;  // 1-based
  double seconds = 0.0;       // wall clock of the sweep alone
  std::optional<double> perplexity;
};

struct TrainOptions {
  std::size_t iterations = 1;
  std::size_t eval_every = 1;
  // Evaluated after every eval_every-th sweep when set; must not touch the
  // chain's random stream.
  std::function<double(const SamplerState&, const Hyperparams&)> evaluate;
  std::function<void(const SweepRecord&)> on_sweep;
};

struct TrainResult {
  TrainedModel model;
  SamplerState state;
};

inline TrainResult train(const Corpus& corpus, const Hyperparams& hyper, const TrainOptions& opts) {
  if (opts.iterations < 1) throw DomainError("iterations must be >= 1");
  if (opts.eval_every < 1) throw DomainError("eval_every must be >= 1");
  auto state = init_state(corpus, hyper);
  for (std::size_t it = 1; it <= opts.iterations; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    gibbs_sweep(state, hyper);
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    SweepRecord rec{it, dt.count(), std::nullopt};
    if (opts.evaluate && it % opts.eval_every == 0) rec.perplexity = opts.evaluate(state, hyper);
    if (opts.on_sweep) opts.on_sweep(rec);
  }
  TrainedModel model{estimate_phi(state, hyper), hyper, corpus.vocabulary, kModelFormatVersion};
  return {std::move(model), std::move(state)};
}

inline TrainResult train(const Corpus& corpus, const Hyperparams& hyper, std::size_t iterations) {
  TrainOptions opts;
  opts.iterations = iterations;
  return train(corpus, hyper, opts);
}

struct InferResult {
  TopicDistribution theta;
  bool empty_document = false;
};

/// Held-out fold-in against a fixed model: the topic-term side is frozen at
/// phi, so a segment's likelihood under topic k is prod_w phi[k][w]^c_w, and
/// only the document's own segment assignments are resampled.
class FoldIn {
 public:
  explicit FoldIn(const TrainedModel& model)
      : model_(&model), log_phi_(model.phi.rows, model.phi.cols) {
    for (std::size_t i = 0; i < log_phi_.data.size(); ++i)
      log_phi_.data[i] = std::log(model.phi.data[i]);
  }

  const TrainedModel& model() const { return *model_; }

  // theta is averaged over the last quarter of the sweeps (at least one).
  InferResult infer(const Document& doc, std::size_t iterations, std::uint64_t seed) const {
    if (iterations < 1) throw DomainError("fold-in iterations must be >= 1");
    const std::size_t K = model_->K(), V = model_->V();
    const double alpha = model_->hyper.alpha;
    if (doc.num_tokens() == 0) {
      return {TopicDistribution{std::vector<double>(K, 1.0 / static_cast<double>(K))}, true};
    }
    const SegmentLayout layout(std::span<const Document>(&doc, 1), model_->hyper.granularity, V);
    const std::size_t S = layout.num_segments();

    // Per-segment log likelihood under each topic is fixed during fold-in.
    std::vector<double> seg_loglik(S * K, 0.0);
    for (std::size_t seg = 0; seg < S; ++seg)
      for (std::size_t k = 0; k < K; ++k)
        for (const auto& [w, c] : layout.bag(seg))
          seg_loglik[seg * K + k] += static_cast<double>(c) * log_phi_(k, w);

    Rng rng = make_rng(seed, stable_hash(doc.id));
    std::vector<TopicId> z(S);
    std::vector<std::int64_t> counts(K, 0);
    for (auto& k : z) {
      k = static_cast<TopicId>(uniform_index(rng, K));
      ++counts[k];
    }

    const std::size_t keep = std::max<std::size_t>(1, iterations / 4);
    std::vector<double> acc(K, 0.0), weights(K), scratch(K);
    for (std::size_t it = 0; it < iterations; ++it) {
      if (K > 1) {
        for (std::size_t seg = 0; seg < S; ++seg) {
          --counts[z[seg]];
          for (std::size_t k = 0; k < K; ++k)
            weights[k] = std::log(static_cast<double>(counts[k]) + alpha) + seg_loglik[seg * K + k];
          z[seg] = static_cast<TopicId>(sample_categorical_log(weights, rng, scratch));
          ++counts[z[seg]];
        }
      }
      if (it >= iterations - keep) {
        const auto t = estimate_theta(counts, alpha);
        for (std::size_t k = 0; k < K; ++k) acc[k] += t.theta[k];
      }
    }
    for (auto& v : acc) v /= static_cast<double>(keep);
    return {TopicDistribution{std::move(acc)}, false};
  }

 private:
  const TrainedModel* model_;
  Matrix log_phi_;
};

inline InferResult infer_theta(const TrainedModel& model, const Document& doc,
                               std::size_t iterations, std::uint64_t seed) {
  return FoldIn(model).infer(doc, iterations, seed);
}

}  // namespace senlda

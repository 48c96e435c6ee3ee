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

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "senlda/corpus.hpp"
#include "senlda/error.hpp"
#include "senlda/sampler.hpp"

namespace senlda {

struct PerplexityReport {
  double perplexity = 0.0;
  std::size_t total_tokens = 0;    // tokens scored
  std::size_t skipped_tokens = 0;  // out of vocabulary, excluded from the mean
};

/// exp(-mean log p(w)) over all tokens, with p(w) = sum_k theta[k] phi[k][w].
inline PerplexityReport perplexity_from_thetas(const Matrix& phi, std::span<const Document> docs,
                                               std::span<const TopicDistribution> thetas) {
  if (docs.size() != thetas.size()) throw DomainError("one theta per document required");
  PerplexityReport r;
  double log_lik = 0.0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    r.skipped_tokens += docs[d].skipped_tokens;
    const auto& theta = thetas[d].theta;
    if (theta.size() != phi.rows) throw DomainError("theta dimension must equal K");
    for (const auto& sentence : docs[d].sentences) {
      for (TermId w : sentence) {
        if (w >= phi.cols) throw DomainError("token id outside the model vocabulary");
        double p = 0.0;
        for (std::size_t k = 0; k < phi.rows; ++k) p += theta[k] * phi(k, w);
        log_lik += std::log(p);
        ++r.total_tokens;
      }
    }
  }
  if (r.total_tokens == 0) throw NoTokens();
  r.perplexity = std::exp(-log_lik / static_cast<double>(r.total_tokens));
  if (!std::isfinite(r.perplexity) || !(r.perplexity > 0.0))
    throw NumericalError("perplexity is not finite");
  return r;
}

/// Held-out perplexity with theta obtained by fold-in. The held-out corpus is
/// re-encoded by term when its vocabulary differs from the model's.
inline PerplexityReport perplexity(const TrainedModel& model, const Corpus& heldout,
                                   std::size_t fold_in_iterations, std::uint64_t seed) {
  const Corpus* docs = &heldout;
  Corpus remapped;
  if (!(heldout.vocabulary == model.vocabulary)) {
    remapped = remap_corpus(heldout, model.vocabulary);
    docs = &remapped;
  }
  if (docs->num_tokens() == 0) throw NoTokens();
  const FoldIn fold_in(model);
  std::vector<TopicDistribution> thetas;
  thetas.reserve(docs->documents.size());
  for (const auto& d : docs->documents)
    thetas.push_back(fold_in.infer(d, fold_in_iterations, seed).theta);
  return perplexity_from_thetas(model.phi, docs->documents, thetas);
}

/// Perplexity of the training tokens under the chain's current posterior-mean
/// theta and phi. Cheap enough to run after every sweep.
inline double training_perplexity(const SamplerState& s, const Hyperparams& hyper) {
  const Matrix phi = estimate_phi(s, hyper);
  double log_lik = 0.0;
  std::size_t n = 0;
  for (std::size_t d = 0; d < s.num_docs(); ++d) {
    const auto theta = estimate_theta(s, hyper, d).theta;
    for (std::size_t seg = s.layout.doc_begin(d); seg < s.layout.doc_end(d); ++seg) {
      for (const auto& [w, c] : s.layout.bag(seg)) {
        double p = 0.0;
        for (std::size_t k = 0; k < s.K; ++k) p += theta[k] * phi(k, w);
        log_lik += static_cast<double>(c) * std::log(p);
        n += c;
      }
    }
  }
  return std::exp(-log_lik / static_cast<double>(n));
}

/// Evaluator for TrainOptions::evaluate scoring a held-out corpus against the
/// chain's current phi.
inline std::function<double(const SamplerState&, const Hyperparams&)> heldout_evaluator(
    Corpus heldout, Vocabulary vocabulary, std::size_t fold_in_iterations, std::uint64_t seed) {
  auto docs = std::make_shared<const Corpus>(remap_corpus(heldout, vocabulary));
  auto vocab = std::make_shared<const Vocabulary>(std::move(vocabulary));
  return [docs, vocab, fold_in_iterations, seed](const SamplerState& s, const Hyperparams& h) {
    TrainedModel m{estimate_phi(s, h), h, *vocab, kModelFormatVersion};
    return perplexity(m, *docs, fold_in_iterations, seed).perplexity;
  };
}

struct DiagnosticsRow {
  std::size_t iteration = 0;
  double seconds = 0.0;
  std::optional<double> perplexity;
};

struct DiagnosticsSeries {
  std::string label;
  std::vector<DiagnosticsRow> rows;  // strictly increasing iterations

  void append(const SweepRecord& r) {
    if (!rows.empty() && r.iteration <= rows.back().iteration)
      throw DomainError("diagnostics iterations must be strictly increasing");
    rows.push_back({r.iteration, r.seconds, r.perplexity});
  }
};

// Rows that carry a perplexity value.
inline std::vector<DiagnosticsRow> evaluated_rows(const DiagnosticsSeries& s) {
  std::vector<DiagnosticsRow> out;
  for (const auto& r : s.rows)
    if (r.perplexity) out.push_back(r);
  return out;
}

struct RatioRow {
  std::size_t iteration;
  double ratio;
};

/// perplexity_b / perplexity_a per evaluated iteration: values above one mean
/// series a reached the lower perplexity.
inline std::vector<RatioRow> perplexity_ratio(const DiagnosticsSeries& a, const DiagnosticsSeries& b) {
  const auto ra = evaluated_rows(a), rb = evaluated_rows(b);
  if (ra.size() != rb.size())
    throw IterationMismatch("series '" + a.label + "' and '" + b.label +
                            "' have different numbers of evaluations");
  std::vector<RatioRow> out;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].iteration != rb[i].iteration)
      throw IterationMismatch("evaluation grids differ at iteration " +
                              std::to_string(ra[i].iteration));
    out.push_back({ra[i].iteration, *rb[i].perplexity / *ra[i].perplexity});
  }
  return out;
}

inline constexpr double kDefaultConvergenceEps = 1e-3;
inline constexpr std::size_t kDefaultConvergenceWindow = 3;

/// First evaluated iteration t at which every consecutive pair in the window
/// of `window` evaluations ending at t shows a relative perplexity decrease
/// below rel_eps. Increases count as "not decreasing".
inline std::optional<std::size_t> detect_convergence(const DiagnosticsSeries& series,
                                                     double rel_eps = kDefaultConvergenceEps,
                                                     std::size_t window = kDefaultConvergenceWindow) {
  if (window < 2) throw DomainError("convergence window must be >= 2");
  const auto rows = evaluated_rows(series);
  std::size_t run = 1;  // length of the current run of non-decreasing steps, in points
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double prev = *rows[i - 1].perplexity, cur = *rows[i].perplexity;
    run = (prev - cur) / prev < rel_eps ? run + 1 : 1;
    if (run >= window) return rows[i].iteration;
  }
  return std::nullopt;
}

namespace detail {
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace detail

inline std::string diagnostics_csv(std::span<const DiagnosticsSeries> series) {
  std::string out = "iteration,seconds,perplexity,label\n";
  char buf[64];
  for (const auto& s : series) {
    for (const auto& r : s.rows) {
      out += std::to_string(r.iteration);
      std::snprintf(buf, sizeof buf, ",%.9f,", r.seconds);
      out += buf;
      if (r.perplexity) {
        std::snprintf(buf, sizeof buf, "%.17g", *r.perplexity);
        out += buf;
      }
      out += ',' + detail::csv_field(s.label) + '\n';
    }
  }
  return out;
}

/// Parses diagnostics CSV back into one series per label, in first-seen order.
inline std::vector<DiagnosticsSeries> parse_diagnostics_csv(std::string_view text) {
  std::vector<DiagnosticsSeries> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("iteration,seconds,perplexity,label", 0) != 0)
    throw FormatError("diagnostics CSV header missing");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        f.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(std::move(cur));
    if (f.size() != 4) throw FormatError("diagnostics CSV line " + std::to_string(line_no) + ": expected 4 fields");
    DiagnosticsRow r;
    try {
      r.iteration = std::stoul(f[0]);
      r.seconds = std::stod(f[1]);
      if (!f[2].empty()) r.perplexity = std::stod(f[2]);
    } catch (const std::exception&) {
      throw FormatError("diagnostics CSV line " + std::to_string(line_no) + ": bad number");
    }
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.label == f[3]; });
    if (it == out.end()) {
      out.push_back({f[3], {}});
      it = out.end() - 1;
    }
    if (!it->rows.empty() && r.iteration <= it->rows.back().iteration)
      throw FormatError("diagnostics CSV: iterations not increasing for '" + f[3] + "'");
    it->rows.push_back(r);
  }
  return out;
}

inline std::string ratio_csv(std::span<const RatioRow> rows) {
  std::string out = "iteration,ratio\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", r.iteration, r.ratio);
    out += buf;
  }
  return out;
}

}  // namespace senlda

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
#include <string>
#include <vector>

#include "senlda/evaluation.hpp"
#include "senlda/sampler.hpp"

// Convergence benchmark: sentence- and word-granularity chains on the same
// corpus and seeds, with per-sweep timing and perplexity.
namespace senlda {

struct BenchConfig {
  std::size_t K = 10;
  std::optional<double> alpha;  // default 1/K
  std::optional<double> beta;   // default 1/K
  std::size_t iterations = 100;
  std::vector<std::uint64_t> seeds{1};
  std::size_t eval_every = 1;
  // Perplexity is measured on this corpus by fold-in when set, else on the
  // training tokens.
  std::optional<Corpus> heldout;
  std::size_t fold_in_iterations = 20;
  double rel_eps = kDefaultConvergenceEps;
  std::size_t window = kDefaultConvergenceWindow;
};

struct ChainSummary {
  std::string label;
  Granularity granularity;
  std::uint64_t seed;
  std::optional<std::size_t> converged_at;
  std::optional<double> final_perplexity;
  double seconds_total = 0.0;
  double seconds_first_25 = 0.0;
};

struct BenchResult {
  std::vector<DiagnosticsSeries> series;
  std::vector<ChainSummary> chains;
};

inline Hyperparams bench_hyper(const BenchConfig& cfg, Granularity g, std::uint64_t seed) {
  auto h = Hyperparams::defaults(cfg.K, g, seed);
  if (cfg.alpha) h.alpha = *cfg.alpha;
  if (cfg.beta) h.beta = *cfg.beta;
  return h;
}

inline std::string chain_label(Granularity g, std::uint64_t seed) {
  return std::string(to_string(g)) + "/seed=" + std::to_string(seed);
}

inline BenchResult run_bench(const Corpus& corpus, const BenchConfig& cfg) {
  if (cfg.seeds.empty()) throw DomainError("bench needs at least one seed");
  BenchResult result;
  for (std::uint64_t seed : cfg.seeds) {
    for (Granularity g : {Granularity::sentence, Granularity::word}) {
      const auto hyper = bench_hyper(cfg, g, seed);
      DiagnosticsSeries series{chain_label(g, seed), {}};
      TrainOptions opts;
      opts.iterations = cfg.iterations;
      opts.eval_every = cfg.eval_every;
      if (cfg.heldout)
        opts.evaluate = heldout_evaluator(*cfg.heldout, corpus.vocabulary, cfg.fold_in_iterations, seed);
      else
        opts.evaluate = training_perplexity;
      opts.on_sweep = [&](const SweepRecord& r) { series.append(r); };
      train(corpus, hyper, opts);

      ChainSummary summary{series.label, g, seed, detect_convergence(series, cfg.rel_eps, cfg.window),
                           std::nullopt, 0.0, 0.0};
      for (const auto& r : series.rows) {
        summary.seconds_total += r.seconds;
        if (r.iteration <= 25) summary.seconds_first_25 += r.seconds;
        if (r.perplexity) summary.final_perplexity = r.perplexity;
      }
      result.series.push_back(std::move(series));
      result.chains.push_back(std::move(summary));
    }
  }
  return result;
}

/// label,granularity,seed,converged_at,final_perplexity,seconds_total,seconds_first_25
/// (converged_at empty when the chain never converged).
inline std::string convergence_csv(const BenchResult& r) {
  std::string out = "label,granularity,seed,converged_at,final_perplexity,seconds_total,seconds_first_25\n";
  char buf[96];
  for (const auto& c : r.chains) {
    out += c.label + ',' + std::string(to_string(c.granularity)) + ',' + std::to_string(c.seed) + ',';
    if (c.converged_at) out += std::to_string(*c.converged_at);
    out += ',';
    if (c.final_perplexity) out += format_real(*c.final_perplexity);
    std::snprintf(buf, sizeof buf, ",%.9f,%.9f\n", c.seconds_total, c.seconds_first_25);
    out += buf;
  }
  return out;
}

}  // namespace senlda

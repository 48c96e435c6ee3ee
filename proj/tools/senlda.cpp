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

// senlda: command-line front end.
//
//   senlda prep corpus.jsonl -o corpus.json --stopwords stop.txt
//   senlda train corpus.json -o model.json --topics 10 --granularity sentence \
//       --iterations 100 --heldout heldout.json --diagnostics diag.csv
//   senlda infer model.json docs.jsonl -o theta.csv
//   senlda perplexity model.json heldout.json -o report.json
//   senlda classify --features theta.csv --labels labels.csv -o f1.json
//   senlda generate -o synth.json --truth truth.json --topics 5
//   senlda bench synth.json -o timing.csv --summary convergence.csv --topics 5
//
// Exit codes: 0 success, 1 runtime/numeric error, 2 usage or I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "senlda/senlda.hpp"

namespace {

using namespace senlda;
using ojson = nlohmann::ordered_json;

// Every command records its resolved parameters next to its main output.
void write_config(const std::string& output, const ojson& config) {
  write_file(output + ".config.json", config.dump(2) + "\n");
}

struct PrepOptions {
  std::string input, output, stopwords, labels_out;
  bool pretokenized = false;
  bool no_lowercase = false;
  std::size_t min_term_length = 1;
};

PreprocessConfig preprocess_config(const std::string& stopwords, bool pretokenized,
                                   bool no_lowercase, std::size_t min_term_length) {
  PreprocessConfig cfg;
  cfg.lowercase = !no_lowercase;
  cfg.pretokenized = pretokenized;
  cfg.min_term_length = min_term_length;
  if (!stopwords.empty()) {
    for (const auto& w : read_stopwords(stopwords))
      cfg.stopwords.insert(cfg.lowercase ? text::to_lower(w) : w);
  }
  return cfg;
}

std::string corpus_labels_csv(const Corpus& corpus) {
  std::vector<std::string> ids;
  std::vector<LabelSet> labels;
  for (const auto& d : corpus.documents) {
    ids.push_back(d.id);
    LabelSet l = d.labels;
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    labels.push_back(std::move(l));
  }
  return labels_csv(ids, labels);
}

void print_corpus_summary(const Corpus& corpus) {
  std::set<std::string> classes;
  for (const auto& d : corpus.documents) classes.insert(d.labels.begin(), d.labels.end());
  std::printf("%-10s %-10s %-10s %-10s %-10s\n", "Documents", "|V|", "Sentences", "Tokens", "Classes");
  std::printf("%-10zu %-10zu %-10zu %-10zu %-10s\n", corpus.documents.size(), corpus.vocabulary.size(),
              corpus.num_sentences(), corpus.num_tokens(),
              classes.empty() ? "-" : std::to_string(classes.size()).c_str());
}

int cmd_prep(const PrepOptions& o) {
  const auto cfg = preprocess_config(o.stopwords, o.pretokenized, o.no_lowercase, o.min_term_length);
  const auto raw = read_jsonl(o.input);
  const auto built = build_corpus(raw, cfg);
  save_corpus(built.corpus, o.output);
  if (!o.labels_out.empty()) write_file(o.labels_out, corpus_labels_csv(built.corpus));
  write_config(o.output, {{"command", "prep"},
                          {"input", o.input},
                          {"stopwords", o.stopwords},
                          {"stopword_count", cfg.stopwords.size()},
                          {"pretokenized", o.pretokenized},
                          {"lowercase", cfg.lowercase},
                          {"min_term_length", o.min_term_length},
                          {"dropped_documents", built.report.dropped_documents},
                          {"dropped_sentences", built.report.dropped_sentences}});
  print_corpus_summary(built.corpus);
  std::printf("dropped: %zu documents, %zu sentences\n", built.report.dropped_documents,
              built.report.dropped_sentences);
  return 0;
}

struct HyperOptions {
  std::size_t topics = 0;
  std::optional<double> alpha, beta;
  std::string granularity = "sentence";
  std::uint64_t seed = 1;

  Hyperparams resolve() const {
    if (topics < 1) throw UsageError("--topics must be >= 1");
    auto h = Hyperparams::defaults(topics, parse_granularity(granularity), seed);
    if (alpha) h.alpha = *alpha;
    if (beta) h.beta = *beta;
    h.validate();
    return h;
  }
};

void add_hyper_flags(CLI::App* cmd, HyperOptions& h, bool with_granularity) {
  cmd->add_option("--topics", h.topics, "number of topics K")->required();
  cmd->add_option("--alpha", h.alpha, "symmetric Dirichlet prior on theta (default 1/K)");
  cmd->add_option("--beta", h.beta, "symmetric Dirichlet prior on phi (default 1/K)");
  if (with_granularity)
    cmd->add_option("--granularity", h.granularity, "sentence | word")->capture_default_str();
}

ojson hyper_json(const Hyperparams& h) {
  return {{"topics", h.K},
          {"alpha", format_real(h.alpha)},
          {"beta", format_real(h.beta)},
          {"granularity", std::string(to_string(h.granularity))},
          {"seed", h.seed}};
}

struct TrainCmdOptions {
  std::string corpus, output, heldout, diagnostics, theta_out, label;
  HyperOptions hyper;
  std::size_t iterations = 100;
  std::size_t eval_every = 1;
  std::size_t fold_in_iterations = 20;
};

FeatureMatrix training_thetas(const Corpus& corpus, const SamplerState& state, const Hyperparams& h) {
  FeatureMatrix x;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d)
    x.push_back(corpus.documents[d].id, estimate_theta(state, h, d).theta);
  return x;
}

int cmd_train(const TrainCmdOptions& o) {
  const auto hyper = o.hyper.resolve();
  const auto corpus = load_corpus(o.corpus);
  DiagnosticsSeries series{o.label.empty() ? std::string(to_string(hyper.granularity)) : o.label, {}};

  TrainOptions opts;
  opts.iterations = o.iterations;
  opts.eval_every = o.eval_every;
  if (!o.heldout.empty())
    opts.evaluate = heldout_evaluator(load_corpus(o.heldout), corpus.vocabulary, o.fold_in_iterations, hyper.seed);
  else if (!o.diagnostics.empty())
    opts.evaluate = training_perplexity;
  opts.on_sweep = [&](const SweepRecord& r) { series.append(r); };

  const auto result = train(corpus, hyper, opts);
  save_model(result.model, o.output);
  if (!o.diagnostics.empty()) write_file(o.diagnostics, diagnostics_csv(std::span(&series, 1)));
  if (!o.theta_out.empty())
    write_file(o.theta_out, features_csv(training_thetas(corpus, result.state, hyper)));

  auto cfg = hyper_json(hyper);
  cfg["command"] = "train";
  cfg["corpus"] = o.corpus;
  cfg["iterations"] = o.iterations;
  cfg["eval_every"] = o.eval_every;
  cfg["heldout"] = o.heldout;
  cfg["perplexity_on"] = o.heldout.empty() ? "training" : "heldout";
  cfg["fold_in_iterations"] = o.fold_in_iterations;
  cfg["diagnostics"] = o.diagnostics;
  cfg["theta_out"] = o.theta_out;
  write_config(o.output, cfg);

  double seconds = 0.0;
  for (const auto& r : series.rows) seconds += r.seconds;
  std::printf("trained K=%zu %s model: %zu iterations in %.3f s\n", hyper.K,
              std::string(to_string(hyper.granularity)).c_str(), o.iterations, seconds);
  if (!series.rows.empty() && series.rows.back().perplexity)
    std::printf("final perplexity (%s): %.4f\n", o.heldout.empty() ? "training" : "held-out",
                *series.rows.back().perplexity);
  return 0;
}

struct InferOptions {
  std::string model, input, output, stopwords;
  bool pretokenized = false;
  bool no_lowercase = false;
  std::size_t min_term_length = 1;
  std::size_t iterations = 50;
  std::uint64_t seed = 1;
};

int cmd_infer(const InferOptions& o) {
  const auto model = load_model(o.model);
  const auto cfg = preprocess_config(o.stopwords, o.pretokenized, o.no_lowercase, o.min_term_length);
  const FoldIn fold_in(model);
  FeatureMatrix x;
  x.dim = model.K();
  std::size_t empty = 0;
  for (const auto& raw : read_jsonl(o.input)) {
    const auto doc = encode_with_vocabulary(raw, model.vocabulary, cfg);
    const auto r = fold_in.infer(doc, o.iterations, o.seed);
    if (r.empty_document) {
      ++empty;
      std::fprintf(stderr, "warning: document '%s' has no in-vocabulary tokens; uniform theta\n",
                   doc.id.c_str());
    }
    x.push_back(doc.id, r.theta.theta);
  }
  write_file(o.output, features_csv(x));
  write_config(o.output, {{"command", "infer"},
                          {"model", o.model},
                          {"input", o.input},
                          {"iterations", o.iterations},
                          {"seed", o.seed},
                          {"stopwords", o.stopwords},
                          {"pretokenized", o.pretokenized},
                          {"lowercase", cfg.lowercase},
                          {"min_term_length", o.min_term_length}});
  std::printf("inferred %zu documents (%zu without in-vocabulary tokens)\n", x.rows(), empty);
  return 0;
}

struct PerplexityOptions {
  std::string model, heldout, output;
  std::size_t iterations = 50;
  std::uint64_t seed = 1;
};

int cmd_perplexity(const PerplexityOptions& o) {
  const auto model = load_model(o.model);
  const auto heldout = load_corpus(o.heldout);
  const auto r = perplexity(model, heldout, o.iterations, o.seed);
  ojson report{{"perplexity", r.perplexity},
               {"total_tokens", r.total_tokens},
               {"skipped_tokens", r.skipped_tokens},
               {"documents", heldout.documents.size()}};
  write_file(o.output, report.dump(2) + "\n");
  write_config(o.output, {{"command", "perplexity"},
                          {"model", o.model},
                          {"heldout", o.heldout},
                          {"iterations", o.iterations},
                          {"seed", o.seed}});
  std::printf("perplexity %.6f over %zu tokens (%zu out of vocabulary)\n", r.perplexity,
              r.total_tokens, r.skipped_tokens);
  return 0;
}

struct ClassifyOptions {
  std::vector<std::string> features;
  std::string labels, output;
  std::vector<double> grid = default_lambda_grid();
  std::size_t folds = 5;
  std::size_t epochs = kDefaultEpochs;
  std::uint64_t seed = 1;
  double test_fraction = 0.25;
};

ClassificationReport classify_split(const FeatureMatrix& x, const std::vector<LabelSet>& y,
                                    const ClassifyOptions& o) {
  const auto [train_idx, test_idx] = split_train_test(x.rows(), o.test_fraction, o.seed);
  std::vector<LabelSet> ytr, yte;
  for (auto i : train_idx) ytr.push_back(y[i]);
  for (auto i : test_idx) yte.push_back(y[i]);
  PipelineOptions p;
  p.grid = o.grid;
  p.folds = o.folds;
  p.epochs = o.epochs;
  p.seed = o.seed;
  return evaluate_pipeline(x.select(train_idx), ytr, x.select(test_idx), yte, p);
}

int cmd_classify(const ClassifyOptions& o) {
  if (o.features.empty() || o.features.size() > 2)
    throw UsageError("--features must be given once or twice (twice concatenates)");
  std::vector<FeatureMatrix> parts;
  for (const auto& f : o.features) parts.push_back(read_features_csv(f));
  const auto x = parts.size() == 2 ? concat_features(parts[0], parts[1]) : parts[0];
  const auto y = align_labels(x, parse_labels_csv(read_file(o.labels)));

  const auto report = classify_split(x, y, o);
  auto j = report_to_json(report);
  if (parts.size() == 2) {
    ojson components = ojson::array();
    bool better = true;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto r = classify_split(parts[i], y, o);
      components.push_back({{"features", o.features[i]}, {"feature_dim", r.feature_dim}, {"micro_f1", r.micro_f1}});
      better = better && report.micro_f1 > r.micro_f1;
    }
    j["components"] = components;
    j["concatenation_outperforms_both"] = better;
  }
  write_file(o.output, j.dump(2) + "\n");
  ojson grid = ojson::array();
  for (double l : o.grid) grid.push_back(format_real(l));
  write_config(o.output, {{"command", "classify"},
                          {"features", o.features},
                          {"labels", o.labels},
                          {"lambda_grid", grid},
                          {"folds", o.folds},
                          {"epochs", o.epochs},
                          {"seed", o.seed},
                          {"test_fraction", o.test_fraction}});
  std::printf("micro-F1 %.4f (dim %zu, lambda %g, %zu train / %zu test)\n", report.micro_f1,
              report.feature_dim, report.chosen_lambda, report.train_docs, report.test_docs);
  return 0;
}

struct GenerateOptions {
  std::string output, truth, labels_out, heldout_out;
  HyperOptions hyper;
  std::size_t docs = 500;
  std::size_t heldout_docs = 0;
  std::size_t vocab_size = 50;
  double xi_sentences = 8.0;
  double xi_words = 6.0;
  std::size_t support = 10;
  double support_mass = 0.9;
};

int cmd_generate(const GenerateOptions& o) {
  const auto hyper = o.hyper.resolve();
  GeneratorConfig cfg;
  cfg.D = o.docs + o.heldout_docs;
  cfg.V = o.vocab_size;
  cfg.xi_sentences = o.xi_sentences;
  cfg.xi_words = o.xi_words;
  if (o.support > 0) cfg.true_phi = separated_phi(hyper.K, cfg.V, o.support, o.support_mass);
  auto gen = generate_corpus(cfg, hyper);
  label_by_dominant_topic(gen, hyper.K);

  Corpus train_part{{}, gen.corpus.vocabulary}, heldout_part{{}, gen.corpus.vocabulary};
  for (std::size_t d = 0; d < gen.corpus.documents.size(); ++d)
    (d < o.docs ? train_part : heldout_part).documents.push_back(gen.corpus.documents[d]);
  save_corpus(train_part, o.output);
  if (!o.heldout_out.empty()) {
    if (o.heldout_docs == 0) throw UsageError("--heldout-out needs --heldout-docs > 0");
    save_corpus(heldout_part, o.heldout_out);
  }
  if (!o.labels_out.empty()) write_file(o.labels_out, corpus_labels_csv(train_part));
  if (!o.truth.empty()) {
    nlohmann::json phi = nlohmann::json::array();
    for (std::size_t k = 0; k < gen.truth.phi.rows; ++k) {
      auto row = gen.truth.phi.row(k);
      phi.push_back(std::vector<double>(row.begin(), row.end()));
    }
    nlohmann::json truth{{"phi", phi}, {"theta", gen.truth.theta}, {"z", gen.truth.z}};
    write_file(o.truth, truth.dump() + "\n");
  }
  auto c = hyper_json(hyper);
  c.erase("granularity");
  c["command"] = "generate";
  c["docs"] = o.docs;
  c["heldout_docs"] = o.heldout_docs;
  c["vocab_size"] = o.vocab_size;
  c["xi_sentences"] = format_real(o.xi_sentences);
  c["xi_words"] = format_real(o.xi_words);
  c["support"] = o.support;
  c["support_mass"] = format_real(o.support_mass);
  write_config(o.output, c);
  print_corpus_summary(train_part);
  return 0;
}

struct BenchOptions {
  std::string corpus, output, summary, heldout, ratio;
  HyperOptions hyper;
  std::size_t iterations = 100;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t eval_every = 1;
  std::size_t fold_in_iterations = 20;
  double rel_eps = kDefaultConvergenceEps;
  std::size_t window = kDefaultConvergenceWindow;
};

int cmd_bench(const BenchOptions& o) {
  const auto corpus = load_corpus(o.corpus);
  BenchConfig cfg;
  cfg.K = o.hyper.resolve().K;
  cfg.alpha = o.hyper.alpha;
  cfg.beta = o.hyper.beta;
  cfg.iterations = o.iterations;
  cfg.seeds = o.seeds;
  cfg.eval_every = o.eval_every;
  if (!o.heldout.empty()) cfg.heldout = load_corpus(o.heldout);
  cfg.fold_in_iterations = o.fold_in_iterations;
  cfg.rel_eps = o.rel_eps;
  cfg.window = o.window;

  const auto result = run_bench(corpus, cfg);
  write_file(o.output, diagnostics_csv(result.series));
  if (!o.summary.empty()) write_file(o.summary, convergence_csv(result));
  if (!o.ratio.empty()) write_file(o.ratio, ratio_csv(perplexity_ratio(result.series[0], result.series[1])));

  ojson c{{"command", "bench"},
          {"corpus", o.corpus},
          {"topics", cfg.K},
          {"alpha", format_real(cfg.alpha.value_or(1.0 / static_cast<double>(cfg.K)))},
          {"beta", format_real(cfg.beta.value_or(1.0 / static_cast<double>(cfg.K)))},
          {"iterations", o.iterations},
          {"seeds", o.seeds},
          {"eval_every", o.eval_every},
          {"heldout", o.heldout},
          {"fold_in_iterations", o.fold_in_iterations},
          {"rel_eps", format_real(o.rel_eps)},
          {"window", o.window}};
  write_config(o.output, c);

  std::printf("%-22s %-12s %-16s %-14s %s\n", "chain", "converged_at", "final_perplexity", "first25_sec",
              "total_sec");
  for (const auto& ch : result.chains) {
    std::printf("%-22s %-12s %-16.4f %-14.4f %.4f\n", ch.label.c_str(),
                ch.converged_at ? std::to_string(*ch.converged_at).c_str() : "-",
                ch.final_perplexity.value_or(0.0), ch.seconds_first_25, ch.seconds_total);
  }
  return 0;
}

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic models with one latent topic per sentence (or per word, i.e. LDA)"};
  app.require_subcommand(1);

  PrepOptions prep;
  auto* c_prep = app.add_subcommand("prep", "preprocess JSONL documents into a corpus file");
  c_prep->add_option("input", prep.input, "JSONL input")->required();
  c_prep->add_option("-o,--output", prep.output, "corpus file to write")->required();
  c_prep->add_option("--stopwords", prep.stopwords, "stopword file, one term per line");
  c_prep->add_flag("--pretokenized", prep.pretokenized, "input documents carry \"sentences\" token lists");
  c_prep->add_flag("--no-lowercase", prep.no_lowercase, "keep case");
  c_prep->add_option("--min-term-length", prep.min_term_length, "drop shorter terms")->capture_default_str();
  c_prep->add_option("--labels-out", prep.labels_out, "write doc_id,labels CSV");

  TrainCmdOptions tr;
  auto* c_train = app.add_subcommand("train", "train a model by collapsed Gibbs sampling");
  c_train->add_option("corpus", tr.corpus, "corpus file from prep/generate")->required();
  c_train->add_option("-o,--output", tr.output, "model file to write")->required();
  add_hyper_flags(c_train, tr.hyper, true);
  c_train->add_option("--iterations", tr.iterations, "Gibbs sweeps")->capture_default_str();
  c_train->add_option("--seed", tr.hyper.seed, "random seed")->capture_default_str();
  c_train->add_option("--eval-every", tr.eval_every, "perplexity cadence in sweeps")->capture_default_str();
  c_train->add_option("--heldout", tr.heldout, "held-out corpus file for perplexity");
  c_train->add_option("--diagnostics", tr.diagnostics, "per-sweep diagnostics CSV");
  c_train->add_option("--fold-in-iterations", tr.fold_in_iterations, "fold-in sweeps per evaluation")
      ->capture_default_str();
  c_train->add_option("--theta-out", tr.theta_out, "training-document topic features CSV");
  c_train->add_option("--label", tr.label, "series label in the diagnostics CSV");

  InferOptions inf;
  auto* c_infer = app.add_subcommand("infer", "estimate topic distributions of new documents");
  c_infer->add_option("model", inf.model, "model file")->required();
  c_infer->add_option("input", inf.input, "JSONL documents")->required();
  c_infer->add_option("-o,--output", inf.output, "theta CSV to write")->required();
  c_infer->add_option("--iterations", inf.iterations, "fold-in sweeps")->capture_default_str();
  c_infer->add_option("--seed", inf.seed, "random seed")->capture_default_str();
  c_infer->add_option("--stopwords", inf.stopwords, "stopword file used at prep time");
  c_infer->add_flag("--pretokenized", inf.pretokenized, "input documents carry \"sentences\" token lists");
  c_infer->add_flag("--no-lowercase", inf.no_lowercase, "keep case");
  c_infer->add_option("--min-term-length", inf.min_term_length, "drop shorter terms")->capture_default_str();

  PerplexityOptions px;
  auto* c_px = app.add_subcommand("perplexity", "held-out perplexity of a model");
  c_px->add_option("model", px.model, "model file")->required();
  c_px->add_option("heldout", px.heldout, "held-out corpus file")->required();
  c_px->add_option("-o,--output", px.output, "report JSON to write")->required();
  c_px->add_option("--iterations", px.iterations, "fold-in sweeps")->capture_default_str();
  c_px->add_option("--seed", px.seed, "random seed")->capture_default_str();

  ClassifyOptions cl;
  auto* c_cl = app.add_subcommand("classify", "binary-relevance linear classification on topic features");
  c_cl->add_option("--features", cl.features, "feature CSV (twice to concatenate)")->required();
  c_cl->add_option("--labels", cl.labels, "doc_id,labels CSV")->required();
  c_cl->add_option("-o,--output", cl.output, "report JSON to write")->required();
  c_cl->add_option("--lambda-grid", cl.grid, "comma-separated regularization grid")->delimiter(',');
  c_cl->add_option("--folds", cl.folds, "cross-validation folds")->capture_default_str();
  c_cl->add_option("--epochs", cl.epochs, "optimizer epochs")->capture_default_str();
  c_cl->add_option("--seed", cl.seed, "random seed")->capture_default_str();
  c_cl->add_option("--test-fraction", cl.test_fraction, "held-out test share")->capture_default_str();

  GenerateOptions gen;
  auto* c_gen = app.add_subcommand("generate", "sample a synthetic corpus from the sentence-level model");
  c_gen->add_option("-o,--output", gen.output, "corpus file to write")->required();
  c_gen->add_option("--truth", gen.truth, "ground-truth JSON (phi, theta, z)");
  c_gen->add_option("--labels-out", gen.labels_out, "dominant-topic labels CSV");
  c_gen->add_option("--heldout-out", gen.heldout_out, "held-out corpus file");
  c_gen->add_option("--heldout-docs", gen.heldout_docs, "extra documents for --heldout-out");
  add_hyper_flags(c_gen, gen.hyper, false);
  c_gen->add_option("--seed", gen.hyper.seed, "random seed")->capture_default_str();
  c_gen->add_option("--docs", gen.docs, "documents")->capture_default_str();
  c_gen->add_option("--vocab-size", gen.vocab_size, "vocabulary size")->capture_default_str();
  c_gen->add_option("--xi-sentences", gen.xi_sentences, "Poisson rate of sentences per document")
      ->capture_default_str();
  c_gen->add_option("--xi-words", gen.xi_words, "Poisson rate of words per sentence")->capture_default_str();
  c_gen->add_option("--support", gen.support, "terms owned by each topic (0: phi ~ Dirichlet(beta))")
      ->capture_default_str();
  c_gen->add_option("--support-mass", gen.support_mass, "probability mass on a topic's own terms")
      ->capture_default_str();

  BenchOptions bench;
  auto* c_bench = app.add_subcommand("bench", "compare sentence and word granularity convergence");
  c_bench->add_option("corpus", bench.corpus, "corpus file")->required();
  c_bench->add_option("-o,--output", bench.output, "per-sweep timing CSV")->required();
  c_bench->add_option("--summary", bench.summary, "convergence summary CSV");
  c_bench->add_option("--ratio", bench.ratio, "word/sentence perplexity ratio CSV for the first seed");
  add_hyper_flags(c_bench, bench.hyper, false);
  c_bench->add_option("--iterations", bench.iterations, "sweeps per chain")->capture_default_str();
  c_bench->add_option("--seeds", bench.seeds, "comma-separated seeds")->delimiter(',');
  c_bench->add_option("--eval-every", bench.eval_every, "perplexity cadence")->capture_default_str();
  c_bench->add_option("--heldout", bench.heldout, "held-out corpus file (default: training tokens)");
  c_bench->add_option("--fold-in-iterations", bench.fold_in_iterations, "fold-in sweeps")
      ->capture_default_str();
  c_bench->add_option("--rel-eps", bench.rel_eps, "relative decrease threshold")->capture_default_str();
  c_bench->add_option("--window", bench.window, "evaluations in the convergence window")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (c_prep->parsed()) return run_guarded([&] { return cmd_prep(prep); });
  if (c_train->parsed()) return run_guarded([&] { return cmd_train(tr); });
  if (c_infer->parsed()) return run_guarded([&] { return cmd_infer(inf); });
  if (c_px->parsed()) return run_guarded([&] { return cmd_perplexity(px); });
  if (c_cl->parsed()) return run_guarded([&] { return cmd_classify(cl); });
  if (c_gen->parsed()) return run_guarded([&] { return cmd_generate(gen); });
  if (c_bench->parsed()) return run_guarded([&] { return cmd_bench(bench); });
  return 2;
}

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

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "senlda/error.hpp"
#include "senlda/text.hpp"

namespace senlda {

using TermId = std::uint32_t;
using Sentence = std::vector<TermId>;

/// Bijective term <-> id map. Ids are dense and assigned in first-occurrence
/// order, so the same input always produces the same vocabulary.
class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> terms) {
    for (auto& t : terms) {
      if (!term_to_id_.emplace(t, static_cast<TermId>(id_to_term_.size())).second)
        throw FormatError("duplicate vocabulary term: " + t);
      id_to_term_.push_back(std::move(t));
    }
  }

  TermId add(std::string_view term) {
    auto [it, inserted] =
        term_to_id_.emplace(std::string(term), static_cast<TermId>(id_to_term_.size()));
    if (inserted) id_to_term_.emplace_back(term);
    return it->second;
  }

  std::optional<TermId> find(std::string_view term) const {
    auto it = term_to_id_.find(std::string(term));
    if (it == term_to_id_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& term(TermId id) const { return id_to_term_.at(id); }
  const std::vector<std::string>& terms() const { return id_to_term_; }
  std::size_t size() const { return id_to_term_.size(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_term_ == b.id_to_term_;
  }

 private:
  std::unordered_map<std::string, TermId> term_to_id_;
  std::vector<std::string> id_to_term_;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;  // each non-empty
  std::vector<std::string> labels;
  std::size_t skipped_tokens = 0;   // out-of-vocabulary tokens dropped at encoding

  std::size_t num_tokens() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }

  friend bool operator==(const Document&, const Document&) = default;
};

struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;

  std::size_t num_sentences() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.sentences.size();
    return n;
  }
  std::size_t num_tokens() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.num_tokens();
    return n;
  }
};

struct PreprocessConfig {
  bool lowercase = true;
  std::set<std::string> stopwords;
  std::size_t min_term_length = 1;
  bool pretokenized = false;
};

/// One input document before encoding: either free text or sentences of
/// already tokenized (e.g. externally lemmatized) terms.
struct RawDocument {
  std::string id;
  std::variant<std::string, std::vector<std::vector<std::string>>> content;
  std::vector<std::string> labels;
};

// Splits after '.', '!' or '?' when followed by whitespace. Sentences are
// trimmed; a trailing unterminated span becomes the last sentence.
inline std::vector<std::string> segment_sentences(std::string_view input) {
  std::vector<std::string> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e) {
      const auto cp = text::decode(input, b);
      if (!text::is_space(cp.value)) break;
      b += cp.length;
    }
    // trailing whitespace is trimmed by only ending spans at non-space bytes
    if (b < e) out.emplace_back(input.substr(b, e - b));
  };

  std::size_t start = 0;
  std::size_t last_non_space_end = 0;
  bool prev_terminator = false;
  for (std::size_t i = 0; i < input.size();) {
    const auto cp = text::decode(input, i);
    const bool space = text::is_space(cp.value);
    if (space && prev_terminator) {
      emit(start, last_non_space_end);
      start = i + cp.length;
      last_non_space_end = start;
    } else if (!space) {
      last_non_space_end = i + cp.length;
    }
    prev_terminator = !space && (cp.value == '.' || cp.value == '!' || cp.value == '?');
    i += cp.length;
  }
  if (last_non_space_end > start) emit(start, last_non_space_end);
  return out;
}

namespace detail {

inline std::string_view strip_punct(std::string_view tok) {
  std::size_t b = 0, e = tok.size();
  while (b < e) {
    const auto cp = text::decode(tok, b);
    if (!text::is_punct(cp.value)) break;
    b += cp.length;
  }
  while (e > b) {
    std::size_t p = e - 1;
    while (p > b && (static_cast<unsigned char>(tok[p]) & 0xC0) == 0x80) --p;
    if (!text::is_punct(text::decode(tok, p).value)) break;
    e = p;
  }
  return tok.substr(b, e - b);
}

// Lowercasing, stopword and length filtering shared by raw and pretokenized input.
inline std::optional<std::string> normalize_term(std::string_view tok,
                                                 const PreprocessConfig& cfg) {
  std::string term = cfg.lowercase ? text::to_lower(tok) : std::string(tok);
  if (term.empty()) return std::nullopt;
  if (cfg.stopwords.contains(term)) return std::nullopt;
  if (text::length(term) < cfg.min_term_length) return std::nullopt;
  return term;
}

}  // namespace detail

inline std::vector<std::string> tokenize(std::string_view sentence,
                                         const PreprocessConfig& cfg) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size()) {
      const auto cp = text::decode(sentence, i);
      if (!text::is_space(cp.value)) break;
      i += cp.length;
    }
    const std::size_t b = i;
    while (i < sentence.size()) {
      const auto cp = text::decode(sentence, i);
      if (text::is_space(cp.value)) break;
      i += cp.length;
    }
    if (i > b) {
      if (auto term = detail::normalize_term(detail::strip_punct(sentence.substr(b, i - b)), cfg))
        out.push_back(std::move(*term));
    }
  }
  return out;
}

namespace detail {

// Sentences of preprocessed terms for one raw document.
inline std::vector<std::vector<std::string>> preprocess(const RawDocument& doc,
                                                        const PreprocessConfig& cfg) {
  std::vector<std::vector<std::string>> sentences;
  if (const auto* raw = std::get_if<std::string>(&doc.content)) {
    if (cfg.pretokenized)
      throw FormatError("document '" + doc.id + "' has raw text but pretokenized input was requested");
    for (const auto& s : segment_sentences(*raw)) sentences.push_back(tokenize(s, cfg));
  } else {
    for (const auto& s : std::get<std::vector<std::vector<std::string>>>(doc.content)) {
      auto& out = sentences.emplace_back();
      for (const auto& tok : s)
        if (auto term = normalize_term(tok, cfg)) out.push_back(std::move(*term));
    }
  }
  return sentences;
}

}  // namespace detail

struct BuildReport {
  std::size_t dropped_documents = 0;
  std::size_t dropped_sentences = 0;
};

struct BuildResult {
  Corpus corpus;
  BuildReport report;
};

inline BuildResult build_corpus(std::span<const RawDocument> raw_docs,
                                const PreprocessConfig& cfg) {
  BuildResult result;
  auto& corpus = result.corpus;
  for (const auto& raw : raw_docs) {
    Document doc{raw.id, {}, raw.labels, 0};
    for (const auto& terms : detail::preprocess(raw, cfg)) {
      if (terms.empty()) {
        ++result.report.dropped_sentences;
        continue;
      }
      auto& sentence = doc.sentences.emplace_back();
      sentence.reserve(terms.size());
      for (const auto& t : terms) sentence.push_back(corpus.vocabulary.add(t));
    }
    if (doc.sentences.empty()) {
      ++result.report.dropped_documents;
      continue;
    }
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) throw AllDocumentsEmpty();
  return result;
}

/// Encodes a document against a frozen vocabulary; unknown terms are skipped
/// and counted in Document::skipped_tokens.
inline Document encode_with_vocabulary(const RawDocument& raw, const Vocabulary& vocabulary,
                                       const PreprocessConfig& cfg) {
  Document doc{raw.id, {}, raw.labels, 0};
  for (const auto& terms : detail::preprocess(raw, cfg)) {
    Sentence sentence;
    for (const auto& t : terms) {
      if (auto id = vocabulary.find(t))
        sentence.push_back(*id);
      else
        ++doc.skipped_tokens;
    }
    if (!sentence.empty()) doc.sentences.push_back(std::move(sentence));
  }
  return doc;
}

/// Re-encodes a document from one vocabulary into another by term string.
inline Document remap_document(const Document& doc, const Vocabulary& from, const Vocabulary& to) {
  Document out{doc.id, {}, doc.labels, doc.skipped_tokens};
  for (const auto& s : doc.sentences) {
    Sentence sentence;
    for (TermId id : s) {
      if (auto mapped = to.find(from.term(id)))
        sentence.push_back(*mapped);
      else
        ++out.skipped_tokens;
    }
    if (!sentence.empty()) out.sentences.push_back(std::move(sentence));
  }
  return out;
}

inline Corpus remap_corpus(const Corpus& corpus, const Vocabulary& to) {
  Corpus out{{}, to};
  out.documents.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents)
    out.documents.push_back(remap_document(d, corpus.vocabulary, to));
  return out;
}

}  // namespace senlda

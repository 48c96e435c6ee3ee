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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "senlda/corpus.hpp"
#include "senlda/error.hpp"

namespace senlda {

inline constexpr int kCorpusFormatVersion = 1;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("write failed: '" + path + "'");
}

/// Parses JSON Lines input, one document per line:
///   {"id": str, "text": str, "labels": [str]?}
///   {"id": str, "sentences": [[str]], "labels": [str]?}
/// Blank lines are ignored.
inline std::vector<RawDocument> parse_jsonl(std::string_view contents) {
  std::vector<RawDocument> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    const auto line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto where = " (line " + std::to_string(line_no) + ")";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("invalid JSON") + where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
      throw FormatError("document needs a string \"id\"" + where);

    RawDocument doc;
    doc.id = j["id"].get<std::string>();
    try {
      if (j.contains("text") && j.contains("sentences"))
        throw FormatError("document has both \"text\" and \"sentences\"" + where);
      if (j.contains("text")) {
        doc.content = j["text"].get<std::string>();
      } else if (j.contains("sentences")) {
        doc.content = j["sentences"].get<std::vector<std::vector<std::string>>>();
      } else {
        throw FormatError("document needs \"text\" or \"sentences\"" + where);
      }
      if (j.contains("labels")) doc.labels = j["labels"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed document") + where + ": " + e.what());
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<RawDocument> read_jsonl(const std::string& path) {
  return parse_jsonl(read_file(path));
}

// One term per line; surrounding whitespace and blank lines ignored.
inline std::set<std::string> read_stopwords(const std::string& path) {
  std::set<std::string> words;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    words.insert(line.substr(b, e - b + 1));
  }
  return words;
}

inline nlohmann::json corpus_to_json(const Corpus& corpus) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : corpus.documents) {
    nlohmann::json j{{"id", d.id}, {"sentences", d.sentences}};
    if (!d.labels.empty()) j["labels"] = d.labels;
    docs.push_back(std::move(j));
  }
  return {{"format_version", kCorpusFormatVersion},
          {"vocabulary", corpus.vocabulary.terms()},
          {"documents", std::move(docs)}};
}

inline Corpus corpus_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kCorpusFormatVersion)
      throw FormatError("unsupported corpus format_version");
    Corpus corpus;
    corpus.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    const auto V = corpus.vocabulary.size();
    for (const auto& jd : j.at("documents")) {
      Document d;
      d.id = jd.at("id").get<std::string>();
      d.sentences = jd.at("sentences").get<std::vector<Sentence>>();
      if (jd.contains("labels")) d.labels = jd["labels"].get<std::vector<std::string>>();
      for (const auto& s : d.sentences) {
        if (s.empty()) throw FormatError("empty sentence in document '" + d.id + "'");
        for (TermId t : s)
          if (t >= V) throw FormatError("token id out of range in document '" + d.id + "'");
      }
      corpus.documents.push_back(std::move(d));
    }
    return corpus;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed corpus file: ") + e.what());
  }
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  write_file(path, corpus_to_json(corpus).dump() + "\n");
}

inline Corpus load_corpus(const std::string& path) {
  const auto contents = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(contents);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
  return corpus_from_json(j);
}

}  // namespace senlda

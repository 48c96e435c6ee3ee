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

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "senlda/classify.hpp"
#include "senlda/corpus_io.hpp"
#include "senlda/model_io.hpp"

namespace senlda {

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (true) {
    const auto e = s.find(sep, b);
    out.emplace_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) break;
    b = e + 1;
  }
  return out;
}

inline std::vector<std::string> lines(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

}  // namespace detail

/// `doc_id,f0,...,f{dim-1}` then one row per document.
inline std::string features_csv(const FeatureMatrix& x) {
  std::string out = "doc_id";
  for (std::size_t j = 0; j < x.dim; ++j) out += ",f" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out += x.doc_ids[i];
    for (double v : x.row(i)) out += ',' + format_real(v);
    out += '\n';
  }
  return out;
}

inline FeatureMatrix parse_features_csv(std::string_view text) {
  const auto rows = detail::lines(text);
  if (rows.empty() || rows[0].rfind("doc_id", 0) != 0)
    throw FormatError("feature CSV must start with a 'doc_id,f0,...' header");
  FeatureMatrix x;
  x.dim = detail::split(rows[0], ',').size() - 1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto f = detail::split(rows[i], ',');
    if (f.size() != x.dim + 1)
      throw FormatError("feature CSV line " + std::to_string(i + 1) + ": wrong number of fields");
    std::vector<double> v(x.dim);
    try {
      for (std::size_t j = 0; j < x.dim; ++j) v[j] = std::stod(f[j + 1]);
    } catch (const std::exception&) {
      throw FormatError("feature CSV line " + std::to_string(i + 1) + ": bad number");
    }
    x.push_back(std::move(f[0]), v);
  }
  return x;
}

inline FeatureMatrix read_features_csv(const std::string& path) {
  return parse_features_csv(read_file(path));
}

/// `doc_id,label1;label2;...` with an optional `doc_id,labels` header.
inline std::string labels_csv(std::span<const std::string> ids, std::span<const LabelSet> labels) {
  std::string out = "doc_id,labels\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i] + ',';
    for (std::size_t j = 0; j < labels[i].size(); ++j) {
      if (j) out += ';';
      out += labels[i][j];
    }
    out += '\n';
  }
  return out;
}

inline std::map<std::string, LabelSet> parse_labels_csv(std::string_view text) {
  std::map<std::string, LabelSet> out;
  const auto rows = detail::lines(text);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 && rows[i] == "doc_id,labels") continue;
    const auto comma = rows[i].find(',');
    if (comma == std::string::npos)
      throw FormatError("label file line " + std::to_string(i + 1) + ": expected 'doc_id,labels'");
    LabelSet l;
    for (auto& part : detail::split(std::string_view(rows[i]).substr(comma + 1), ';'))
      if (!part.empty()) l.push_back(std::move(part));
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    if (!out.emplace(rows[i].substr(0, comma), std::move(l)).second)
      throw FormatError("label file: duplicate doc id '" + rows[i].substr(0, comma) + "'");
  }
  return out;
}

inline std::vector<LabelSet> align_labels(const FeatureMatrix& x,
                                          const std::map<std::string, LabelSet>& labels) {
  std::vector<LabelSet> out;
  for (const auto& id : x.doc_ids) {
    auto it = labels.find(id);
    if (it == labels.end()) throw DocIdMismatch("no labels for document '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

inline nlohmann::ordered_json report_to_json(const ClassificationReport& r) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (const auto& [label, f1] : r.per_class) per_class[label] = f1;
  nlohmann::ordered_json cv = nlohmann::ordered_json::array();
  for (const auto& [lambda, f1] : r.cv.mean_f1) cv.push_back({{"lambda", lambda}, {"mean_f1", f1}});
  return {{"micro_f1", r.micro_f1},
          {"per_class", per_class},
          {"chosen_lambda", r.chosen_lambda},
          {"feature_dim", r.feature_dim},
          {"train_docs", r.train_docs},
          {"test_docs", r.test_docs},
          {"cv", cv},
          {"skipped_folds", r.cv.skipped_folds}};
}

}  // namespace senlda

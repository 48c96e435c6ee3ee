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

#include <cstdio>
#include <string>

#include "json.hpp"
#include "senlda/corpus_io.hpp"
#include "senlda/sampler.hpp"

namespace senlda {

/// Model file:
///   {"format_version": 1, "K": ..., "alpha": ..., "beta": ...,
///    "granularity": "sentence"|"word", "vocabulary": [terms in id order],
///    "phi": [[V reals] x K]}
/// Written by hand so that every real carries 17 significant digits.
inline std::string model_to_json(const TrainedModel& m) {
  std::string out = "{\"format_version\":" + std::to_string(m.format_version);
  out += ",\"K\":" + std::to_string(m.K());
  out += ",\"alpha\":" + format_real(m.hyper.alpha);
  out += ",\"beta\":" + format_real(m.hyper.beta);
  out += ",\"granularity\":\"" + std::string(to_string(m.hyper.granularity)) + "\"";
  out += ",\"vocabulary\":" + nlohmann::json(m.vocabulary.terms()).dump();
  out += ",\"phi\":[";
  for (std::size_t k = 0; k < m.K(); ++k) {
    if (k) out += ',';
    out += '[';
    for (std::size_t w = 0; w < m.V(); ++w) {
      if (w) out += ',';
      out += format_real(m.phi(k, w));
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

inline TrainedModel model_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TrainedModel m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kModelFormatVersion)
      throw FormatError("unsupported model format_version " + std::to_string(m.format_version));
    m.hyper.K = j.at("K").get<std::size_t>();
    m.hyper.alpha = j.at("alpha").get<double>();
    m.hyper.beta = j.at("beta").get<double>();
    m.hyper.granularity = parse_granularity(j.at("granularity").get<std::string>());
    m.hyper.validate();
    m.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>());
    const auto rows = j.at("phi").get<std::vector<std::vector<double>>>();
    if (rows.size() != m.hyper.K) throw FormatError("phi must have K rows");
    m.phi = Matrix(m.hyper.K, m.vocabulary.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k].size() != m.vocabulary.size()) throw FormatError("phi rows must have V entries");
      double sum = 0.0;
      for (std::size_t w = 0; w < rows[k].size(); ++w) {
        if (!(rows[k][w] > 0.0)) throw FormatError("phi entries must be positive");
        m.phi(k, w) = rows[k][w];
        sum += rows[k][w];
      }
      if (std::abs(sum - 1.0) > 1e-9) throw FormatError("phi rows must sum to 1");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid model hyperparameters: ") + e.what());
  } catch (const UsageError& e) {
    throw FormatError(e.what());
  }
}

inline void save_model(const TrainedModel& m, const std::string& path) {
  write_file(path, model_to_json(m));
}

inline TrainedModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

}  // namespace senlda

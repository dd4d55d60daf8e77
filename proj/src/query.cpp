// Copyright 2026 The Gramtrie Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gramtrie/query.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gramtrie/errors.hpp"
#include "gramtrie/ngram.hpp"

namespace gramtrie {

std::optional<std::span<const float>> gram_vector(const CompressedModel& model,
                                                  std::string_view gram_text) {
  auto id = model.trie.lookup(gram_text);
  if (!id) return std::nullopt;
  return model.matrix.row(*id);
}

WordVector word_vector(const CompressedModel& model, std::string_view word) {
  auto grams = extract_ngrams(word, model.meta.n_min, model.meta.n_max);

  WordVector out;
  out.values.assign(model.meta.dim, 0.0f);
  out.gram_total = grams.size();
  out.gram_hits = 0;

  /* Accumulate in double; each occurrence of a gram counts separately. */
  std::vector<double> acc(model.meta.dim, 0.0);
  for (const NGram& g : grams) {
    auto row = gram_vector(model, g.text);
    if (!row) continue;
    ++out.gram_hits;
    for (std::size_t d = 0; d < acc.size(); ++d) {
      acc[d] += static_cast<double>((*row)[d]);
    }
  }
  if (out.gram_hits > 0) {
    for (std::size_t d = 0; d < acc.size(); ++d) {
      out.values[d] =
          static_cast<float>(acc[d] / static_cast<double>(out.gram_hits));
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> nearest_words(
    const CompressedModel& model, std::string_view probe,
    const std::vector<std::string>& candidates, std::size_t top_k) {
  WordVector pv = word_vector(model, probe);
  if (pv.gram_hits == 0) {
    throw DegenerateQueryError("probe word '" + std::string(probe) +
                               "' matched no stored grams");
  }
  double pnorm = 0.0;
  for (float v : pv.values) pnorm += static_cast<double>(v) * v;
  pnorm = std::sqrt(pnorm);
  if (pnorm == 0.0) {
    throw DegenerateQueryError("probe word '" + std::string(probe) +
                               "' has a zero vector");
  }

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(candidates.size());
  for (const std::string& cand : candidates) {
    WordVector cv = word_vector(model, cand);
    if (cv.gram_hits == 0) continue; /* nothing stored for this word */
    double cnorm = 0.0;
    double dot = 0.0;
    for (std::size_t d = 0; d < cv.values.size(); ++d) {
      cnorm += static_cast<double>(cv.values[d]) * cv.values[d];
      dot += static_cast<double>(cv.values[d]) * pv.values[d];
    }
    cnorm = std::sqrt(cnorm);
    if (cnorm == 0.0) continue;
    double cos = std::clamp(dot / (pnorm * cnorm), -1.0, 1.0);
    scored.emplace_back(cand, cos);
  }

  /* Stable: equal scores keep candidate-list order. */
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  if (scored.size() > top_k) scored.resize(top_k);
  return scored;
}

}  // namespace gramtrie

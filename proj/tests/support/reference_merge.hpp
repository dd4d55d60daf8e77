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

#pragma once

// Brute-force reference for the merge pipeline, built on sorted string lists
// and maps instead of tries. Pass one folds each gram onto its longest proper
// byte-prefix ancestor in ascending sorted order (prefixes sort first, so the
// ancestor's id is already final). Pass two does the same with the longest
// proper byte-suffix ancestor, processing grams in ascending order of their
// byte-reversed text. Compaction renumbers surviving ids by first encounter
// over the sorted gram list. No trie code is involved anywhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gramtrie/embedding.hpp"

namespace testsupport {

struct ReferenceResult {
  std::vector<gramtrie::EmbeddingId> after_prefix;  // per sorted gram
  std::vector<gramtrie::EmbeddingId> final_ids;     // per sorted gram
  std::vector<gramtrie::EmbeddingId> new_ids;       // post-compaction
  std::uint64_t prefix_merges = 0;
  std::uint64_t suffix_merges = 0;
  std::size_t unique_after_prefix = 0;
  std::size_t unique_after_suffix = 0;
  std::size_t k = 0;
};

inline double reference_cosine(std::span<const float> a,
                               std::span<const float> b) {
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    na += static_cast<double>(a[t]) * static_cast<double>(a[t]);
  }
  for (std::size_t t = 0; t < b.size(); ++t) {
    nb += static_cast<double>(b[t]) * static_cast<double>(b[t]);
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  double dot = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    dot += static_cast<double>(a[t]) * static_cast<double>(b[t]);
  }
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

inline double reference_weighted_similarity(std::span<const float> a,
                                            std::span<const float> b,
                                            std::uint64_t freq_a,
                                            std::uint64_t freq_b,
                                            const gramtrie::SimilarityConfig& cfg) {
  double sim = reference_cosine(a, b);
  if (cfg.freq_lambda == 0.0) return sim;
  double f = static_cast<double>(std::min(freq_a, freq_b));
  double saturation =
      std::log1p(f) / std::log1p(static_cast<double>(cfg.freq_cap));
  return sim * (1.0 - cfg.freq_lambda * std::min(1.0, saturation));
}

// sorted_grams must be ascending and distinct; rows holds one vector per
// gram at the same index; freqs is parallel (pass all-zero when the config
// has freq_lambda = 0).
inline ReferenceResult reference_merge(
    const std::vector<std::string>& sorted_grams,
    const std::vector<std::uint64_t>& freqs,
    const gramtrie::EmbeddingMatrix& rows,
    const gramtrie::SimilarityConfig& cfg) {
  const std::size_t n = sorted_grams.size();
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) index.emplace(sorted_grams[i], i);

  auto longest_proper_prefix =
      [&](const std::string& s) -> std::optional<std::size_t> {
    for (std::size_t len = s.size() - 1; len >= 1; --len) {
      auto it = index.find(s.substr(0, len));
      if (it != index.end()) return it->second;
    }
    return std::nullopt;
  };
  auto longest_proper_suffix =
      [&](const std::string& s) -> std::optional<std::size_t> {
    for (std::size_t len = s.size() - 1; len >= 1; --len) {
      auto it = index.find(s.substr(s.size() - len));
      if (it != index.end()) return it->second;
    }
    return std::nullopt;
  };

  ReferenceResult out;
  out.after_prefix.resize(n);
  out.final_ids.resize(n);

  // Pass one: ascending sorted order, prefix ancestors.
  for (std::size_t i = 0; i < n; ++i) {
    gramtrie::EmbeddingId id = i;
    auto anc = longest_proper_prefix(sorted_grams[i]);
    if (anc.has_value()) {
      gramtrie::EmbeddingId anc_id = out.after_prefix[*anc];
      double sim = reference_weighted_similarity(
          rows.row(i), rows.row(anc_id), freqs[i], freqs[*anc], cfg);
      if (sim > cfg.tau && id != anc_id) {
        id = anc_id;
        out.prefix_merges += 1;
      }
    }
    out.after_prefix[i] = id;
  }

  // Pass two: ascending order of reversed text, suffix ancestors.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    std::string ra(sorted_grams[a].rbegin(), sorted_grams[a].rend());
    std::string rb(sorted_grams[b].rbegin(), sorted_grams[b].rend());
    return ra < rb;
  });
  for (std::size_t i : order) {
    gramtrie::EmbeddingId id = out.after_prefix[i];
    auto anc = longest_proper_suffix(sorted_grams[i]);
    if (anc.has_value()) {
      gramtrie::EmbeddingId anc_id = out.final_ids[*anc];
      double sim = reference_weighted_similarity(
          rows.row(id), rows.row(anc_id), freqs[i], freqs[*anc], cfg);
      if (sim > cfg.tau && id != anc_id) {
        id = anc_id;
        out.suffix_merges += 1;
      }
    }
    out.final_ids[i] = id;
  }

  // Compaction: first-encounter renumbering over the sorted gram list.
  out.new_ids.resize(n);
  std::unordered_map<gramtrie::EmbeddingId, gramtrie::EmbeddingId> dense;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = dense.emplace(
        out.final_ids[i], static_cast<gramtrie::EmbeddingId>(dense.size()));
    out.new_ids[i] = it->second;
    (void)fresh;
  }
  out.k = dense.size();

  {
    std::unordered_map<gramtrie::EmbeddingId, bool> seen;
    for (auto id : out.after_prefix) seen.emplace(id, true);
    out.unique_after_prefix = seen.size();
  }
  {
    std::unordered_map<gramtrie::EmbeddingId, bool> seen;
    for (auto id : out.final_ids) seen.emplace(id, true);
    out.unique_after_suffix = seen.size();
  }
  return out;
}

}  // namespace testsupport

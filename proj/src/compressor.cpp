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

#include "gramtrie/compressor.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "gramtrie/errors.hpp"

namespace gramtrie {

void CompressionStats::add_similarity(double sim) {
  if (sim < kHistLow) {
    below_range += 1;
    return;
  }
  std::size_t idx = static_cast<std::size_t>((sim - kHistLow) / kHistStep);
  if (idx >= kHistBuckets) idx = kHistBuckets - 1;
  histogram[idx] += 1;
}

double CompressionStats::ratio() const {
  if (grams_total == 0 || unique_final == 0) return 1.0;
  return static_cast<double>(grams_total) / static_cast<double>(unique_final);
}

namespace {

std::string reverse_bytes(std::string_view s) {
  return std::string(s.rbegin(), s.rend());
}

struct AncestorFrame {
  std::size_t depth;
  EmbeddingId final_id;
  std::uint64_t freq;
};

/* Shared body of the two merge passes. Walks the terminals of `trie` in
 * pre-order keeping a stack of terminal ancestors along the current path;
 * the nearest one is always already final because pre-order reaches it
 * first. Every terminal, merged or not, is re-inserted into the returned
 * trie under its byte-reversed key, which turns the prefix trie into the
 * suffix trie and the suffix trie back into a prefix trie. */
DoubleArrayTrie merge_pass(DoubleArrayTrie& trie, const EmbeddingMatrix& emb,
                           const SimilarityConfig& cfg, const GramSet& grams,
                           MergePhase phase, CompressionStats& stats,
                           std::vector<MergeRecord>& out_merges,
                           std::uint64_t& distinct_live) {
  cfg.validate();
  DoubleArrayTrie next;
  std::vector<AncestorFrame> ancestors;
  std::unordered_set<EmbeddingId> distinct;
  const bool weighted = cfg.freq_lambda > 0.0;

  trie.traverse_preorder([&](TrieState state, TrieState, std::string_view key,
                             const std::optional<EmbeddingId>& value) {
    std::size_t depth = key.size();
    while (!ancestors.empty() && ancestors.back().depth >= depth) {
      ancestors.pop_back();
    }
    if (!value.has_value()) return;

    EmbeddingId final_id = *value;
    std::uint64_t freq = 0;
    if (weighted) {
      /* Suffix-trie keys are reversed grams; recover the gram to find its
       * frequency. */
      std::string gram_text = phase == MergePhase::suffix
                                  ? reverse_bytes(key)
                                  : std::string(key);
      auto idx = grams.find(gram_text);
      if (idx.has_value()) freq = grams.frequencies[*idx];
    }

    if (!ancestors.empty()) {
      const AncestorFrame& parent = ancestors.back();
      double sim = emb.weighted_similarity(final_id, parent.final_id, freq,
                                           parent.freq, cfg);
      stats.add_similarity(sim);
      /* Strictly above tau merges; ids that already agree have nothing to
       * merge, which keeps a second pass over merged output a no-op. */
      if (sim > cfg.tau && final_id != parent.final_id) {
        out_merges.push_back({final_id, parent.final_id, sim, phase});
        trie.set_terminal_value(state, parent.final_id);
        final_id = parent.final_id;
        if (phase == MergePhase::prefix) {
          stats.prefix_merges += 1;
        } else {
          stats.suffix_merges += 1;
        }
      }
    }

    ancestors.push_back({depth, final_id, freq});
    distinct.insert(final_id);
    next.insert(reverse_bytes(key), final_id);
  });

  distinct_live = distinct.size();
  return next;
}

}  // namespace

DoubleArrayTrie phase1_build(const GramSet& grams,
                             const EmbeddingMatrix& embeddings) {
  if (grams.size() == 0) {
    throw InvalidInputError("phase1: gram set is empty");
  }
  if (embeddings.rows() != grams.size()) {
    throw DimensionMismatchError(
        "phase1: need exactly one embedding row per gram (" +
        std::to_string(embeddings.rows()) + " rows, " +
        std::to_string(grams.size()) + " grams)");
  }
  DoubleArrayTrie trie;
  for (std::size_t i = 0; i < grams.size(); ++i) {
    trie.insert(grams.grams[i].text, static_cast<EmbeddingId>(i));
  }
  return trie;
}

DoubleArrayTrie phase2_prefix_compress(DoubleArrayTrie& prefix_trie,
                                       const EmbeddingMatrix& embeddings,
                                       const SimilarityConfig& cfg,
                                       const GramSet& grams,
                                       CompressionStats& stats,
                                       std::vector<MergeRecord>& out_merges) {
  return merge_pass(prefix_trie, embeddings, cfg, grams, MergePhase::prefix,
                    stats, out_merges, stats.unique_after_prefix);
}

DoubleArrayTrie phase3_suffix_compress(DoubleArrayTrie& suffix_trie,
                                       const EmbeddingMatrix& embeddings,
                                       const SimilarityConfig& cfg,
                                       const GramSet& grams,
                                       CompressionStats& stats,
                                       std::vector<MergeRecord>& out_merges) {
  return merge_pass(suffix_trie, embeddings, cfg, grams, MergePhase::suffix,
                    stats, out_merges, stats.unique_after_suffix);
}

Phase4Result phase4_mark_compact(DoubleArrayTrie& prefix_trie,
                                 EmbeddingMatrix& embeddings) {
  if (prefix_trie.key_count() == 0) {
    throw InvalidInputError("phase4: trie has no terminals");
  }

  Phase4Result result;
  IdRemap& remap = result.remap;
  prefix_trie.traverse_preorder([&](TrieState state, TrieState,
                                    std::string_view,
                                    const std::optional<EmbeddingId>& value) {
    if (!value.has_value()) return;
    EmbeddingId old_id = *value;
    auto it = remap.to_new.find(old_id);
    EmbeddingId new_id;
    if (it == remap.to_new.end()) {
      new_id = static_cast<EmbeddingId>(remap.entries.size());
      remap.to_new.emplace(old_id, new_id);
      remap.entries.push_back({old_id, new_id});
    } else {
      new_id = it->second;
    }
    prefix_trie.set_terminal_value(state, new_id);
  });

  std::size_t k = remap.entries.size();

  /* The forward pass reads each surviving row once, at its old index, and
   * writes it at its new index. Writing ahead of the read cursor is only
   * unsafe when it lands on a row that still has to be read, which can
   * only happen when first-encounter order disagrees with old-id order.
   * Detect that up front and fall back to a scratch copy. */
  bool hazard = false;
  for (const auto& [old_id, new_id] : remap.entries) {
    if (new_id > old_id && remap.to_new.count(new_id) > 0) {
      hazard = true;
      break;
    }
  }

  if (!hazard) {
    auto moves = remap.entries;
    std::sort(moves.begin(), moves.end());
    for (const auto& [old_id, new_id] : moves) {
      embeddings.move_row(static_cast<std::size_t>(new_id),
                          static_cast<std::size_t>(old_id));
    }
    embeddings.truncate(k);
  } else {
    EmbeddingMatrix scratch(k, embeddings.dim());
    for (const auto& [old_id, new_id] : remap.entries) {
      scratch.set_row(static_cast<std::size_t>(new_id),
                      embeddings.row(static_cast<std::size_t>(old_id)));
    }
    embeddings = std::move(scratch);
    result.single_pass = false;
  }

  result.ratio = static_cast<double>(prefix_trie.key_count()) /
                 static_cast<double>(k);
  return result;
}

PipelineResult run_pipeline(const GramSet& grams, EmbeddingMatrix embeddings,
                            const SimilarityConfig& cfg, int n_min,
                            int n_max) {
  cfg.validate();
  if (n_min < 1 || n_min > n_max || n_max > 255) {
    throw InvalidInputError("run_pipeline: need 1 <= n_min <= n_max <= 255");
  }

  PipelineResult out;
  PipelineReport& report = out.report;
  report.stats.grams_total = grams.size();

  DoubleArrayTrie prefix = phase1_build(grams, embeddings);
  DoubleArrayTrie suffix = phase2_prefix_compress(
      prefix, embeddings, cfg, grams, report.stats, report.merges);
  DoubleArrayTrie rebuilt = phase3_suffix_compress(
      suffix, embeddings, cfg, grams, report.stats, report.merges);
  Phase4Result compact = phase4_mark_compact(rebuilt, embeddings);

  report.stats.unique_final = compact.remap.size();
  report.stats.compact_single_pass = compact.single_pass;

  CompressedModel& model = out.model;
  model.trie = std::move(rebuilt);
  model.matrix = std::move(embeddings);
  model.meta.format_version = 1;
  model.meta.dim = static_cast<std::uint32_t>(model.matrix.dim());
  model.meta.gram_count = grams.size();
  model.meta.unique_count = compact.remap.size();
  model.meta.tau = static_cast<float>(cfg.tau);
  model.meta.n_min = static_cast<std::uint8_t>(n_min);
  model.meta.n_max = static_cast<std::uint8_t>(n_max);
  validate_model(model);
  return out;
}

PipelineResult run_pipeline(const Vocabulary& vocab, EmbeddingMatrix embeddings,
                            const SimilarityConfig& cfg, int n_min,
                            int n_max) {
  GramSet grams = build_gram_set(vocab, n_min, n_max);
  return run_pipeline(grams, std::move(embeddings), cfg, n_min, n_max);
}

CompressedModel make_uncompressed_model(const GramSet& grams,
                                        const EmbeddingMatrix& embeddings,
                                        const SimilarityConfig& cfg, int n_min,
                                        int n_max) {
  CompressedModel model;
  model.trie = phase1_build(grams, embeddings);
  model.matrix = embeddings;
  model.meta.format_version = 1;
  model.meta.dim = static_cast<std::uint32_t>(embeddings.dim());
  model.meta.gram_count = grams.size();
  model.meta.unique_count = grams.size();
  model.meta.tau = static_cast<float>(cfg.tau);
  model.meta.n_min = static_cast<std::uint8_t>(n_min);
  model.meta.n_max = static_cast<std::uint8_t>(n_max);
  return model;
}

}  // namespace gramtrie

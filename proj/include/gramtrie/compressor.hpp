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

#include <array>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gramtrie/datrie.hpp"
#include "gramtrie/embedding.hpp"
#include "gramtrie/model_io.hpp"
#include "gramtrie/ngram.hpp"

namespace gramtrie {

enum class MergePhase : std::uint8_t { prefix = 2, suffix = 3 };

/* One id rewrite: the gram that owned old_id now shares surviving_id.
 * similarity is the weighted similarity that licensed the merge and is
 * always strictly above the configured tau; old_id != surviving_id. */
struct MergeRecord {
  EmbeddingId old_id = 0;
  EmbeddingId surviving_id = 0;
  double similarity = 0.0;
  MergePhase phase = MergePhase::prefix;
};

/* Counters accumulated across the pipeline. The histogram covers every
 * parent-child comparison (merged or not) from both merge passes, bucketed
 * at 0.0001 over [0.99, 1.0] with a shared bucket for anything below.
 * unique_after_* are measured distinct live ids at each phase boundary, so
 * grams_total >= unique_after_prefix >= unique_after_suffix >= unique_final
 * always holds. */
struct CompressionStats {
  static constexpr double kHistLow = 0.99;
  static constexpr double kHistStep = 0.0001;
  static constexpr std::size_t kHistBuckets = 100;

  std::array<std::uint64_t, kHistBuckets> histogram{};
  std::uint64_t below_range = 0;

  std::uint64_t prefix_merges = 0;
  std::uint64_t suffix_merges = 0;

  std::uint64_t grams_total = 0;
  std::uint64_t unique_after_prefix = 0;
  std::uint64_t unique_after_suffix = 0;
  std::uint64_t unique_final = 0;

  /* True when compaction ran as one in-place forward pass; false when the
   * guarded fallback had to copy through a scratch matrix. */
  bool compact_single_pass = true;

  void add_similarity(double sim);
  double ratio() const;
};

/* Dense renumbering old id -> new id in first-encounter order. */
struct IdRemap {
  std::vector<std::pair<EmbeddingId, EmbeddingId>> entries; /* encounter order */
  std::unordered_map<EmbeddingId, EmbeddingId> to_new;

  std::size_t size() const { return entries.size(); }
};

struct PipelineReport {
  CompressionStats stats;
  std::vector<MergeRecord> merges;
};

/* Builds the prefix trie over the sorted gram set; gram i gets id i.
 * Raises DimensionMismatchError unless embeddings has one row per gram,
 * InvalidInputError on an empty gram set. */
DoubleArrayTrie phase1_build(const GramSet& grams,
                             const EmbeddingMatrix& embeddings);

/* Walks terminals of the prefix trie in pre-order. Each terminal with a
 * nearest terminal ancestor is compared against that ancestor's already
 * final id; above tau the terminal adopts it (recorded in out_merges).
 * Every gram is then inserted into the returned suffix trie keyed by its
 * byte-reversed text, carrying the possibly merged id. `grams` supplies
 * frequencies for the penalty term; it is untouched when freq_lambda = 0. */
DoubleArrayTrie phase2_prefix_compress(DoubleArrayTrie& prefix_trie,
                                       const EmbeddingMatrix& embeddings,
                                       const SimilarityConfig& cfg,
                                       const GramSet& grams,
                                       CompressionStats& stats,
                                       std::vector<MergeRecord>& out_merges);

/* Same merge rule over the suffix trie (shared-suffix ancestors), then a
 * fresh prefix trie is rebuilt with the final ids and returned. */
DoubleArrayTrie phase3_suffix_compress(DoubleArrayTrie& suffix_trie,
                                       const EmbeddingMatrix& embeddings,
                                       const SimilarityConfig& cfg,
                                       const GramSet& grams,
                                       CompressionStats& stats,
                                       std::vector<MergeRecord>& out_merges);

/* Mark-compact: pre-order first-encounter order assigns new ids 0..k-1,
 * rows move to their new index, the matrix truncates to k rows, and trie
 * terminals are rewritten. The row moves run as a single forward pass over
 * ascending old ids; a read-after-overwrite hazard (possible only when the
 * remap is not monotone) is detected up front and routed through a scratch
 * copy instead, reported via single_pass. Returns the remap and the final
 * ratio gram_count / k. */
struct Phase4Result {
  IdRemap remap;
  double ratio = 1.0;
  bool single_pass = true;
};
Phase4Result phase4_mark_compact(DoubleArrayTrie& prefix_trie,
                                 EmbeddingMatrix& embeddings);

/* Runs phases 1-4. `embeddings` is taken by value: row r of the copy must
 * hold the vector of gram r in sorted order. Surviving rows keep their
 * input bits; merged grams point at their representative's row. */
struct PipelineResult {
  CompressedModel model;
  PipelineReport report;
};
PipelineResult run_pipeline(const GramSet& grams, EmbeddingMatrix embeddings,
                            const SimilarityConfig& cfg, int n_min, int n_max);

/* Convenience overload: derives the gram set from the vocabulary first. */
PipelineResult run_pipeline(const Vocabulary& vocab, EmbeddingMatrix embeddings,
                            const SimilarityConfig& cfg, int n_min, int n_max);

/* Identity model over the uncompressed table (gram i -> row i); the
 * baseline side of quality comparisons. */
CompressedModel make_uncompressed_model(const GramSet& grams,
                                        const EmbeddingMatrix& embeddings,
                                        const SimilarityConfig& cfg, int n_min,
                                        int n_max);

}  // namespace gramtrie
